#include "veccontract/comparison.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "veccontract/dynamics.hpp"
#include "veccontract/presets.hpp"
#include "veccontract/vnorm.hpp"

namespace cmp = veccontract::comparison;
namespace dyn = veccontract::dynamics;
namespace vn = veccontract::vnorm;
using veccontract::Error;
using veccontract::ErrorCode;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Affine comparison system phi(u) = M u built from expression strings.
cmp::ComparisonSystem affine_system(const Eigen::MatrixXd& m, bool attach_affine) {
  std::vector<std::string> sources;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::string row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!row.empty()) row += " + ";
      row += fmt(m(i, j)) + "*u" + std::to_string(j + 1);
    }
    sources.push_back(row);
  }
  std::optional<cmp::AffinePart> affine;
  if (attach_affine) affine = cmp::AffinePart{m, Eigen::VectorXd::Zero(m.rows())};
  return cmp::ComparisonSystem::make(sources, static_cast<int>(m.rows()), false, 0,
                                     affine);
}

TEST(CheckQmAffine, MetzlerExamples) {
  EXPECT_TRUE(cmp::check_qm_affine(mat2(-1.0, 1.0, 1.0, -3.0)));
  EXPECT_FALSE(cmp::check_qm_affine(mat2(0.5, -2.0, 1.0, -4.0)));
  EXPECT_TRUE(cmp::check_qm_affine(mat2(-7.0, 0.0, 0.0, 4.0)));
  EXPECT_THROW(cmp::check_qm_affine(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST(CheckQmAffine, DefaultNetworkComparisonMatrix) {
  const auto ex1 = veccontract::presets::make_example1();
  EXPECT_TRUE(cmp::check_qm_affine(ex1.comparison_matrix));
  EXPECT_DOUBLE_EQ(ex1.comparison_matrix(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(ex1.comparison_matrix(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(ex1.comparison_matrix(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(ex1.comparison_matrix(1, 1), -3.0);
}

TEST(ComparisonSystem, AffinePartValidated) {
  const Eigen::MatrixXd m = mat2(-1.0, 1.0, 1.0, -3.0);
  EXPECT_NO_THROW(affine_system(m, true));
  // a wrong affine part must be rejected at construction
  std::vector<std::string> sources{"-1*u1 + u2", "1*u1 - 3*u2"};
  cmp::AffinePart wrong{mat2(-1.0, 1.0, 1.0, -2.0), Eigen::VectorXd::Zero(2)};
  EXPECT_THROW(cmp::ComparisonSystem::make(sources, 2, false, 0, wrong), Error);
}

TEST(CheckQmSampled, StateCoupledMapAtFrozenState) {
  const auto phi = cmp::ComparisonSystem::make(
      std::vector<std::string>{"(1 - 4*x1)*u1 + u2", "(1 - 8*x2)*u2 + u1"}, 2, true, 2);
  const auto report =
      cmp::check_qm_sampled(phi, 5.0, 2000, 71, Eigen::VectorXd(Eigen::Vector2d(1.0, 1.0)));
  EXPECT_FALSE(report.counterexample_found);
  EXPECT_EQ(report.samples, 2000);
}

TEST(CheckQmSampled, CoordinateSwapIsMonotone) {
  const auto phi =
      cmp::ComparisonSystem::make(std::vector<std::string>{"u2", "u1"}, 2, false, 0);
  EXPECT_FALSE(cmp::check_qm_sampled(phi, 5.0, 2000, 3).counterexample_found);
}

TEST(CheckQmSampled, FindsPlantedViolation) {
  const auto phi =
      cmp::ComparisonSystem::make(std::vector<std::string>{"-u2", "0"}, 2, false, 0);
  const auto report = cmp::check_qm_sampled(phi, 5.0, 1000, 5);
  ASSERT_TRUE(report.counterexample_found);
  const auto& ce = *report.counterexample;
  EXPECT_EQ(ce.component, 0);
  EXPECT_GT(ce.phi_u, ce.phi_v);  // phi_0(u) > phi_0(v) despite u <= v
  EXPECT_LE(ce.u[1], ce.v[1]);
  EXPECT_EQ(ce.u[0], ce.v[0]);
}

TEST(CheckQmSampled, FrozenStateRequired) {
  const auto phi = cmp::ComparisonSystem::make(
      std::vector<std::string>{"(1 - 4*x1)*u1 + u2", "u1"}, 2, true, 2);
  EXPECT_THROW(cmp::check_qm_sampled(phi, 5.0, 100, 1), Error);
}

TEST(CheckQmSampled, AgreesWithMetzlerTestOnRandomAffineMaps) {
  auto gen = test_util::rng(2010);
  std::uniform_real_distribution<double> diag(-3.0, 3.0);
  std::uniform_real_distribution<double> offdiag(0.0, 2.0);
  int metzler_cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 4);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        m(i, j) = i == j ? diag(gen) : offdiag(gen);
    ASSERT_TRUE(cmp::check_qm_affine(m));
    const auto report = cmp::check_qm_sampled(affine_system(m, false), 5.0, 2000,
                                              1000 + static_cast<std::uint64_t>(trial));
    EXPECT_FALSE(report.counterexample_found);
    ++metzler_cases;
  }
  EXPECT_EQ(metzler_cases, 100);
}

TEST(CheckQmSampled, CatchesPlantedNegativeOffDiagonals) {
  auto gen = test_util::rng(2040);
  std::uniform_real_distribution<double> diag(-3.0, 3.0);
  std::uniform_real_distribution<double> offdiag(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 4);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        m(i, j) = i == j ? diag(gen) : offdiag(gen);
    const Eigen::Index bad_i = static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(n));
    Eigen::Index bad_j = static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(n));
    if (bad_j == bad_i) bad_j = (bad_j + 1) % n;
    m(bad_i, bad_j) = -0.1;
    ASSERT_FALSE(cmp::check_qm_affine(m));
    const auto report = cmp::check_qm_sampled(affine_system(m, false), 5.0, 10000,
                                              9000 + static_cast<std::uint64_t>(trial));
    EXPECT_TRUE(report.counterexample_found) << "trial " << trial;
  }
}

// ---- dominance verification -------------------------------------------------

dyn::Trajectory frozen_trajectory(const Eigen::Vector2d& dx0, const Eigen::Vector2d& u0,
                                  double tmax = 1.0) {
  // x' = 0, J = 0, phi = 0: all channels frozen at their initial values
  const auto sys = dyn::make_system({"0", "0"}, 2);
  const auto phi =
      dyn::CoupledMap::make(std::vector<std::string>{"0", "0"}, 2, false, 0);
  return dyn::integrate_coupled(sys, phi, Eigen::Vector2d(1.0, 1.0), dx0, u0,
                                {1e-2, 0.0, tmax});
}

TEST(VerifyDominance, PlanarPresetHolds) {
  auto ex = veccontract::presets::make_example2();
  ex.integrator.tmax = 2.0;
  const auto traj = dyn::integrate_coupled(ex.system, ex.comparison.map(), ex.x0,
                                           ex.dx0, ex.u0, ex.integrator);
  cmp::DominanceOptions options;
  options.region_conditions = ex.region_conditions;
  const auto report = cmp::verify_dominance(traj, ex.gain,
                                            cmp::Ordering::componentwise(), options);
  EXPECT_TRUE(report.holds);
  EXPECT_GT(report.margin, 0.0);
  EXPECT_FALSE(report.fragile);
  EXPECT_TRUE(report.region_holds_everywhere);
  // the cross-term bound is tight at dx1 = dx2, which is exactly dx0
  EXPECT_FALSE(report.premise_holds);
  ASSERT_TRUE(report.premise_first_violation.has_value());
  EXPECT_EQ(report.premise_first_violation->time, 0.0);
  EXPECT_EQ(report.premise_margin, 0.0);
}

TEST(VerifyDominance, FrozenChannelsHold) {
  const auto traj =
      frozen_trajectory(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1.0, 1.0));
  const auto gain = vn::make_norm(Eigen::MatrixXd::Identity(2, 2));
  const auto report =
      cmp::verify_dominance(traj, gain, cmp::Ordering::componentwise());
  EXPECT_TRUE(report.holds);
  EXPECT_DOUBLE_EQ(report.margin, 0.75);  // 1 - 0.25 at every grid point
  // premise compares 0 < 0, which is not strict
  EXPECT_FALSE(report.premise_holds);
}

TEST(VerifyDominance, InitialConditionMustBeStrict) {
  const auto traj =
      frozen_trajectory(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(1.0, 1.0));
  const auto gain = vn::make_norm(Eigen::MatrixXd::Identity(2, 2));
  try {
    cmp::verify_dominance(traj, gain, cmp::Ordering::componentwise());
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::initial_condition_not_dominated);
  }
}

TEST(VerifyDominance, MissingChannelsRejected) {
  const auto sys = dyn::make_system({"0", "0"}, 2);
  const auto traj = dyn::integrate(sys, Eigen::Vector2d(1.0, 1.0), {1e-2, 0.0, 1.0});
  const auto gain = vn::make_norm(Eigen::MatrixXd::Identity(2, 2));
  try {
    cmp::verify_dominance(traj, gain, cmp::Ordering::componentwise());
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_channel);
  }
}

TEST(VerifyDominance, SquareGainRequired) {
  const auto traj =
      frozen_trajectory(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1.0, 1.0));
  Eigen::MatrixXd wide(1, 2);
  wide << 1.0, 1.0;
  EXPECT_THROW(
      cmp::verify_dominance(traj, vn::make_norm(wide), cmp::Ordering::componentwise()),
      Error);
}

TEST(VerifyDominance, OrthantConeModeMatchesComponentwise) {
  const auto orthant_ordering = cmp::Ordering::with_cone(
      veccontract::cone::make_cone(Eigen::MatrixXd::Identity(2, 2)));

  auto ex2 = veccontract::presets::make_example2();
  ex2.integrator.tmax = 2.0;
  const auto traj2 = dyn::integrate_coupled(ex2.system, ex2.comparison.map(), ex2.x0,
                                            ex2.dx0, ex2.u0, ex2.integrator);
  EXPECT_EQ(
      cmp::verify_dominance(traj2, ex2.gain, cmp::Ordering::componentwise()).holds,
      cmp::verify_dominance(traj2, ex2.gain, orthant_ordering).holds);

  const auto ex1 = veccontract::presets::make_example1();
  auto cfg = ex1.integrator;
  cfg.tmax = 5.0;
  const auto traj1 = dyn::integrate_coupled(ex1.system, ex1.comparison.map(), ex1.x0,
                                            ex1.dx0, ex1.u0, cfg);
  EXPECT_EQ(
      cmp::verify_dominance(traj1, ex1.gain, cmp::Ordering::componentwise()).holds,
      cmp::verify_dominance(traj1, ex1.gain, orthant_ordering).holds);
}

TEST(VerifyDominance, NetworkPresetSatisfiesPremiseAndConclusion) {
  // premise holds strictly and the initial condition is strictly dominated,
  // so the conclusion must hold on the grid
  const auto ex = veccontract::presets::make_example1();
  const auto traj = dyn::integrate_coupled(ex.system, ex.comparison.map(), ex.x0,
                                           ex.dx0, ex.u0, ex.integrator);
  const auto report =
      cmp::verify_dominance(traj, ex.gain, cmp::Ordering::componentwise());
  EXPECT_TRUE(report.premise_holds);
  EXPECT_TRUE(report.holds);
}

TEST(VerifyDominance, MarginShrinksWithU0) {
  auto ex = veccontract::presets::make_example2();
  ex.integrator.tmax = 2.0;
  double last_margin = std::numeric_limits<double>::infinity();
  for (const double c : {5.0, 2.0, 1.1}) {
    const auto traj = dyn::integrate_coupled(ex.system, ex.comparison.map(), ex.x0,
                                             ex.dx0, Eigen::Vector2d(c, c),
                                             ex.integrator);
    const auto report =
        cmp::verify_dominance(traj, ex.gain, cmp::Ordering::componentwise());
    EXPECT_LE(report.margin, last_margin);
    last_margin = report.margin;
  }
}

TEST(VerifyDominance, RegionFlagsReportViolations) {
  // drive the plant out of x1 > 1/4 by starting below it
  auto ex = veccontract::presets::make_example2();
  ex.integrator.tmax = 0.5;
  const auto traj = dyn::integrate_coupled(ex.system, ex.comparison.map(),
                                           Eigen::Vector2d(0.1, 0.1), ex.dx0, ex.u0,
                                           ex.integrator);
  cmp::DominanceOptions options;
  options.region_conditions = ex.region_conditions;
  const auto report = cmp::verify_dominance(traj, ex.gain,
                                            cmp::Ordering::componentwise(), options);
  EXPECT_FALSE(report.region_holds_everywhere);
  ASSERT_TRUE(report.region_first_violation_time.has_value());
  EXPECT_DOUBLE_EQ(*report.region_first_violation_time, 0.0);
}

// ---- equilibrium distance and rate ------------------------------------------

TEST(EquilibriumDistance, ZeroAtTheEquilibriumItself) {
  const auto sys = dyn::make_system({"-x1"}, 1);
  const auto traj = dyn::integrate(sys, Eigen::VectorXd::Zero(1), {1e-2, 0.0, 1.0});
  const auto gain = vn::make_norm(Eigen::MatrixXd::Identity(1, 1));
  const auto analysis = cmp::equilibrium_distance_analysis(
      sys, Eigen::VectorXd::Zero(1), gain, traj);
  for (const auto& v : analysis.series.values) EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(analysis.initial[0], 0.0);
}

TEST(EquilibriumDistance, ScalarDecayOracle) {
  const auto sys = dyn::make_system({"-x1"}, 1);
  const auto traj = dyn::integrate(sys, Eigen::VectorXd::Ones(1), {1e-3, 0.0, 3.0});
  const auto gain = vn::make_norm(Eigen::MatrixXd::Identity(1, 1));
  const auto analysis = cmp::equilibrium_distance_analysis(
      sys, Eigen::VectorXd::Zero(1), gain, traj);
  EXPECT_EQ(analysis.initial[0], 1.0);
  for (std::size_t k = 0; k < analysis.series.times.size(); ++k)
    EXPECT_NEAR(analysis.series.values[k][0],
                std::exp(-2.0 * analysis.series.times[k]), 1e-6);
}

TEST(EquilibriumDistance, NetworkPresetConvergesToTheOrigin) {
  const auto ex = veccontract::presets::make_example1();
  const auto traj = dyn::integrate(ex.system, ex.x0, ex.integrator);
  const auto analysis = cmp::equilibrium_distance_analysis(
      ex.system, Eigen::VectorXd::Zero(2), ex.gain, traj);
  for (std::size_t k = 1; k < analysis.series.values.size(); ++k)
    for (Eigen::Index i = 0; i < 2; ++i)
      EXPECT_LE(analysis.series.values[k][i],
                analysis.series.values[k - 1][i] + 1e-12);
  EXPECT_LT(analysis.series.values.back().maxCoeff(), 1e-4);
}

TEST(EquilibriumDistance, RejectsNonEquilibrium) {
  const auto sys = dyn::make_system({"-x1 + 1"}, 1);
  const auto traj = dyn::integrate(sys, Eigen::VectorXd::Ones(1), {1e-2, 0.0, 1.0});
  const auto gain = vn::make_norm(Eigen::MatrixXd::Identity(1, 1));
  try {
    cmp::equilibrium_distance_analysis(sys, Eigen::VectorXd::Zero(1), gain, traj);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_an_equilibrium);
  }
}

TEST(EstimateRate, ExactExponentialEnvelope) {
  cmp::TimeSeries series;
  const Eigen::Vector2d c(2.0, 0.5);
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.05 * k;
    series.times.push_back(t);
    series.values.push_back(c * std::exp(-2.0 * t));
  }
  EXPECT_NEAR(cmp::estimate_rate(series, c), 1.0, 1e-9);
}

TEST(EstimateRate, ConstantSeriesHasZeroRate) {
  cmp::TimeSeries series;
  const Eigen::Vector2d c(1.0, 3.0);
  for (int k = 0; k <= 10; ++k) {
    series.times.push_back(0.1 * k);
    series.values.push_back(c);
  }
  EXPECT_EQ(cmp::estimate_rate(series, c), 0.0);
}

TEST(EstimateRate, GrowingSeriesFloorsAtZero) {
  cmp::TimeSeries series;
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
  for (int k = 0; k <= 10; ++k) {
    series.times.push_back(0.1 * k);
    series.values.push_back(Eigen::VectorXd::Ones(1) * std::exp(0.1 * k));
  }
  EXPECT_EQ(cmp::estimate_rate(series, c), 0.0);
}

TEST(EstimateRate, ZeroSamplesAreSkipped) {
  cmp::TimeSeries series;
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
  series.times = {0.0, 1.0, 2.0};
  series.values.push_back(Eigen::VectorXd::Ones(1));
  series.values.push_back(Eigen::VectorXd::Zero(1));
  series.values.push_back(Eigen::VectorXd::Ones(1) * std::exp(-4.0));
  EXPECT_NEAR(cmp::estimate_rate(series, c), 1.0, 1e-12);
}

TEST(EstimateRate, RejectsNonPositiveInputs) {
  cmp::TimeSeries series;
  series.times = {0.0, 1.0};
  series.values.push_back(Eigen::VectorXd::Ones(1));
  series.values.push_back(-Eigen::VectorXd::Ones(1));
  try {
    cmp::estimate_rate(series, Eigen::VectorXd::Ones(1));
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_positive_series);
  }
  EXPECT_THROW(cmp::estimate_rate(series, Eigen::VectorXd::Zero(1)), Error);
}

TEST(EstimateRate, NetworkPresetMatchesSlowEigenvalue) {
  const auto ex = veccontract::presets::make_example1();
  const auto traj = dyn::integrate_coupled(ex.system, ex.comparison.map(), ex.x0,
                                           ex.dx0, ex.u0, ex.integrator);
  const double rate = cmp::estimate_rate(
      cmp::TimeSeries{traj.times, traj.comparison}, ex.u0);
  const auto [lo, hi] = test_util::eig2_characteristic(
      Eigen::Matrix2d(ex.comparison_matrix));
  EXPECT_NEAR(hi, -2.0 + std::sqrt(2.0), 1e-12);
  const double expected = -hi / 2.0;  // envelope rate of sqrt(R)
  EXPECT_NEAR(rate, expected, 0.1 * expected);
}

}  // namespace
