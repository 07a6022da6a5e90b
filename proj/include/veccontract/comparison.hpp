#pragma once

// Comparison-system machinery: componentwise quasi-monotonicity checks
// (exact Metzler test for affine maps, sampling falsifier otherwise),
// dominance verification of A dvec(diag(dpsi)^2) against the comparison
// solution R(t) along a coupled trajectory, squared vector distance from an
// equilibrium, and exponential-envelope rate estimation.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "veccontract/cone.hpp"
#include "veccontract/dynamics.hpp"
#include "veccontract/errors.hpp"
#include "veccontract/expr.hpp"
#include "veccontract/vnorm.hpp"

namespace veccontract::comparison {

/// Constant affine form phi(u) = M u + b; only valid for maps that are
/// affine in u with coefficients independent of t and x.
struct AffinePart {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
};

/// Comparison map u' = phi(t,u) or u' = phi(t,u,x), optionally with a
/// validated affine part.
class ComparisonSystem {
 public:
  static ComparisonSystem make(std::span<const std::string> phi_sources, int m,
                               bool depends_on_state, int state_dim,
                               std::optional<AffinePart> affine = {},
                               std::string label = {}) {
    ComparisonSystem sys;
    sys.map_ = dynamics::CoupledMap::make(phi_sources, m, depends_on_state, state_dim);
    sys.label_ = std::move(label);
    if (affine) {
      validate_affine(sys.map_, *affine);
      sys.affine_ = std::move(affine);
    }
    return sys;
  }

  const dynamics::CoupledMap& map() const { return map_; }
  int dim() const { return map_.dim(); }
  bool depends_on_state() const { return map_.depends_on_state(); }
  const std::optional<AffinePart>& affine() const { return affine_; }
  const std::string& label() const { return label_; }

 private:
  static void validate_affine(const dynamics::CoupledMap& map, const AffinePart& affine) {
    const int m = map.dim();
    if (affine.m.rows() != m || affine.m.cols() != m || affine.b.size() != m)
      throw Error(ErrorCode::dimension_mismatch, "affine part has wrong shape");
    std::mt19937_64 rng(0x853c49e6748fea9bull);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> time(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd u(m);
      for (int i = 0; i < m; ++i) u[i] = coord(rng);
      Eigen::VectorXd x(map.state_dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = coord(rng);
      const Eigen::VectorXd direct = map.depends_on_state()
                                         ? map.eval(time(rng), u, x)
                                         : map.eval(time(rng), u);
      const Eigen::VectorXd via_affine = affine.m * u + affine.b;
      if ((direct - via_affine).lpNorm<Eigen::Infinity>() > 1e-10)
        throw Error(ErrorCode::invalid_argument,
                    "affine part does not reproduce the comparison map");
    }
  }

  dynamics::CoupledMap map_;
  std::optional<AffinePart> affine_;
  std::string label_;
};

/// Metzler test: an affine map is quasi-monotone non-decreasing iff every
/// off-diagonal entry is nonnegative. Exact, no sampling.
inline bool check_qm_affine(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::dimension_mismatch, "Metzler test needs a square matrix");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) < 0.0) return false;
  return true;
}

struct QmCounterexample {
  int component = 0;
  double t = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double phi_u = 0.0;
  double phi_v = 0.0;
};

struct QmSampleReport {
  bool counterexample_found = false;
  std::optional<QmCounterexample> counterexample;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Sampling falsifier for componentwise quasi-monotonicity: draws triples
/// (i, u, v) with u <= v componentwise and u_i = v_i and requires
/// phi_i(t,u) <= phi_i(t,v) + tol. Alternates single-coordinate and dense
/// increments. State-dependent maps are checked at a frozen plant state.
inline QmSampleReport check_qm_sampled(const ComparisonSystem& phi, double box_bound,
                                       int samples, std::uint64_t seed,
                                       std::optional<Eigen::VectorXd> frozen_x = {},
                                       double tol = 1e-10) {
  if (samples < 1)
    throw Error(ErrorCode::invalid_argument, "sample count must be >= 1");
  if (!(box_bound > 0.0))
    throw Error(ErrorCode::invalid_argument, "box bound must be positive");
  const auto& map = phi.map();
  if (map.depends_on_state() && !frozen_x)
    throw Error(ErrorCode::invalid_argument,
                "state-dependent comparison map needs a frozen state");
  if (map.depends_on_state() && frozen_x->size() != map.state_dim())
    throw Error(ErrorCode::dimension_mismatch, "frozen state length mismatch");

  QmSampleReport report;
  report.samples = samples;
  report.seed = seed;
  const int n = map.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box_bound, box_bound);
  std::uniform_real_distribution<double> bump(0.0, box_bound);
  std::uniform_real_distribution<double> sparse_bump(0.1 * box_bound, box_bound);
  std::uniform_real_distribution<double> time(0.0, box_bound);
  std::uniform_int_distribution<int> pick_i(0, n - 1);
  std::bernoulli_distribution sparse(0.5);

  auto eval_component = [&](int i, double t, const Eigen::VectorXd& u) {
    const Eigen::VectorXd value =
        map.depends_on_state() ? map.eval(t, u, *frozen_x) : map.eval(t, u);
    return value[i];
  };

  for (int s = 0; s < samples; ++s) {
    const int i = pick_i(rng);
    Eigen::VectorXd u(n);
    for (int j = 0; j < n; ++j) u[j] = coord(rng);
    Eigen::VectorXd v = u;
    if (n > 1) {
      if (sparse(rng)) {
        int j = pick_i(rng);
        while (j == i) j = pick_i(rng);
        v[j] += sparse_bump(rng);
      } else {
        for (int j = 0; j < n; ++j)
          if (j != i) v[j] += bump(rng);
      }
    }
    const double t = time(rng);
    const double fu = eval_component(i, t, u);
    const double fv = eval_component(i, t, v);
    if (fu > fv + tol) {
      report.counterexample_found = true;
      report.counterexample = QmCounterexample{i, t, std::move(u), std::move(v), fu, fv};
      break;
    }
  }
  return report;
}

enum class OrderingMode { componentwise, cone };

/// Ordering used by dominance verification: the componentwise partial order
/// or the order induced by a polyhedral cone on the comparison space.
struct Ordering {
  OrderingMode mode = OrderingMode::componentwise;
  std::optional<cone::PolyhedralCone> k;

  static Ordering componentwise() { return Ordering{}; }
  static Ordering with_cone(cone::PolyhedralCone cone_order) {
    return Ordering{OrderingMode::cone, std::move(cone_order)};
  }
};

struct Violation {
  double time = 0.0;
  int component = -1;  // offending component (componentwise) or cone row
};

struct DominanceOptions {
  double fragile_threshold = 1e-9;
  // positivity conditions over (t, x1..xn) flagged per grid point, e.g. the
  // region where a state-dependent comparison system is convergent
  std::vector<expr::Ast> region_conditions;
};

/// Per-grid-point record of D(t) = A dvec(diag(dpsi)^2) against R(t), the
/// comparison-channel solution, plus the separately-reported premise verdict
/// for the differential inequality. All verdicts are on-grid statements.
struct DominanceReport {
  OrderingMode mode = OrderingMode::componentwise;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> distance;  // D(t)
  std::vector<Eigen::VectorXd> bound;     // R(t)

  bool holds = false;
  double margin = 0.0;  // min over grid of componentwise R-D (or cone slack)
  bool fragile = false;
  std::optional<Violation> first_violation;

  bool premise_holds = false;
  double premise_margin = 0.0;
  std::optional<Violation> premise_first_violation;

  std::vector<std::uint8_t> region_ok;  // empty when no conditions given
  bool region_holds_everywhere = true;
  std::optional<double> region_first_violation_time;

  bool definite = false;  // A definite: R->0 forces ||dpsi|| -> 0
};

namespace detail {

struct PointVerdict {
  bool strict = false;   // strictly dominated (interior in cone mode)
  double margin = 0.0;   // min componentwise gap or min normalized cone slack
  int component = -1;
};

inline PointVerdict point_verdict(const Eigen::VectorXd& gap, const Ordering& ordering) {
  PointVerdict out;
  if (ordering.mode == OrderingMode::componentwise) {
    Eigen::Index arg = 0;
    out.margin = gap.minCoeff(&arg);
    out.component = static_cast<int>(arg);
    out.strict = out.margin > 0.0;
  } else {
    const auto& k = *ordering.k;
    const Eigen::VectorXd s = k.slacks(gap);
    Eigen::Index arg = 0;
    out.margin = s.minCoeff(&arg);
    out.component = static_cast<int>(arg);
    out.strict = cone::classify(k, gap).region == cone::Region::interior;
  }
  return out;
}

}  // namespace detail

/// Verify the comparison-principle conclusion D(t) < R(t) (componentwise or
/// in the cone order) on the trajectory grid, and evaluate the premise
/// 2 A dvec(diag(dpsi) diag(h)) < phi(t, D(t)[, x]) alongside it. The
/// trajectory must come from a coupled integration.
inline DominanceReport verify_dominance(const dynamics::Trajectory& traj,
                                        const vnorm::NonnegativeGainMatrix& a,
                                        const Ordering& ordering,
                                        const DominanceOptions& options = {}) {
  if (!traj.has_variational() || !traj.has_comparison())
    throw Error(ErrorCode::missing_channel,
                "dominance verification needs variational and comparison channels");
  if (!traj.system || !traj.comparison_map)
    throw Error(ErrorCode::missing_channel,
                "trajectory does not carry its system and comparison map");
  const auto& sys = *traj.system;
  const auto& phi = *traj.comparison_map;
  const Eigen::Index n = sys.dim();
  if (a.state_dim() != n || a.output_dim() != a.state_dim())
    throw Error(ErrorCode::dimension_mismatch,
                "dominance verification needs a square gain matrix A (n x n)");
  if (phi.dim() != a.output_dim())
    throw Error(ErrorCode::dimension_mismatch,
                "comparison dimension differs from the norm output dimension");
  if (ordering.mode == OrderingMode::cone) {
    if (!ordering.k)
      throw Error(ErrorCode::invalid_argument, "cone ordering needs a cone");
    if (ordering.k->dim() != a.output_dim())
      throw Error(ErrorCode::dimension_mismatch, "cone dimension mismatch");
  }

  DominanceReport report;
  report.mode = ordering.mode;
  report.definite = a.definite();
  report.times = traj.times;
  const std::size_t steps = traj.times.size();
  report.distance.reserve(steps);
  report.bound.reserve(steps);

  for (std::size_t k = 0; k < steps; ++k) {
    report.distance.push_back(vnorm::norm_squared(a, traj.variational[k]));
    report.bound.push_back(traj.comparison[k]);
  }

  {
    const auto initial =
        detail::point_verdict(report.bound[0] - report.distance[0], ordering);
    if (!initial.strict)
      throw Error(ErrorCode::initial_condition_not_dominated,
                  "A dvec(diag(dx0)^2) must be strictly dominated by u0");
  }

  report.holds = true;
  report.premise_holds = true;
  report.margin = std::numeric_limits<double>::infinity();
  report.premise_margin = std::numeric_limits<double>::infinity();

  std::vector<double> region_slots;
  const bool has_region = !options.region_conditions.empty();
  if (has_region) {
    report.region_ok.resize(steps, 1);
    region_slots.resize(static_cast<std::size_t>(n) + 1);
  }

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = traj.times[k];
    const auto conclusion =
        detail::point_verdict(report.bound[k] - report.distance[k], ordering);
    if (conclusion.margin < report.margin) report.margin = conclusion.margin;
    if (!conclusion.strict && report.holds) {
      report.holds = false;
      report.first_violation = Violation{t, conclusion.component};
    }

    const Eigen::VectorXd h =
        dynamics::variational_rhs(sys, t, traj.states[k], traj.variational[k]);
    const Eigen::VectorXd lhs = vnorm::norm_squared_rate(a, traj.variational[k], h);
    const Eigen::VectorXd rhs =
        phi.depends_on_state()
            ? phi.eval(t, report.distance[k], traj.states[k])
            : phi.eval(t, report.distance[k]);
    const auto premise = detail::point_verdict(rhs - lhs, ordering);
    if (premise.margin < report.premise_margin) report.premise_margin = premise.margin;
    if (!premise.strict && report.premise_holds) {
      report.premise_holds = false;
      report.premise_first_violation = Violation{t, premise.component};
    }

    if (has_region) {
      region_slots[0] = t;
      for (Eigen::Index i = 0; i < n; ++i)
        region_slots[static_cast<std::size_t>(i) + 1] = traj.states[k][i];
      bool ok = true;
      for (const auto& cond : options.region_conditions)
        ok = ok && (expr::eval(cond, region_slots) > 0.0);
      report.region_ok[k] = ok ? 1 : 0;
      if (!ok && report.region_holds_everywhere) {
        report.region_holds_everywhere = false;
        report.region_first_violation_time = t;
      }
    }
  }

  report.fragile = report.holds && report.margin <= options.fragile_threshold;
  return report;
}

/// Uniformly sampled vector time series.
struct TimeSeries {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
};

struct EquilibriumAnalysis {
  TimeSeries series;        // A dvec(diag(x(t) - x_bar)^2) per grid point
  Eigen::VectorXd initial;  // the series at t0 (the constant C)
};

/// Squared vector distance of a solution from an equilibrium x_bar along an
/// integrated trajectory. x_bar is accepted as an equilibrium when f
/// vanishes at t0 and t0 + 1 (up to 1e-8).
inline EquilibriumAnalysis equilibrium_distance_analysis(
    const dynamics::DynamicalSystem& sys, const Eigen::VectorXd& x_bar,
    const vnorm::NonnegativeGainMatrix& a, const dynamics::Trajectory& traj) {
  if (x_bar.size() != sys.dim())
    throw Error(ErrorCode::dimension_mismatch, "x_bar length mismatch");
  if (a.state_dim() != sys.dim())
    throw Error(ErrorCode::dimension_mismatch, "gain matrix does not match the state");
  if (traj.times.empty())
    throw Error(ErrorCode::invalid_argument, "empty trajectory");
  const double t0 = traj.times.front();
  for (const double t : {t0, t0 + 1.0}) {
    const double residual = sys.rhs_at(t, x_bar).norm();
    if (residual > 1e-8)
      throw Error(ErrorCode::not_an_equilibrium,
                  "f(t, x_bar) has norm " + std::to_string(residual) + " at t = " +
                      std::to_string(t));
  }
  EquilibriumAnalysis out;
  out.series.times = traj.times;
  out.series.values.reserve(traj.states.size());
  for (const auto& x : traj.states)
    out.series.values.push_back(vnorm::norm_squared(a, x - x_bar));
  out.initial = out.series.values.front();
  return out;
}

/// Largest lambda >= 0 with sqrt(series_i(t)) <= sqrt(C_i) exp(-lambda (t-t0))
/// componentwise on the grid. Zero-valued samples satisfy any envelope and
/// are skipped; negative samples are rejected.
inline double estimate_rate(const TimeSeries& series, const Eigen::VectorXd& c) {
  if (series.times.size() != series.values.size() || series.times.empty())
    throw Error(ErrorCode::invalid_argument, "malformed time series");
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (!(c[i] > 0.0))
      throw Error(ErrorCode::non_positive_series,
                  "C[" + std::to_string(i) + "] must be positive");
  const double t0 = series.times.front();
  double rate = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    const double dt = series.times[k] - t0;
    if (dt <= 0.0) continue;
    const Eigen::VectorXd& v = series.values[k];
    if (v.size() != c.size())
      throw Error(ErrorCode::dimension_mismatch, "series value length mismatch");
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] < 0.0)
        throw Error(ErrorCode::non_positive_series,
                    "series component " + std::to_string(i) + " is negative");
      if (v[i] == 0.0) continue;
      const double lambda = -0.5 * std::log(v[i] / c[i]) / dt;
      if (lambda < rate) rate = lambda;
    }
  }
  if (!std::isfinite(rate)) return 0.0;  // single-sample or all-zero series
  return rate < 0.0 ? 0.0 : rate;
}

}  // namespace veccontract::comparison
