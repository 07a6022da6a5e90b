#pragma once

// Built-in example systems: a coupled linear network with a shared input
// (ex1), a planar polynomial system with a state-dependent comparison map
// (ex2), and a planar affine map that is quasi-monotone relative to a
// sector cone but not componentwise (ex3).

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "veccontract/comparison.hpp"
#include "veccontract/cone.hpp"
#include "veccontract/dynamics.hpp"
#include "veccontract/errors.hpp"
#include "veccontract/expr.hpp"
#include "veccontract/vnorm.hpp"

namespace veccontract::presets {

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Render "M u + b" row `i` as an expression over u1..um.
inline std::string affine_row_source(const Eigen::MatrixXd& m,
                                     const Eigen::VectorXd& b, Eigen::Index i) {
  std::string out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m(i, j) == 0.0) continue;
    if (!out.empty()) out += " + ";
    out += fmt(m(i, j)) + "*u" + std::to_string(j + 1);
  }
  if (b[i] != 0.0 || out.empty()) {
    if (!out.empty()) out += " + ";
    out += fmt(b[i]);
  }
  return out;
}

inline std::vector<std::string> affine_sources(const Eigen::MatrixXd& m,
                                               const Eigen::VectorXd& b) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    out.push_back(affine_row_source(m, b, i));
  return out;
}

/// Dominant (rightmost-eigenvalue) eigenvector of a Metzler matrix by power
/// iteration on M + cI; nonnegative by Perron-Frobenius, max-normalized.
inline std::optional<Eigen::VectorXd> metzler_dominant_vector(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) shift = std::max(shift, std::abs(m(i, i)));
  const Eigen::MatrixXd b = m + (shift + 1.0) * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int iter = 0; iter < 400; ++iter) {
    v = b * v;
    const double norm = v.lpNorm<Eigen::Infinity>();
    if (!(norm > 0.0) || !v.allFinite()) return std::nullopt;
    v /= norm;
  }
  if (v.minCoeff() < 1e-9) return std::nullopt;  // reducible coupling
  return v;
}

}  // namespace detail

struct Example1Params {
  int n = 1;
  std::vector<double> rho = {1.0};
  std::vector<double> a = {1.0};
  double p = 1.0;
};

/// x_i' = -rho_i x_i + sigma (i = 1..n), sigma' = sum a_i x_i - (p+1) sigma,
/// with sigma stored as state coordinate n+1. The comparison system follows
/// from splitting the cross terms with the bound
/// 2 y s <= rho y^2 + s^2 / rho applied per coordinate.
struct Example1 {
  dynamics::DynamicalSystem system;          // dimension n + 1
  vnorm::NonnegativeGainMatrix gain;         // identity
  comparison::ComparisonSystem comparison;   // affine: w' = M w
  Eigen::MatrixXd comparison_matrix;         // M
  Eigen::VectorXd x0;
  Eigen::VectorXd dx0;
  Eigen::VectorXd u0;
  dynamics::IntegratorConfig integrator{1e-3, 0.0, 20.0};
  double condition_lhs = 0.0;   // 2 (p + 1)
  double condition_rhs = 0.0;   // sum |a_i| / rho_i
  bool condition_holds = false;
};

inline Example1 make_example1(const Example1Params& params = {}) {
  const int n = params.n;
  if (n < 1)
    throw Error(ErrorCode::invalid_argument, "example 1 needs n >= 1");
  if (static_cast<int>(params.rho.size()) != n ||
      static_cast<int>(params.a.size()) != n)
    throw Error(ErrorCode::dimension_mismatch,
                "example 1 needs n entries in rho and a");
  for (double r : params.rho)
    if (!(r > 0.0))
      throw Error(ErrorCode::invalid_argument, "example 1 needs rho_i > 0");

  const int dim = n + 1;
  const std::string sigma = "x" + std::to_string(dim);
  std::vector<std::string> rhs;
  rhs.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= n; ++i)
    rhs.push_back(detail::fmt(-params.rho[static_cast<std::size_t>(i - 1)]) +
                  "*x" + std::to_string(i) + " + " + sigma);
  std::string last;
  for (int i = 1; i <= n; ++i) {
    if (!last.empty()) last += " + ";
    last += detail::fmt(params.a[static_cast<std::size_t>(i - 1)]) + "*x" +
            std::to_string(i);
  }
  last += " - " + detail::fmt(params.p + 1.0) + "*" + sigma;
  rhs.push_back(last);

  double sum_abs_a_over_rho = 0.0;
  for (int i = 0; i < n; ++i)
    sum_abs_a_over_rho +=
        std::abs(params.a[static_cast<std::size_t>(i)]) / params.rho[static_cast<std::size_t>(i)];

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    m(i, i) = -params.rho[static_cast<std::size_t>(i)];
    m(i, n) = 1.0 / params.rho[static_cast<std::size_t>(i)];
    m(n, i) = std::abs(params.a[static_cast<std::size_t>(i)]) *
              params.rho[static_cast<std::size_t>(i)];
  }
  m(n, n) = -(2.0 * (params.p + 1.0) - sum_abs_a_over_rho);

  Example1 ex{
      dynamics::make_system(rhs, dim, dynamics::JacobianMode::symbolic, "example1"),
      vnorm::make_norm(Eigen::MatrixXd::Identity(dim, dim)),
      comparison::ComparisonSystem::make(
          detail::affine_sources(m, Eigen::VectorXd::Zero(dim)), dim,
          /*depends_on_state=*/false, /*state_dim=*/0,
          comparison::AffinePart{m, Eigen::VectorXd::Zero(dim)}, "example1"),
      m,
      Eigen::VectorXd::Ones(dim),
      Eigen::VectorXd(dim),
      Eigen::VectorXd(dim)};

  // Stagger dx0 away from the line dx_i = dsigma / rho_i where the
  // cross-term bound is tight and the premise would only hold non-strictly.
  for (int i = 0; i < n; ++i)
    ex.dx0[i] = 0.5 + 0.05 * static_cast<double>(i);
  ex.dx0[n] = 0.3;

  // Start the comparison state along the dominant eigenvector so R(t) decays
  // at the asymptotic rate from t0 on, scaled to strictly dominate D(0).
  const Eigen::VectorXd d0 = ex.dx0.cwiseProduct(ex.dx0);
  if (auto v = detail::metzler_dominant_vector(m)) {
    double scale = 0.0;
    for (int i = 0; i < dim; ++i) scale = std::max(scale, d0[i] / (*v)[i]);
    ex.u0 = (scale > 0.0 ? 2.0 * scale : 1.0) * (*v);
  } else {
    ex.u0 = 2.0 * d0 + Eigen::VectorXd::Ones(dim);
  }

  ex.condition_lhs = 2.0 * (params.p + 1.0);
  ex.condition_rhs = sum_abs_a_over_rho;
  ex.condition_holds = ex.condition_lhs > ex.condition_rhs;
  return ex;
}

/// x1' = -x1^2 + x2, x2' = x1 - 2 x2^2 with the state-dependent comparison
/// map w1' = (1 - 4 x1) w1 + w2, w2' = (1 - 8 x2) w2 + w1, which is
/// convergent on the region x1 > 1/4, x2 > 1/8.
struct Example2 {
  dynamics::DynamicalSystem system;
  vnorm::NonnegativeGainMatrix gain;
  comparison::ComparisonSystem comparison;
  Eigen::VectorXd x0;
  Eigen::VectorXd dx0;
  Eigen::VectorXd u0;
  dynamics::IntegratorConfig integrator{1e-3, 0.0, 5.0};
  std::vector<expr::Ast> region_conditions;  // over (t, x1, x2), positivity
};

inline Example2 make_example2() {
  const auto vars = dynamics::state_variables(2);
  std::vector<expr::Ast> region;
  region.push_back(expr::parse("x1 - 0.25", vars));
  region.push_back(expr::parse("x2 - 0.125", vars));
  return Example2{
      dynamics::make_system({"-x1^2 + x2", "x1 - 2*x2^2"}, 2,
                            dynamics::JacobianMode::symbolic, "example2"),
      vnorm::make_norm(Eigen::MatrixXd::Identity(2, 2)),
      comparison::ComparisonSystem::make(
          std::vector<std::string>{"(1 - 4*x1)*u1 + u2", "(1 - 8*x2)*u2 + u1"}, 2,
          /*depends_on_state=*/true, /*state_dim=*/2, std::nullopt, "example2"),
      Eigen::Vector2d(1.0, 1.0),
      Eigen::Vector2d(1.0, 1.0),
      Eigen::Vector2d(5.0, 5.0),
      dynamics::IntegratorConfig{1e-3, 0.0, 5.0},
      std::move(region)};
}

/// F(w) = (w1/2 - 2 w2, w1 - 4 w2): not quasi-monotone componentwise (the
/// -2 off-diagonal), checked instead against the sector cone
/// K = {w : w2 <= w1 <= 3 w2}. face2_positive_pairing_phi = (1,-3) is the
/// sign choice of the face w1 = 3 w2 normal that pairs to 5/2 w2 with F on
/// that face; it is not a member of K* (the K* member there is (-1,3)).
struct Example3 {
  Eigen::MatrixXd m;
  std::vector<expr::Ast> f;  // over (u1, u2)
  cone::PolyhedralCone k;
  Eigen::Vector2d face2_positive_pairing_phi;
};

inline Example3 make_example3() {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, -2.0, 1.0, -4.0;
  Eigen::MatrixXd g(2, 2);
  g << 1.0, -1.0, -1.0, 3.0;
  std::vector<std::string> uvars{"u1", "u2"};
  std::vector<expr::Ast> f;
  f.push_back(expr::parse("0.5*u1 - 2*u2", uvars));
  f.push_back(expr::parse("u1 - 4*u2", uvars));
  return Example3{m, std::move(f), cone::make_cone(g), Eigen::Vector2d(1.0, -3.0)};
}

}  // namespace veccontract::presets
