#pragma once

// Vector-valued norms ||dx||_v = sqrt(A dvec(diag(dx)^2)) built from a
// nonnegative gain matrix A, together with the squared norm, its time
// derivative along a path, and its Frechet derivative as a linear map.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "veccontract/errors.hpp"

namespace veccontract::vnorm {

/// Gain matrix A (m x n, entries >= 0, not all zero). `definite` records
/// whether every column carries a strictly positive entry; the norm axioms
/// (point-separation in particular) are guaranteed only when it is set.
class NonnegativeGainMatrix {
 public:
  static NonnegativeGainMatrix make(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0)
      throw Error(ErrorCode::invalid_argument, "gain matrix must be non-empty");
    bool any_positive = false;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double v = a(i, j);
        if (!std::isfinite(v))
          throw Error(ErrorCode::invalid_argument,
                      "gain matrix entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ") is not finite");
        if (v < 0.0)
          throw Error(ErrorCode::negative_entry,
                      "negative gain entry at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
        if (v > 0.0) any_positive = true;
      }
    }
    if (!any_positive)
      throw Error(ErrorCode::zero_matrix, "gain matrix must be nonzero");
    bool definite = true;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      definite = definite && (a.col(j).maxCoeff() > 0.0);
    return NonnegativeGainMatrix(a, definite);
  }

  const Eigen::MatrixXd& matrix() const { return a_; }
  Eigen::Index output_dim() const { return a_.rows(); }
  Eigen::Index state_dim() const { return a_.cols(); }
  bool definite() const { return definite_; }

 private:
  NonnegativeGainMatrix(Eigen::MatrixXd a, bool definite)
      : a_(std::move(a)), definite_(definite) {}

  Eigen::MatrixXd a_;
  bool definite_;
};

/// Componentwise value of ||dx||_v; entries are nonnegative and finite.
struct VectorNormValue {
  Eigen::VectorXd components;
};

inline NonnegativeGainMatrix make_norm(const Eigen::MatrixXd& a) {
  return NonnegativeGainMatrix::make(a);
}

namespace detail {

inline void require_dim(const NonnegativeGainMatrix& n, const Eigen::VectorXd& dx,
                        const char* what) {
  if (dx.size() != n.state_dim())
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": expected length " +
                    std::to_string(n.state_dim()) + ", got " +
                    std::to_string(dx.size()));
}

// Rounding can push a mathematically nonnegative radicand a hair below zero;
// anything beyond -1e-14 is a real bug, not noise.
inline double safe_sqrt(double v) {
  if (v < 0.0) {
    if (v < -1e-14)
      throw Error(ErrorCode::domain_error,
                  "squared-norm component is negative: " + std::to_string(v));
    v = 0.0;
  }
  return std::sqrt(v);
}

// Shared bilinear kernel: 2 A (x .* y). norm_squared_rate and frechet_apply
// are the same form evaluated at different arguments.
inline Eigen::VectorXd scaled_bilinear(const NonnegativeGainMatrix& n,
                                       const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y) {
  return 2.0 * (n.matrix() * x.cwiseProduct(y).matrix());
}

}  // namespace detail

/// Squared norm ||dx||_v^2 = A dvec(diag(dx)^2), one entry per row of A.
inline Eigen::VectorXd norm_squared(const NonnegativeGainMatrix& n,
                                    const Eigen::VectorXd& dx) {
  detail::require_dim(n, dx, "norm_squared");
  return n.matrix() * dx.cwiseProduct(dx).matrix();
}

/// ||dx||_v, i.e. D_i(dx) = sqrt(sum_j a_ij dx_j^2).
inline VectorNormValue norm(const NonnegativeGainMatrix& n, const Eigen::VectorXd& dx) {
  detail::require_dim(n, dx, "norm");
  Eigen::VectorXd sq = norm_squared(n, dx);
  for (Eigen::Index i = 0; i < sq.size(); ++i) sq[i] = detail::safe_sqrt(sq[i]);
  return VectorNormValue{std::move(sq)};
}

/// d/dt of norm_squared along a path with velocity dxdot:
/// 2 A dvec(diag(dx) diag(dxdot)).
inline Eigen::VectorXd norm_squared_rate(const NonnegativeGainMatrix& n,
                                         const Eigen::VectorXd& dx,
                                         const Eigen::VectorXd& dxdot) {
  detail::require_dim(n, dx, "norm_squared_rate");
  detail::require_dim(n, dxdot, "norm_squared_rate");
  return detail::scaled_bilinear(n, dx, dxdot);
}

/// Frechet derivative of F(dx) = ||dx||_v^2 applied to direction h, read as
/// the linear map h -> 2 A diag(dx) h.
inline Eigen::VectorXd frechet_apply(const NonnegativeGainMatrix& n,
                                     const Eigen::VectorXd& dx,
                                     const Eigen::VectorXd& h) {
  detail::require_dim(n, dx, "frechet_apply");
  detail::require_dim(n, h, "frechet_apply");
  return detail::scaled_bilinear(n, dx, h);
}

}  // namespace veccontract::vnorm
