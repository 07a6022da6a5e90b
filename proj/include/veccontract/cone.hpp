#pragma once

// Polyhedral cones K = {x : G x >= 0} in halfspace form: membership and
// boundary classification, the induced partial order, dual-cone witnesses,
// and a sampling falsifier for quasi-monotonicity relative to K.
//
// The dual-witness search is complete for n = 2 (rows of G plus the sign
// choices of the orthogonal complement filtered by exact K* membership) and
// restricted to rows of G in higher dimension.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "veccontract/errors.hpp"
#include "veccontract/expr.hpp"

namespace veccontract::cone {

enum class Region { interior, boundary, outside };

struct Classification {
  Region region = Region::outside;
  std::vector<int> active_rows;  // rows with vanishing slack (boundary only)
};

/// A vector in the adjoint cone K* pairing to zero with some boundary point.
/// source_row is the originating row of G, or -1 for a complement-derived
/// witness in dimension 2.
struct DualWitness {
  Eigen::VectorXd phi;
  int source_row = -1;
};

class PolyhedralCone {
 public:
  static PolyhedralCone make(const Eigen::MatrixXd& g, double tol = 1e-10) {
    if (g.rows() == 0 || g.cols() == 0)
      throw Error(ErrorCode::invalid_argument, "cone matrix must be non-empty");
    if (!(tol > 0.0))
      throw Error(ErrorCode::invalid_argument, "cone tolerance must be positive");
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      if (g.row(i).norm() == 0.0)
        throw Error(ErrorCode::zero_row, "row " + std::to_string(i) + " of G is zero");

    PolyhedralCone k;
    k.g_ = g;
    k.tol_ = tol;
    k.row_norms_.resize(g.rows());
    for (Eigen::Index i = 0; i < g.rows(); ++i) k.row_norms_[i] = g.row(i).norm();
    k.find_interior_point();

    // K cap (-K) = ker(G), so pointedness is exactly full column rank.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
    if (qr.rank() < g.cols())
      throw Error(ErrorCode::not_pointed,
                  "G is column-rank deficient: K contains a line");

    if (g.cols() == 2) k.compute_rays_2d();
    return k;
  }

  const Eigen::MatrixXd& matrix() const { return g_; }
  Eigen::Index dim() const { return g_.cols(); }
  Eigen::Index rows() const { return g_.rows(); }
  double tolerance() const { return tol_; }
  const Eigen::VectorXd& interior_point() const { return interior_point_; }

  /// Unit extreme rays of the cone boundary; exact for n = 2, empty otherwise.
  const std::vector<Eigen::VectorXd>& boundary_rays() const { return rays_; }

  /// Row-normalized slack vector (g_i . x / |g_i|).
  Eigen::VectorXd slacks(const Eigen::VectorXd& x) const {
    require_dim(x);
    Eigen::VectorXd s = g_ * x;
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] /= row_norms_[i];
    return s;
  }

  void require_dim(const Eigen::VectorXd& x) const {
    if (x.size() != g_.cols())
      throw Error(ErrorCode::dimension_mismatch,
                  "vector length " + std::to_string(x.size()) +
                      ", cone dimension " + std::to_string(g_.cols()));
  }

 private:
  // Sampling search for a strictly interior direction; rejects cones whose
  // best sampled min-slack never clears the threshold.
  void find_interior_point() {
    const Eigen::Index n = g_.cols();
    Eigen::VectorXd best;
    double best_slack = -1.0;
    auto consider = [&](Eigen::VectorXd x) {
      const double nrm = x.norm();
      if (nrm == 0.0) return;
      x /= nrm;
      const double s = slacks(x).minCoeff();
      if (s > best_slack) {
        best_slack = s;
        best = x;
      }
    };
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < g_.rows(); ++i)
      row_sum += g_.row(i).transpose() / row_norms_[i];
    consider(row_sum);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < 512 * static_cast<int>(n); ++k) {
      Eigen::VectorXd x(n);
      for (Eigen::Index j = 0; j < n; ++j) x[j] = gauss(rng);
      consider(std::move(x));
    }
    if (best_slack <= 1e-8)
      throw Error(ErrorCode::empty_interior,
                  "no strictly interior direction found (best slack " +
                      std::to_string(best_slack) + ")");
    interior_point_ = best;
  }

  // In 2D each facet normal g_i has a one-dimensional orthogonal line; the
  // sign that stays inside K is an extreme ray of the sector.
  void compute_rays_2d() {
    for (Eigen::Index i = 0; i < g_.rows(); ++i) {
      const Eigen::Vector2d gi = g_.row(i).transpose();
      for (const double sgn : {1.0, -1.0}) {
        Eigen::VectorXd v(2);
        v << -sgn * gi[1], sgn * gi[0];
        v /= v.norm();
        bool member = true;
        for (Eigen::Index j = 0; j < g_.rows(); ++j)
          member = member && (g_.row(j).dot(v) / row_norms_[j] >= -tol_);
        if (!member) continue;
        bool duplicate = false;
        for (const auto& r : rays_) duplicate = duplicate || (r.dot(v) > 1.0 - 1e-12);
        if (!duplicate) rays_.push_back(v);
      }
    }
  }

  Eigen::MatrixXd g_;
  double tol_ = 1e-10;
  Eigen::VectorXd row_norms_;
  Eigen::VectorXd interior_point_;
  std::vector<Eigen::VectorXd> rays_;
};

inline PolyhedralCone make_cone(const Eigen::MatrixXd& g, double tol = 1e-10) {
  return PolyhedralCone::make(g, tol);
}

/// Interior / boundary(active rows) / outside, with tolerance scaled by |x|
/// so the verdict is invariant under positive scaling. x = 0 is boundary
/// with every row active.
inline Classification classify(const PolyhedralCone& k, const Eigen::VectorXd& x) {
  k.require_dim(x);
  Classification c;
  const double nrm = x.norm();
  if (nrm == 0.0) {
    c.region = Region::boundary;
    for (Eigen::Index i = 0; i < k.rows(); ++i) c.active_rows.push_back(static_cast<int>(i));
    return c;
  }
  const double thresh = k.tolerance() * nrm;
  const Eigen::VectorXd s = k.slacks(x);
  bool all_nonneg = true;
  bool all_strict = true;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] < -thresh) all_nonneg = false;
    if (s[i] <= thresh) all_strict = false;
    if (std::abs(s[i]) <= thresh) c.active_rows.push_back(static_cast<int>(i));
  }
  if (!all_nonneg) {
    c.region = Region::outside;
    c.active_rows.clear();
  } else if (all_strict) {
    c.region = Region::interior;
  } else {
    c.region = Region::boundary;
  }
  return c;
}

/// x <=_K y iff y - x is in K.
inline bool leq_cone(const PolyhedralCone& k, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::dimension_mismatch, "leq_cone operands differ in length");
  return classify(k, y - x).region != Region::outside;
}

/// Membership of phi in the adjoint cone K*. Exact in dimension 2 (pairing
/// with the extreme rays); a sampling check elsewhere, so a `true` answer is
/// evidence rather than proof for n > 2.
inline bool in_dual(const PolyhedralCone& k, const Eigen::VectorXd& phi) {
  k.require_dim(phi);
  const double pnrm = phi.norm();
  if (pnrm == 0.0) return true;
  if (k.dim() == 2 && !k.boundary_rays().empty()) {
    for (const auto& r : k.boundary_rays())
      if (phi.dot(r) < -k.tolerance() * pnrm) return false;
    return true;
  }
  std::mt19937_64 rng(0x2545f4914f6cdd1dull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index n = k.dim();
  int accepted = 0;
  for (int tries = 0; tries < 20000 && accepted < 1000; ++tries) {
    Eigen::VectorXd z(n);
    for (Eigen::Index j = 0; j < n; ++j) z[j] = gauss(rng);
    z /= z.norm();
    if (k.slacks(z).minCoeff() < 0.0) continue;
    ++accepted;
    if (phi.dot(z) < -k.tolerance() * pnrm) return false;
  }
  if (phi.dot(k.interior_point()) < -k.tolerance() * pnrm) return false;
  return true;
}

/// Candidate witnesses phi in K*_0 with <phi, z> = 0 for a boundary point z:
/// the active rows of G, plus (n = 2 only) the orthogonal complement of z
/// filtered by exact K* membership.
inline std::vector<DualWitness> dual_witnesses(const PolyhedralCone& k,
                                               const Eigen::VectorXd& z) {
  k.require_dim(z);
  std::vector<DualWitness> out;
  const Classification c = classify(k, z);
  if (c.region == Region::outside) return out;
  for (int i : c.active_rows)
    out.push_back(DualWitness{k.matrix().row(i).transpose(), i});
  if (k.dim() == 2 && z.norm() > 0.0) {
    Eigen::VectorXd w(2);
    w << -z[1], z[0];
    for (const double sgn : {1.0, -1.0}) {
      Eigen::VectorXd cand = sgn * w;
      if (!in_dual(k, cand)) continue;
      bool duplicate = false;
      for (const auto& existing : out) {
        const double cosang = existing.phi.normalized().dot(cand.normalized());
        duplicate = duplicate || (cosang > 1.0 - 1e-9);
      }
      if (!duplicate) out.push_back(DualWitness{std::move(cand), -1});
    }
  }
  return out;
}

struct WitnessPairing {
  DualWitness witness;
  double pairing = 0.0;  // <phi, F(y) - F(x)>
};

struct PairCheck {
  bool boundary_pair = false;  // whether y - x lies on the cone boundary
  bool ok = true;              // some witness pairs nonnegatively (or vacuous)
  std::vector<WitnessPairing> pairings;
};

namespace detail {

inline Eigen::VectorXd eval_map(std::span<const expr::Ast> f,
                                const Eigen::VectorXd& u) {
  std::vector<double> slots(u.data(), u.data() + u.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = expr::eval(f[i], slots);
  return out;
}

}  // namespace detail

/// Quasi-monotonicity check for a single pair: y - x on the boundary must admit a
/// witness phi in K*_0 with <phi, y-x> = 0 and <phi, F(y) - F(x)> >= 0.
/// Pairs with y - x not on the boundary are vacuous and report ok.
inline PairCheck check_qm_pair(std::span<const expr::Ast> f, const PolyhedralCone& k,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (static_cast<Eigen::Index>(f.size()) != k.dim())
    throw Error(ErrorCode::dimension_mismatch, "map dimension differs from cone");
  PairCheck result;
  const Eigen::VectorXd z = y - x;
  const Classification c = classify(k, z);
  if (c.region != Region::boundary) return result;  // vacuous
  result.boundary_pair = true;
  const Eigen::VectorXd df = detail::eval_map(f, y) - detail::eval_map(f, x);
  const double scale = 1.0 + df.norm();
  bool found = false;
  for (auto& w : dual_witnesses(k, z)) {
    const double pairing = w.phi.dot(df);
    found = found || (pairing >= -k.tolerance() * scale * w.phi.norm());
    result.pairings.push_back(WitnessPairing{std::move(w), pairing});
  }
  result.ok = found;
  return result;
}

struct ConeCounterexample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  std::vector<int> active_rows;
  std::vector<WitnessPairing> pairings;
};

struct ConeQmReport {
  bool counterexample_found = false;
  std::optional<ConeCounterexample> counterexample;
  int samples_requested = 0;
  int samples_checked = 0;
  int samples_skipped = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Draw a unit direction on the boundary of K: an extreme ray in 2D, else a
// Gaussian projected onto a random facet and rejected until it lands in K.
inline std::optional<Eigen::VectorXd> sample_boundary_direction(
    const PolyhedralCone& k, std::mt19937_64& rng) {
  const auto& rays = k.boundary_rays();
  if (!rays.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, rays.size() - 1);
    return rays[pick(rng)];
  }
  const Eigen::Index n = k.dim();
  std::uniform_int_distribution<Eigen::Index> pick_row(0, k.rows() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Eigen::Index i = pick_row(rng);
    const Eigen::VectorXd gi = k.matrix().row(i).transpose();
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) w[j] = gauss(rng);
    w -= (gi.dot(w) / gi.squaredNorm()) * gi;
    const double nrm = w.norm();
    if (nrm < 1e-12) continue;
    w /= nrm;
    for (const double sgn : {1.0, -1.0}) {
      Eigen::VectorXd cand = sgn * w;
      if (k.slacks(cand).minCoeff() >= -k.tolerance()) return cand;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Sampling falsifier for quasi-monotonicity of F relative to K: draws pairs
/// (x, x + d) with d on the cone boundary and searches the dual witnesses of
/// the active face. Finding no counterexample is evidence, not proof.
inline ConeQmReport check_cone_qm(std::span<const expr::Ast> f, const PolyhedralCone& k,
                                  int samples, double box_bound, std::uint64_t seed) {
  if (samples < 1)
    throw Error(ErrorCode::invalid_argument, "sample count must be >= 1");
  if (!(box_bound > 0.0))
    throw Error(ErrorCode::invalid_argument, "box bound must be positive");
  ConeQmReport report;
  report.samples_requested = samples;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box_bound, box_bound);
  std::uniform_real_distribution<double> scale(0.1 * box_bound, box_bound);
  const Eigen::Index n = k.dim();
  for (int s = 0; s < samples; ++s) {
    auto d = detail::sample_boundary_direction(k, rng);
    if (!d) {
      ++report.samples_skipped;
      continue;
    }
    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = coord(rng);
    const Eigen::VectorXd y = x + scale(rng) * (*d);
    PairCheck check = check_qm_pair(f, k, x, y);
    if (!check.boundary_pair) {
      ++report.samples_skipped;
      continue;
    }
    ++report.samples_checked;
    if (!check.ok) {
      report.counterexample_found = true;
      ConeCounterexample ce;
      ce.x = std::move(x);
      ce.y = y;
      ce.active_rows = classify(k, y - ce.x).active_rows;
      ce.pairings = std::move(check.pairings);
      report.counterexample = std::move(ce);
      break;
    }
  }
  return report;
}

}  // namespace veccontract::cone
