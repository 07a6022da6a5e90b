#pragma once

// The original system x' = f(t,x), its variational system dx' = J(t,x) dx,
// and fixed-step RK4 integration of both, optionally coupled with a
// comparison system u' = phi(t,u[,x]) on one shared grid.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "veccontract/errors.hpp"
#include "veccontract/expr.hpp"

namespace veccontract::dynamics {

enum class JacobianMode { symbolic, finite_difference };

/// State variable names t, x1..xn used by every system right-hand side.
inline std::vector<std::string> state_variables(int n) {
  std::vector<std::string> vars;
  vars.reserve(static_cast<std::size_t>(n) + 1);
  vars.emplace_back("t");
  for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  return vars;
}

class DynamicalSystem {
 public:
  static DynamicalSystem make(std::span<const std::string> rhs_sources, int n,
                              JacobianMode mode = JacobianMode::symbolic,
                              std::string label = {}) {
    if (n < 1)
      throw Error(ErrorCode::invalid_argument, "state dimension must be >= 1");
    if (static_cast<int>(rhs_sources.size()) != n)
      throw Error(ErrorCode::dimension_mismatch,
                  "expected " + std::to_string(n) + " right-hand sides, got " +
                      std::to_string(rhs_sources.size()));
    DynamicalSystem sys;
    sys.n_ = n;
    sys.mode_ = mode;
    sys.label_ = std::move(label);
    sys.variables_ = state_variables(n);
    sys.rhs_.reserve(rhs_sources.size());
    for (const auto& src : rhs_sources)
      sys.rhs_.push_back(expr::parse(src, sys.variables_));
    if (mode == JacobianMode::symbolic) {
      std::span<const std::string> xs(sys.variables_.data() + 1,
                                      static_cast<std::size_t>(n));
      sys.jacobian_ = expr::jacobian(sys.rhs_, xs);
    }
    return sys;
  }

  int dim() const { return n_; }
  JacobianMode jacobian_mode() const { return mode_; }
  const std::string& label() const { return label_; }
  const std::vector<expr::Ast>& rhs() const { return rhs_; }
  const std::vector<std::vector<expr::Ast>>& symbolic_jacobian() const {
    return jacobian_;
  }

  Eigen::VectorXd rhs_at(double t, const Eigen::VectorXd& x) const {
    require_state(x);
    std::vector<double> slots(static_cast<std::size_t>(n_) + 1);
    fill_slots(t, x, slots);
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i) out[i] = expr::eval(rhs_[i], slots);
    return out;
  }

  Eigen::MatrixXd jacobian_at(double t, const Eigen::VectorXd& x) const {
    require_state(x);
    Eigen::MatrixXd j(n_, n_);
    if (mode_ == JacobianMode::symbolic) {
      std::vector<double> slots(static_cast<std::size_t>(n_) + 1);
      fill_slots(t, x, slots);
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k)
          j(i, k) = expr::eval(jacobian_[i][k], slots);
      return j;
    }
    // central differences, step scaled per coordinate; used for non-smooth
    // fields (abs) where the symbolic route is unavailable
    Eigen::VectorXd xp = x, xm = x;
    for (int k = 0; k < n_; ++k) {
      const double h = 1e-6 * (1.0 + std::abs(x[k]));
      xp[k] = x[k] + h;
      xm[k] = x[k] - h;
      j.col(k) = (rhs_at(t, xp) - rhs_at(t, xm)) / (2.0 * h);
      xp[k] = x[k];
      xm[k] = x[k];
    }
    return j;
  }

 private:
  void require_state(const Eigen::VectorXd& x) const {
    if (x.size() != n_)
      throw Error(ErrorCode::dimension_mismatch,
                  "state length " + std::to_string(x.size()) + ", expected " +
                      std::to_string(n_));
  }

  void fill_slots(double t, const Eigen::VectorXd& x,
                  std::vector<double>& slots) const {
    slots[0] = t;
    for (int i = 0; i < n_; ++i) slots[static_cast<std::size_t>(i) + 1] = x[i];
  }

  int n_ = 0;
  JacobianMode mode_ = JacobianMode::symbolic;
  std::string label_;
  std::vector<std::string> variables_;
  std::vector<expr::Ast> rhs_;
  std::vector<std::vector<expr::Ast>> jacobian_;
};

inline DynamicalSystem make_system(std::span<const std::string> rhs_sources, int n,
                                   JacobianMode mode = JacobianMode::symbolic,
                                   std::string label = {}) {
  return DynamicalSystem::make(rhs_sources, n, mode, std::move(label));
}

inline DynamicalSystem make_system(std::initializer_list<std::string> rhs_sources,
                                   int n,
                                   JacobianMode mode = JacobianMode::symbolic,
                                   std::string label = {}) {
  std::vector<std::string> v(rhs_sources);
  return DynamicalSystem::make(v, n, mode, std::move(label));
}

/// Variational right-hand side h(dx,x,t) = J(t,x) dx.
inline Eigen::VectorXd variational_rhs(const DynamicalSystem& sys, double t,
                                       const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& dx) {
  if (dx.size() != sys.dim())
    throw Error(ErrorCode::dimension_mismatch, "variational state length mismatch");
  return sys.jacobian_at(t, x) * dx;
}

/// Comparison-system right-hand side phi over (t,u1..um) or
/// (t,u1..um,x1..xn); evaluated jointly with the plant when coupled.
class CoupledMap {
 public:
  static CoupledMap make(std::span<const std::string> phi_sources, int m,
                         bool depends_on_state, int state_dim) {
    if (m < 1)
      throw Error(ErrorCode::invalid_argument, "comparison dimension must be >= 1");
    if (static_cast<int>(phi_sources.size()) != m)
      throw Error(ErrorCode::dimension_mismatch,
                  "expected " + std::to_string(m) + " comparison sources, got " +
                      std::to_string(phi_sources.size()));
    CoupledMap map;
    map.m_ = m;
    map.depends_on_state_ = depends_on_state;
    map.state_dim_ = depends_on_state ? state_dim : 0;
    map.variables_.emplace_back("t");
    for (int i = 1; i <= m; ++i) map.variables_.push_back("u" + std::to_string(i));
    if (depends_on_state)
      for (int i = 1; i <= state_dim; ++i)
        map.variables_.push_back("x" + std::to_string(i));
    map.phi_.reserve(phi_sources.size());
    for (const auto& src : phi_sources)
      map.phi_.push_back(expr::parse(src, map.variables_));
    return map;
  }

  int dim() const { return m_; }
  bool depends_on_state() const { return depends_on_state_; }
  int state_dim() const { return state_dim_; }
  const std::vector<expr::Ast>& phi() const { return phi_; }
  const std::vector<std::string>& variables() const { return variables_; }

  Eigen::VectorXd eval(double t, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& x = {}) const {
    if (u.size() != m_)
      throw Error(ErrorCode::dimension_mismatch, "comparison state length mismatch");
    if (depends_on_state_ && x.size() != state_dim_)
      throw Error(ErrorCode::dimension_mismatch,
                  "comparison map needs the plant state x");
    std::vector<double> slots(variables_.size());
    slots[0] = t;
    for (int i = 0; i < m_; ++i) slots[static_cast<std::size_t>(i) + 1] = u[i];
    if (depends_on_state_)
      for (int i = 0; i < state_dim_; ++i)
        slots[static_cast<std::size_t>(m_ + i) + 1] = x[i];
    Eigen::VectorXd out(m_);
    for (int i = 0; i < m_; ++i) out[i] = expr::eval(phi_[i], slots);
    return out;
  }

 private:
  int m_ = 0;
  bool depends_on_state_ = false;
  int state_dim_ = 0;
  std::vector<std::string> variables_;
  std::vector<expr::Ast> phi_;
};

/// Fixed-step RK4 configuration on [t0, tmax].
struct IntegratorConfig {
  double dt = 1e-3;
  double t0 = 0.0;
  double tmax = 1.0;
};

/// Sampled solution on a uniform grid. `variational` and `comparison` are
/// present only for coupled runs. The system and comparison map that produced
/// a coupled trajectory ride along so later analyses can re-evaluate the
/// comparison premise on the same grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> variational;
  std::vector<Eigen::VectorXd> comparison;
  std::shared_ptr<const DynamicalSystem> system;
  std::shared_ptr<const CoupledMap> comparison_map;

  bool has_variational() const { return !variational.empty(); }
  bool has_comparison() const { return !comparison.empty(); }
};

namespace detail {

inline std::int64_t step_count(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0))
    throw Error(ErrorCode::invalid_argument, "dt must be positive");
  if (!(cfg.tmax > cfg.t0))
    throw Error(ErrorCode::invalid_argument, "tmax must exceed t0");
  const double raw = (cfg.tmax - cfg.t0) / cfg.dt;
  if (raw > 1e8)
    throw Error(ErrorCode::step_overflow,
                "step count " + std::to_string(raw) + " exceeds 1e8");
  const auto steps = static_cast<std::int64_t>(std::llround(raw));
  return steps < 1 ? 1 : steps;
}

// One classical RK4 step of y' = f(t,y) in place.
template <typename Rhs>
inline void rk4_step(const Rhs& f, double t, double dt, Eigen::VectorXd& y,
                     Eigen::VectorXd& k1, Eigen::VectorXd& k2, Eigen::VectorXd& k3,
                     Eigen::VectorXd& k4, Eigen::VectorXd& scratch) {
  k1 = f(t, y);
  scratch = y + (0.5 * dt) * k1;
  k2 = f(t + 0.5 * dt, scratch);
  scratch = y + (0.5 * dt) * k2;
  k3 = f(t + 0.5 * dt, scratch);
  scratch = y + dt * k3;
  k4 = f(t + dt, scratch);
  y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Rhs>
inline void run_fixed_grid(const Rhs& f, const IntegratorConfig& cfg,
                           Eigen::VectorXd& y,
                           const std::function<void(double, const Eigen::VectorXd&)>& record) {
  const std::int64_t steps = step_count(cfg);
  if (!y.allFinite())
    throw Error(ErrorCode::non_finite_state, "initial state is not finite");
  record(cfg.t0, y);
  Eigen::VectorXd k1, k2, k3, k4, scratch;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = cfg.t0 + static_cast<double>(k) * cfg.dt;
    rk4_step(f, t, cfg.dt, y, k1, k2, k3, k4, scratch);
    const double t_next = cfg.t0 + static_cast<double>(k + 1) * cfg.dt;
    if (!y.allFinite())
      throw Error(ErrorCode::non_finite_state,
                  "state is not finite at t = " + std::to_string(t_next));
    record(t_next, y);
  }
}

}  // namespace detail

/// Integrate x' = f(t,x) from x0 with fixed-step RK4; deterministic.
inline Trajectory integrate(const DynamicalSystem& sys, const Eigen::VectorXd& x0,
                            const IntegratorConfig& cfg) {
  if (x0.size() != sys.dim())
    throw Error(ErrorCode::dimension_mismatch, "x0 length mismatch");
  Trajectory traj;
  traj.system = std::make_shared<DynamicalSystem>(sys);
  auto f = [&sys](double t, const Eigen::VectorXd& y) { return sys.rhs_at(t, y); };
  Eigen::VectorXd y = x0;
  detail::run_fixed_grid(f, cfg, y, [&traj](double t, const Eigen::VectorXd& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
  });
  return traj;
}

/// Jointly integrate x' = f, dx' = J(t,x) dx and u' = phi(t,u[,x]) with one
/// shared RK4 stepper so the three channels share a grid. An empty `phi`
/// integrates just the plant and variational channels (u0 must be empty too).
inline Trajectory integrate_coupled(const DynamicalSystem& sys,
                                    const std::optional<CoupledMap>& phi,
                                    const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& dx0,
                                    const Eigen::VectorXd& u0,
                                    const IntegratorConfig& cfg) {
  const Eigen::Index n = sys.dim();
  if (x0.size() != n || dx0.size() != n)
    throw Error(ErrorCode::dimension_mismatch, "x0/dx0 length mismatch");
  const Eigen::Index m = phi ? phi->dim() : 0;
  if (u0.size() != m)
    throw Error(ErrorCode::dimension_mismatch, "u0 length mismatch");
  if (phi && phi->depends_on_state() && phi->state_dim() != n)
    throw Error(ErrorCode::dimension_mismatch,
                "comparison map state dimension mismatch");
  for (Eigen::Index i = 0; i < u0.size(); ++i)
    if (u0[i] < 0.0)
      throw Error(ErrorCode::negative_u0,
                  "u0[" + std::to_string(i) + "] = " + std::to_string(u0[i]) +
                      " is negative");

  Eigen::VectorXd y(2 * n + m);
  y.segment(0, n) = x0;
  y.segment(n, n) = dx0;
  if (m > 0) y.segment(2 * n, m) = u0;

  auto f = [&sys, &phi, n, m](double t, const Eigen::VectorXd& state) {
    Eigen::VectorXd dy(2 * n + m);
    const Eigen::VectorXd x = state.segment(0, n);
    const Eigen::VectorXd dx = state.segment(n, n);
    dy.segment(0, n) = sys.rhs_at(t, x);
    dy.segment(n, n) = sys.jacobian_at(t, x) * dx;
    if (m > 0) {
      const Eigen::VectorXd u = state.segment(2 * n, m);
      dy.segment(2 * n, m) =
          phi->depends_on_state() ? phi->eval(t, u, x) : phi->eval(t, u);
    }
    return dy;
  };

  Trajectory traj;
  traj.system = std::make_shared<DynamicalSystem>(sys);
  if (phi) traj.comparison_map = std::make_shared<CoupledMap>(*phi);
  detail::run_fixed_grid(f, cfg, y, [&traj, n, m](double t, const Eigen::VectorXd& s) {
    traj.times.push_back(t);
    traj.states.push_back(s.segment(0, n));
    traj.variational.push_back(s.segment(n, n));
    if (m > 0) traj.comparison.push_back(s.segment(2 * n, m));
  });
  return traj;
}

namespace detail {

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double max_eig_jacobi(Eigen::MatrixXd s, double tol = 1e-10) {
  const Eigen::Index n = s.rows();
  if (n == 1) return s(0, 0);
  const double scale = std::max(1.0, s.norm());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * s(p, q) * s(p, q);
    if (std::sqrt(off) <= tol * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double snv = t * c;
        Eigen::VectorXd col_p = s.col(p), col_q = s.col(q);
        s.col(p) = c * col_p - snv * col_q;
        s.col(q) = snv * col_p + c * col_q;
        Eigen::RowVectorXd row_p = s.row(p), row_q = s.row(q);
        s.row(p) = c * row_p - snv * row_q;
        s.row(q) = snv * row_p + c * row_q;
        s(p, q) = 0.0;
        s(q, p) = 0.0;
      }
    }
  }
  return s.diagonal().maxCoeff();
}

}  // namespace detail

/// lambda_max of the symmetric part (J + J^T)/2 of the Jacobian at (t,x) --
/// the classical scalar contraction criterion this library generalizes.
inline double max_symmetric_jacobian_eig(const DynamicalSystem& sys, double t,
                                         const Eigen::VectorXd& x) {
  const Eigen::MatrixXd j = sys.jacobian_at(t, x);
  return detail::max_eig_jacobi(0.5 * (j + j.transpose()));
}

}  // namespace veccontract::dynamics
