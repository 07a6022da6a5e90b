#pragma once

// Command-line front end. Subcommands:
//   simulate       coupled integration -> trajectory CSV
//   verify         dominance check -> JSON report (exit 0 iff holds-on-grid)
//   check-qm       componentwise quasi-monotonicity report
//   check-cone-qm  cone quasi-monotonicity falsifier report
//   norm           evaluate the vector norm at a point
//   example        run a built-in example end to end
//
// Exit codes: 0 success/holds, 1 violated/counterexample, 2 usage or config
// error, 3 numerical failure (blow-up).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "veccontract/comparison.hpp"
#include "veccontract/cone.hpp"
#include "veccontract/dynamics.hpp"
#include "veccontract/errors.hpp"
#include "veccontract/io.hpp"
#include "veccontract/presets.hpp"
#include "veccontract/scenario.hpp"
#include "veccontract/vnorm.hpp"

namespace veccontract::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

namespace detail {

namespace fs = std::filesystem;
using nlohmann::json;

struct Overrides {
  std::optional<double> dt;
  std::optional<double> tmax;
  std::optional<std::uint64_t> seed;
};

inline void apply_overrides(scenario::Scenario& s, const Overrides& o) {
  if (o.dt) s.integrator.dt = *o.dt;
  if (o.tmax) s.integrator.tmax = *o.tmax;
  if (o.seed) s.seed = *o.seed;
  if (!(s.integrator.dt > 0.0))
    throw ConfigError("/integrator/dt", "must be positive");
  if (!(s.integrator.tmax > s.integrator.t0))
    throw ConfigError("/integrator/tmax", "must exceed t0");
}

inline std::string default_artifact(const std::string& config_path,
                                    const std::string& suffix) {
  fs::path p(config_path);
  p.replace_extension();
  return p.string() + suffix;
}

inline std::string pick_path(const std::string& configured,
                             const std::string& config_path,
                             const std::string& suffix) {
  return configured.empty() ? default_artifact(config_path, suffix) : configured;
}

inline std::vector<double> parse_double_list(const std::string& text,
                                             const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || !end || *end != '\0')
      throw Error(ErrorCode::invalid_argument,
                  what + ": cannot parse '" + token + "' as a number");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

inline const Eigen::VectorXd& require_initial(const std::optional<Eigen::VectorXd>& v,
                                              const char* path) {
  if (!v) throw ConfigError(path, "missing required field");
  return *v;
}

inline comparison::Ordering make_ordering(const scenario::Scenario& s,
                                          const scenario::BuiltScenario& built) {
  if (s.ordering_mode == comparison::OrderingMode::cone)
    return comparison::Ordering::with_cone(*built.cone_order);
  return comparison::Ordering::componentwise();
}

inline dynamics::Trajectory integrate_scenario(const scenario::Scenario& s,
                                               const scenario::BuiltScenario& built,
                                               bool need_comparison) {
  const auto& x0 = require_initial(s.x0, "/initial/x0");
  if (!s.dx0 && (need_comparison || s.comparison))
    throw ConfigError("/initial/dx0", "missing required field");
  if (!s.dx0) return dynamics::integrate(built.system, x0, s.integrator);
  std::optional<dynamics::CoupledMap> map;
  Eigen::VectorXd u0;
  if (built.comparison) {
    map = built.comparison->map();
    u0 = require_initial(s.u0, "/initial/u0");
  } else if (need_comparison) {
    throw ConfigError("/comparison", "missing required field");
  }
  return dynamics::integrate_coupled(built.system, map, x0, *s.dx0, u0, s.integrator);
}

inline void write_manifest(const std::string& command, const scenario::Scenario& s,
                           const std::string& config_path, const json& outputs) {
  const std::string path =
      pick_path(s.output.manifest_json, config_path, ".manifest.json");
  io::write_json(path, io::make_manifest(command, s.raw, s.seed, outputs));
}

// ---- subcommand bodies ----------------------------------------------------

inline int do_simulate(const std::string& config_path, const Overrides& o,
                       std::ostream& out) {
  scenario::Scenario s = scenario::load_scenario_file(config_path);
  apply_overrides(s, o);
  const auto built = scenario::build_scenario(s);
  const auto traj = integrate_scenario(s, built, /*need_comparison=*/false);
  const std::string csv = pick_path(s.output.trajectory_csv, config_path, ".csv");
  io::write_trajectory_csv(csv, traj);
  write_manifest("simulate", s, config_path, json{{"trajectory_csv", csv}});
  out << "simulated " << traj.times.size() << " grid points -> " << csv << "\n";
  return kExitOk;
}

inline int do_verify(const std::string& config_path, const Overrides& o,
                     std::ostream& out) {
  scenario::Scenario s = scenario::load_scenario_file(config_path);
  apply_overrides(s, o);
  const auto built = scenario::build_scenario(s);
  if (!built.gain) throw ConfigError("/norm", "missing required field");
  if (!built.comparison) throw ConfigError("/comparison", "missing required field");
  const auto gain = vnorm::make_norm(*s.gain);
  const auto traj = integrate_scenario(s, built, /*need_comparison=*/true);

  comparison::DominanceOptions options;
  options.region_conditions = built.region_conditions;
  const auto report =
      comparison::verify_dominance(traj, gain, make_ordering(s, built), options);

  json report_json = io::dominance_to_json(report);
  if (s.u0 && s.u0->minCoeff() > 0.0) {
    try {
      comparison::TimeSeries series{traj.times, traj.comparison};
      report_json["rate_estimate"] = comparison::estimate_rate(series, *s.u0);
    } catch (const Error&) {
      // non-positive comparison channel: no envelope rate to report
    }
  }

  const std::string report_path =
      pick_path(s.output.report_json, config_path, ".report.json");
  io::write_json(report_path, report_json);
  json outputs{{"report_json", report_path}};
  if (!s.output.trajectory_csv.empty()) {
    io::write_trajectory_csv(s.output.trajectory_csv, traj);
    outputs["trajectory_csv"] = s.output.trajectory_csv;
  }
  write_manifest("verify", s, config_path, outputs);

  out << "conclusion: " << (report.holds ? "holds-on-grid" : "violated")
      << " (margin " << report.margin << (report.fragile ? ", fragile" : "") << ")\n";
  out << "premise:    " << (report.premise_holds ? "holds-on-grid" : "violated")
      << " (margin " << report.premise_margin << ")\n";
  if (!report.region_ok.empty())
    out << "region:     "
        << (report.region_holds_everywhere ? "holds everywhere" : "violated") << "\n";
  out << "report -> " << report_path << "\n";
  return report.holds ? kExitOk : kExitViolated;
}

inline int do_check_qm(const std::string& config_path, const Overrides& o,
                       std::ostream& out) {
  scenario::Scenario s = scenario::load_scenario_file(config_path);
  if (o.seed) s.seed = *o.seed;
  const auto built = scenario::build_scenario(s);
  if (!built.comparison) throw ConfigError("/comparison", "missing required field");
  const auto& comp = *built.comparison;
  if (comp.depends_on_state() && !s.qm.frozen_x)
    throw ConfigError("/qm/frozen_x",
                      "required for a state-dependent comparison map");

  json report_json;
  bool counterexample = false;
  if (comp.affine()) {
    const bool metzler = comparison::check_qm_affine(comp.affine()->m);
    report_json["metzler"] = io::metzler_to_json(comp.affine()->m, metzler);
    counterexample = !metzler;
    out << "metzler: " << (metzler ? "true" : "false") << "\n";
  }
  const auto sampled = comparison::check_qm_sampled(comp, s.qm.box, s.qm.samples,
                                                    s.seed, s.qm.frozen_x);
  report_json["sampled"] = io::qm_report_to_json(sampled);
  counterexample = counterexample || sampled.counterexample_found;
  out << "sampled: "
      << (sampled.counterexample_found ? "counterexample" : "no-counterexample")
      << " (" << sampled.samples << " samples, seed " << sampled.seed << ")\n";

  const std::string report_path =
      pick_path(s.output.report_json, config_path, ".report.json");
  io::write_json(report_path, report_json);
  write_manifest("check-qm", s, config_path, json{{"report_json", report_path}});
  out << "report -> " << report_path << "\n";
  return counterexample ? kExitViolated : kExitOk;
}

inline int do_check_cone_qm(const std::string& config_path, const Overrides& o,
                            std::ostream& out) {
  scenario::Scenario s = scenario::load_scenario_file(config_path);
  if (o.seed) s.seed = *o.seed;
  if (!s.comparison) throw ConfigError("/comparison", "missing required field");
  if (s.comparison->depends_on_state)
    throw ConfigError("/comparison/depends_on_state",
                      "the cone check applies to maps F(u) without plant state");
  if (!s.cone_g)
    throw ConfigError("/ordering/G", "the cone check needs ordering mode \"cone\"");
  const auto k = cone::make_cone(*s.cone_g);

  // Cone quasi-monotonicity applies to autonomous maps: parse over u1..um only.
  std::vector<std::string> uvars;
  for (std::size_t i = 1; i <= s.comparison->phi.size(); ++i)
    uvars.push_back("u" + std::to_string(i));
  std::vector<expr::Ast> f;
  for (std::size_t i = 0; i < s.comparison->phi.size(); ++i) {
    try {
      f.push_back(expr::parse(s.comparison->phi[i], uvars));
    } catch (const Error& e) {
      throw ConfigError("/comparison/phi/" + std::to_string(i), e.what());
    }
  }

  const auto report = cone::check_cone_qm(f, k, s.qm.samples, s.qm.box, s.seed);
  const std::string report_path =
      pick_path(s.output.report_json, config_path, ".report.json");
  io::write_json(report_path, io::cone_qm_to_json(report));
  write_manifest("check-cone-qm", s, config_path, json{{"report_json", report_path}});
  out << "cone-qm: "
      << (report.counterexample_found ? "counterexample" : "no-counterexample")
      << " (" << report.samples_checked << " boundary pairs, seed " << report.seed
      << ")\n";
  out << "report -> " << report_path << "\n";
  return report.counterexample_found ? kExitViolated : kExitOk;
}

inline int do_norm(const std::string& config_path, const std::string& at,
                   const std::string& dot, std::ostream& out) {
  scenario::Scenario s = scenario::load_scenario_file(config_path);
  if (!s.gain) throw ConfigError("/norm", "missing required field");
  const auto gain = vnorm::make_norm(*s.gain);
  const Eigen::VectorXd dx = to_eigen(parse_double_list(at, "--at"));

  auto print_vector = [&out](const char* label, const Eigen::VectorXd& v) {
    out << label << " = [";
    for (Eigen::Index i = 0; i < v.size(); ++i)
      out << (i ? ", " : "") << io::format_full(v[i]);
    out << "]\n";
  };
  print_vector("norm", vnorm::norm(gain, dx).components);
  print_vector("norm_squared", vnorm::norm_squared(gain, dx));
  if (!dot.empty()) {
    const Eigen::VectorXd dxdot = to_eigen(parse_double_list(dot, "--dot"));
    print_vector("norm_squared_rate", vnorm::norm_squared_rate(gain, dx, dxdot));
  }
  return kExitOk;
}

// ---- built-in examples -----------------------------------------------------

inline json condition_json(const presets::Example1& ex) {
  return json{{"lhs", ex.condition_lhs},
              {"rhs", ex.condition_rhs},
              {"holds", ex.condition_holds}};
}

inline int do_example1(const presets::Example1Params& params, const Overrides& o,
                       const fs::path& out_dir, std::ostream& out) {
  presets::Example1 ex = presets::make_example1(params);
  if (o.dt) ex.integrator.dt = *o.dt;
  if (o.tmax) ex.integrator.tmax = *o.tmax;

  const bool metzler = comparison::check_qm_affine(ex.comparison_matrix);
  out << "metzler: " << (metzler ? "true" : "false") << "\n";
  out << "convergence condition 2(p+1) > sum |a_i|/rho_i: " << ex.condition_lhs
      << (ex.condition_holds ? " > " : " <= ") << ex.condition_rhs << " -> "
      << (ex.condition_holds ? "holds" : "violated") << "\n";

  const auto traj = dynamics::integrate_coupled(ex.system, ex.comparison.map(),
                                                ex.x0, ex.dx0, ex.u0, ex.integrator);
  const auto report = comparison::verify_dominance(
      traj, ex.gain, comparison::Ordering::componentwise());
  const double rate =
      comparison::estimate_rate(comparison::TimeSeries{traj.times, traj.comparison},
                                ex.u0);
  out << "conclusion: " << (report.holds ? "holds-on-grid" : "violated")
      << " (margin " << report.margin << ")\n";
  out << "premise:    " << (report.premise_holds ? "holds-on-grid" : "violated")
      << "\n";
  out << "envelope rate estimate: " << rate << "\n";

  json report_json = io::dominance_to_json(report);
  report_json["metzler"] = io::metzler_to_json(ex.comparison_matrix, metzler);
  report_json["condition"] = condition_json(ex);
  report_json["rate_estimate"] = rate;

  const std::string csv = (out_dir / "ex1_trajectory.csv").string();
  const std::string rep = (out_dir / "ex1_report.json").string();
  io::write_trajectory_csv(csv, traj);
  io::write_json(rep, report_json);
  io::write_json((out_dir / "ex1_manifest.json").string(),
                 io::make_manifest("example ex1",
                                   json{{"n", params.n},
                                        {"rho", params.rho},
                                        {"a", params.a},
                                        {"p", params.p},
                                        {"dt", ex.integrator.dt},
                                        {"tmax", ex.integrator.tmax}},
                                   0, json{{"trajectory_csv", csv}, {"report_json", rep}}));
  out << "wrote " << csv << ", " << rep << "\n";
  return report.holds ? kExitOk : kExitViolated;
}

inline int do_example2(const Overrides& o, const fs::path& out_dir, std::ostream& out) {
  presets::Example2 ex = presets::make_example2();
  if (o.dt) ex.integrator.dt = *o.dt;
  if (o.tmax) ex.integrator.tmax = *o.tmax;

  const auto traj = dynamics::integrate_coupled(ex.system, ex.comparison.map(),
                                                ex.x0, ex.dx0, ex.u0, ex.integrator);
  comparison::DominanceOptions options;
  options.region_conditions = ex.region_conditions;
  const auto report = comparison::verify_dominance(
      traj, ex.gain, comparison::Ordering::componentwise(), options);
  const double rate =
      comparison::estimate_rate(comparison::TimeSeries{traj.times, traj.comparison},
                                ex.u0);

  out << "conclusion: " << (report.holds ? "holds-on-grid" : "violated")
      << " (margin " << report.margin << ")\n";
  out << "premise:    " << (report.premise_holds ? "holds-on-grid" : "violated")
      << "\n";
  out << "region x1 > 1/4, x2 > 1/8: "
      << (report.region_holds_everywhere ? "holds everywhere" : "violated") << "\n";
  out << "envelope rate estimate: " << rate << "\n";

  json report_json = io::dominance_to_json(report);
  report_json["rate_estimate"] = rate;
  const std::string csv = (out_dir / "ex2_trajectory.csv").string();
  const std::string rep = (out_dir / "ex2_report.json").string();
  io::write_trajectory_csv(csv, traj);
  io::write_json(rep, report_json);
  io::write_json((out_dir / "ex2_manifest.json").string(),
                 io::make_manifest("example ex2",
                                   json{{"dt", ex.integrator.dt},
                                        {"tmax", ex.integrator.tmax}},
                                   0, json{{"trajectory_csv", csv}, {"report_json", rep}}));
  out << "wrote " << csv << ", " << rep << "\n";
  return report.holds ? kExitOk : kExitViolated;
}

inline int do_example3(std::uint64_t seed, int samples, double box,
                       const fs::path& out_dir, std::ostream& out) {
  const presets::Example3 ex = presets::make_example3();
  const bool metzler = comparison::check_qm_affine(ex.m);
  out << "metzler: " << (metzler ? "true" : "false")
      << " (entry (0,1) = " << ex.m(0, 1) << ")\n";

  json face_checks = json::array();
  for (const double w : {1.0, 2.0, 5.0}) {
    // face w1 = w2: the K* witness (1,-1) pairs to (3/2) w1
    const Eigen::VectorXd x = Eigen::Vector2d::Zero();
    const Eigen::VectorXd y = Eigen::Vector2d(w, w);
    const auto check = cone::check_qm_pair(ex.f, ex.k, x, y);
    double pairing = 0.0;
    for (const auto& p : check.pairings)
      if (p.witness.source_row == 0) pairing = p.pairing;
    out << "face w1=w2,  w=" << w << ": <(1,-1), F(y)-F(x)> = " << pairing
        << " = 3/2 * w >= 0\n";
    face_checks.push_back(json{{"face", "w1=w2"}, {"w", w}, {"pairing", pairing}});
  }
  const bool phi_in_dual = cone::in_dual(ex.k, ex.face2_positive_pairing_phi);
  for (const double w : {1.0, 2.0, 5.0}) {
    const Eigen::VectorXd y = Eigen::Vector2d(3.0 * w, w);
    const Eigen::VectorXd df = Eigen::Vector2d(0.5 * 3.0 * w - 2.0 * w, 3.0 * w - 4.0 * w);
    const double pairing = ex.face2_positive_pairing_phi.dot(df);
    out << "face w1=3w2, w=" << w << ": <(1,-3), F(y)-F(x)> = " << pairing
        << " = 5/2 * w, but (1,-3) is not in K*\n";
    face_checks.push_back(json{{"face", "w1=3w2"},
                               {"w", w},
                               {"pairing", pairing},
                               {"phi_in_dual", phi_in_dual}});
  }
  out << "the K* witness on the face w1=3w2 is (-1,3), which pairs to -5/2 * w\n";

  const auto report = cone::check_cone_qm(ex.f, ex.k, samples, box, seed);
  out << "cone-qm falsifier: "
      << (report.counterexample_found ? "counterexample found" : "no counterexample")
      << "\n";

  json report_json;
  report_json["metzler"] = io::metzler_to_json(ex.m, metzler);
  report_json["face_checks"] = face_checks;
  report_json["face2_phi_in_dual"] = phi_in_dual;
  report_json["cone_qm"] = io::cone_qm_to_json(report);
  const std::string rep = (out_dir / "ex3_report.json").string();
  io::write_json(rep, report_json);
  io::write_json((out_dir / "ex3_manifest.json").string(),
                 io::make_manifest("example ex3",
                                   json{{"samples", samples}, {"box", box}},
                                   seed, json{{"report_json", rep}}));
  out << "wrote " << rep << "\n";
  return report.counterexample_found ? kExitViolated : kExitOk;
}

// ---- batch driver ----------------------------------------------------------

inline int map_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::non_finite_state:
    case ErrorCode::step_overflow:
    case ErrorCode::domain_error:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

inline int guard_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return map_error_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

template <typename RunOne>
inline int run_batch(const std::string& dir, const RunOne& run_one,
                     std::ostream& out, std::ostream& err) {
  std::vector<fs::path> configs;
  if (!fs::is_directory(dir))
    throw Error(ErrorCode::invalid_argument, "--batch expects a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty())
    throw Error(ErrorCode::invalid_argument, "no .json configs in " + dir);

  std::atomic<std::size_t> next{0};
  std::vector<int> codes(configs.size(), kExitOk);
  std::mutex io_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      std::ostringstream local;
      int code;
      try {
        code = run_one(configs[i].string(), local);
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        err << "[" << configs[i].filename().string() << "] ";
        codes[i] = guard_current_exception(err);
        continue;
      }
      codes[i] = code;
      std::lock_guard<std::mutex> lock(io_mutex);
      out << "[" << configs[i].filename().string() << "]\n" << local.str();
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>({configs.size(), hw, std::size_t{8}});
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace detail

/// Entry point shared by the binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  using detail::Overrides;
  namespace fs = std::filesystem;

  CLI::App app{"vector contraction analysis of nonlinear dynamical systems"};
  app.require_subcommand(1);

  std::string config_path;
  bool batch = false;
  Overrides overrides;
  auto add_common = [&](CLI::App* sub, bool with_batch = true) {
    sub->add_option("config", config_path, "scenario config (JSON)")->required();
    sub->add_option("--dt", overrides.dt, "override integrator step");
    sub->add_option("--tmax", overrides.tmax, "override integration horizon");
    sub->add_option("--seed", overrides.seed, "override sampling seed");
    if (with_batch)
      sub->add_flag("--batch", batch, "treat config as a directory of configs");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate and export CSV");
  add_common(simulate);
  auto* verify = app.add_subcommand("verify", "check dominance along a coupled run");
  add_common(verify);
  auto* check_qm = app.add_subcommand("check-qm", "componentwise quasi-monotonicity");
  add_common(check_qm, false);
  auto* check_cone_qm =
      app.add_subcommand("check-cone-qm", "quasi-monotonicity relative to a cone");
  add_common(check_cone_qm, false);

  auto* norm_cmd = app.add_subcommand("norm", "evaluate the vector norm");
  std::string at_text, dot_text;
  norm_cmd->add_option("config", config_path, "scenario config (JSON)")->required();
  norm_cmd->add_option("--at", at_text, "evaluation point, comma-separated")->required();
  norm_cmd->add_option("--dot", dot_text, "path velocity for the squared-norm rate");

  auto* example = app.add_subcommand("example", "run a built-in example");
  std::string which;
  example->add_option("name", which, "ex1, ex2 or ex3")->required();
  int ex_n = 1;
  std::string ex_rho, ex_a;
  double ex_p = 1.0;
  int ex_samples = 1000;
  double ex_box = 5.0;
  std::string out_dir = ".";
  example->add_option("--n", ex_n, "ex1: number of coupled states");
  example->add_option("--rho", ex_rho, "ex1: comma-separated rho_i");
  example->add_option("--a", ex_a, "ex1: comma-separated a_i");
  example->add_option("--p", ex_p, "ex1: damping parameter");
  example->add_option("--samples", ex_samples, "ex3: falsifier samples");
  example->add_option("--box", ex_box, "ex3: falsifier box bound");
  example->add_option("--out-dir", out_dir, "artifact directory");
  example->add_option("--dt", overrides.dt, "override integrator step");
  example->add_option("--tmax", overrides.tmax, "override integration horizon");
  example->add_option("--seed", overrides.seed, "override sampling seed");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("veccontract");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(simulate)) {
      if (batch)
        return detail::run_batch(
            config_path,
            [&](const std::string& p, std::ostream& o) {
              return detail::do_simulate(p, overrides, o);
            },
            out, err);
      return detail::do_simulate(config_path, overrides, out);
    }
    if (app.got_subcommand(verify)) {
      if (batch)
        return detail::run_batch(
            config_path,
            [&](const std::string& p, std::ostream& o) {
              return detail::do_verify(p, overrides, o);
            },
            out, err);
      return detail::do_verify(config_path, overrides, out);
    }
    if (app.got_subcommand(check_qm))
      return detail::do_check_qm(config_path, overrides, out);
    if (app.got_subcommand(check_cone_qm))
      return detail::do_check_cone_qm(config_path, overrides, out);
    if (app.got_subcommand(norm_cmd))
      return detail::do_norm(config_path, at_text, dot_text, out);
    if (app.got_subcommand(example)) {
      fs::create_directories(out_dir);
      if (which == "ex1") {
        presets::Example1Params params;
        params.n = ex_n;
        params.rho = ex_rho.empty()
                         ? std::vector<double>(static_cast<std::size_t>(ex_n), 1.0)
                         : detail::parse_double_list(ex_rho, "--rho");
        params.a = ex_a.empty()
                       ? std::vector<double>(static_cast<std::size_t>(ex_n), 1.0)
                       : detail::parse_double_list(ex_a, "--a");
        params.p = ex_p;
        return detail::do_example1(params, overrides, out_dir, out);
      }
      if (which == "ex2") return detail::do_example2(overrides, out_dir, out);
      if (which == "ex3")
        return detail::do_example3(overrides.seed.value_or(0), ex_samples, ex_box,
                                   out_dir, out);
      throw Error(ErrorCode::invalid_argument, "unknown example '" + which + "'");
    }
  } catch (...) {
    return detail::guard_current_exception(err);
  }
  return kExitUsage;
}

}  // namespace veccontract::cli
