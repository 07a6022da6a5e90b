#pragma once

// Artifact writers: trajectory CSV (full double precision), JSON reports
// for dominance and quasi-monotonicity checks, and the per-run manifest.

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "veccontract/comparison.hpp"
#include "veccontract/cone.hpp"
#include "veccontract/dynamics.hpp"
#include "veccontract/errors.hpp"

namespace veccontract::io {

using nlohmann::json;

inline constexpr const char* kToolName = "veccontract";
inline constexpr const char* kToolVersion = "0.1.0";

/// 17 significant digits: enough to reproduce any double bit-for-bit.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

/// Header t,x1..xn[,dx1..dxn][,u1..um], one row per grid point.
inline void write_trajectory_csv(const std::string& path,
                                 const dynamics::Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  const Eigen::Index m = traj.has_comparison() ? traj.comparison.front().size() : 0;
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  if (traj.has_variational())
    for (Eigen::Index i = 1; i <= n; ++i) out << ",dx" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_full(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_full(traj.states[k][i]);
    if (traj.has_variational())
      for (Eigen::Index i = 0; i < n; ++i)
        out << "," << format_full(traj.variational[k][i]);
    for (Eigen::Index i = 0; i < m; ++i)
      out << "," << format_full(traj.comparison[k][i]);
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

inline json violation_to_json(const comparison::Violation& v) {
  return json{{"time", v.time}, {"component", v.component}};
}

inline json dominance_to_json(const comparison::DominanceReport& report) {
  json out;
  out["ordering"] = report.mode == comparison::OrderingMode::componentwise
                        ? "componentwise"
                        : "cone";
  out["verdict"] = report.holds ? "holds-on-grid" : "violated";
  out["margin"] = report.margin;
  out["fragile"] = report.fragile;
  if (report.first_violation)
    out["first_violation"] = violation_to_json(*report.first_violation);
  json premise;
  premise["verdict"] = report.premise_holds ? "holds-on-grid" : "violated";
  premise["margin"] = report.premise_margin;
  if (report.premise_first_violation)
    premise["first_violation"] = violation_to_json(*report.premise_first_violation);
  out["premise"] = premise;
  if (!report.region_ok.empty()) {
    json region;
    region["holds_everywhere"] = report.region_holds_everywhere;
    if (report.region_first_violation_time)
      region["first_violation_time"] = *report.region_first_violation_time;
    out["region"] = region;
  }
  if (!report.times.empty()) {
    out["grid"] = json{{"t0", report.times.front()},
                       {"tmax", report.times.back()},
                       {"points", report.times.size()}};
    out["initial"] = json{{"D", vector_to_json(report.distance.front())},
                          {"R", vector_to_json(report.bound.front())}};
    out["final"] = json{{"D", vector_to_json(report.distance.back())},
                        {"R", vector_to_json(report.bound.back())}};
  }
  out["definite"] = report.definite;
  out["euclidean_implication"] =
      report.definite ? "R -> 0 forces ||dpsi|| -> 0"
                      : "inconclusive for unweighted coordinates";
  return out;
}

inline json qm_report_to_json(const comparison::QmSampleReport& report) {
  json out;
  out["kind"] = "componentwise-sampled";
  out["verdict"] = report.counterexample_found ? "counterexample" : "no-counterexample";
  out["samples"] = report.samples;
  out["seed"] = report.seed;
  if (report.counterexample) {
    const auto& ce = *report.counterexample;
    out["counterexample"] = json{{"component", ce.component},
                                 {"t", ce.t},
                                 {"u", vector_to_json(ce.u)},
                                 {"v", vector_to_json(ce.v)},
                                 {"phi_u", ce.phi_u},
                                 {"phi_v", ce.phi_v}};
  }
  return out;
}

inline json metzler_to_json(const Eigen::MatrixXd& m, bool verdict) {
  json out;
  out["kind"] = "metzler";
  out["metzler"] = verdict;
  if (!verdict) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (i != j && m(i, j) < 0.0 && !out.contains("violating_entry"))
          out["violating_entry"] = json{{"row", i}, {"col", j}, {"value", m(i, j)}};
  }
  return out;
}

inline json cone_qm_to_json(const cone::ConeQmReport& report) {
  json out;
  out["kind"] = "cone-qm";
  out["verdict"] = report.counterexample_found ? "counterexample" : "no-counterexample";
  out["samples_requested"] = report.samples_requested;
  out["samples_checked"] = report.samples_checked;
  out["samples_skipped"] = report.samples_skipped;
  out["seed"] = report.seed;
  if (report.counterexample) {
    const auto& ce = *report.counterexample;
    json pairings = json::array();
    for (const auto& p : ce.pairings)
      pairings.push_back(json{{"phi", vector_to_json(p.witness.phi)},
                              {"source_row", p.witness.source_row},
                              {"pairing", p.pairing}});
    out["counterexample"] = json{{"x", vector_to_json(ce.x)},
                                 {"y", vector_to_json(ce.y)},
                                 {"active_rows", ce.active_rows},
                                 {"witness_pairings", pairings}};
  }
  return out;
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

/// Config echo + seed + tool version: everything needed to reproduce the
/// artifacts of a run byte-for-byte.
inline json make_manifest(const std::string& command, const json& config_echo,
                          std::uint64_t seed, const json& outputs) {
  json out;
  out["tool"] = kToolName;
  out["version"] = kToolVersion;
  out["command"] = command;
  out["seed"] = seed;
  out["config"] = config_echo;
  out["outputs"] = outputs;
  return out;
}

}  // namespace veccontract::io
