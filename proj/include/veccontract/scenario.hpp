#pragma once

// JSON scenario configs for the CLI: one schema for all subcommands,
// validated in full (types, shapes, mutual dimensions) before any
// integration starts. Validation failures carry the JSON pointer of the
// offending field.

#include <Eigen/Dense>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "veccontract/comparison.hpp"
#include "veccontract/dynamics.hpp"
#include "veccontract/errors.hpp"
#include "veccontract/vnorm.hpp"

namespace veccontract::scenario {

using nlohmann::json;

struct ComparisonSpec {
  std::vector<std::string> phi;
  bool depends_on_state = false;
  std::optional<comparison::AffinePart> affine;
};

struct QmSpec {
  double box = 5.0;
  int samples = 10000;
  std::optional<Eigen::VectorXd> frozen_x;
};

struct OutputSpec {
  std::string trajectory_csv;
  std::string report_json;
  std::string manifest_json;
};

struct Scenario {
  std::vector<std::string> rhs;
  int n = 0;
  dynamics::JacobianMode jacobian_mode = dynamics::JacobianMode::symbolic;

  std::optional<Eigen::MatrixXd> gain;  // norm matrix A
  std::optional<ComparisonSpec> comparison;

  std::optional<Eigen::VectorXd> x0;
  std::optional<Eigen::VectorXd> dx0;
  std::optional<Eigen::VectorXd> u0;

  dynamics::IntegratorConfig integrator{1e-3, 0.0, 1.0};

  comparison::OrderingMode ordering_mode = comparison::OrderingMode::componentwise;
  std::optional<Eigen::MatrixXd> cone_g;

  std::vector<std::string> region_conditions;
  QmSpec qm;
  OutputSpec output;
  std::uint64_t seed = 0;
  bool seed_explicit = false;

  json raw;  // config echo for the run manifest
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

inline const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline const json& require(const json& j, const std::string& key,
                           const std::string& path) {
  const json* child = find(j, key);
  if (!child) fail(path + "/" + key, "missing required field");
  return *child;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_string_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(path + "/" + std::to_string(i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

inline Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path + "/" + std::to_string(i), "expected a number");
    out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return out;
}

inline Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_path = path + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].empty())
      fail(row_path, "expected a non-empty array of numbers");
    if (i == 0)
      cols = j[i].size();
    else if (j[i].size() != cols)
      fail(row_path, "ragged matrix: expected " + std::to_string(cols) + " columns");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        fail(path + "/" + std::to_string(i) + "/" + std::to_string(c),
             "expected a number");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j[i][c].get<double>();
    }
  return out;
}

inline std::uint64_t env_seed_default() {
  if (const char* env = std::getenv("VECCONTRACT_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(v);
  }
  return 0;
}

}  // namespace detail

/// Parse and fully validate a scenario config. `n` is inferred from the
/// number of right-hand sides (an explicit "n" is cross-checked).
inline Scenario load_scenario(const json& j) {
  using namespace detail;
  if (!j.is_object()) fail("", "config root must be an object");
  Scenario s;
  s.raw = j;

  const json& system = require(j, "system", "");
  if (!system.is_object()) fail("/system", "expected an object");
  s.rhs = as_string_list(require(system, "rhs", "/system"), "/system/rhs");
  s.n = static_cast<int>(s.rhs.size());
  if (const json* jn = find(system, "n")) {
    if (!jn->is_number_integer() || jn->get<int>() != s.n)
      fail("/system/n", "must equal the number of right-hand sides (" +
                            std::to_string(s.n) + ")");
  }
  if (const json* jmode = find(system, "jacobian")) {
    const std::string mode = as_string(*jmode, "/system/jacobian");
    if (mode == "symbolic")
      s.jacobian_mode = dynamics::JacobianMode::symbolic;
    else if (mode == "finite-difference")
      s.jacobian_mode = dynamics::JacobianMode::finite_difference;
    else
      fail("/system/jacobian", "expected \"symbolic\" or \"finite-difference\"");
  }

  if (const json* norm = find(j, "norm")) {
    if (!norm->is_object()) fail("/norm", "expected an object");
    s.gain = as_matrix(require(*norm, "A", "/norm"), "/norm/A");
    if (s.gain->cols() != s.n)
      fail("/norm/A", "expected " + std::to_string(s.n) + " columns");
  }

  if (const json* comp = find(j, "comparison")) {
    if (!comp->is_object()) fail("/comparison", "expected an object");
    ComparisonSpec spec;
    spec.phi = as_string_list(require(*comp, "phi", "/comparison"), "/comparison/phi");
    if (const json* dep = find(*comp, "depends_on_state"))
      spec.depends_on_state = as_bool(*dep, "/comparison/depends_on_state");
    if (const json* affine = find(*comp, "affine")) {
      if (!affine->is_object()) fail("/comparison/affine", "expected an object");
      comparison::AffinePart part;
      part.m = as_matrix(require(*affine, "M", "/comparison/affine"),
                         "/comparison/affine/M");
      if (const json* b = find(*affine, "b"))
        part.b = as_vector(*b, "/comparison/affine/b");
      else
        part.b = Eigen::VectorXd::Zero(part.m.rows());
      const auto m = static_cast<Eigen::Index>(spec.phi.size());
      if (part.m.rows() != m || part.m.cols() != m)
        fail("/comparison/affine/M", "expected a " + std::to_string(m) + "x" +
                                         std::to_string(m) + " matrix");
      if (part.b.size() != m)
        fail("/comparison/affine/b", "expected length " + std::to_string(m));
      spec.affine = std::move(part);
    }
    s.comparison = std::move(spec);
  }

  if (const json* initial = find(j, "initial")) {
    if (!initial->is_object()) fail("/initial", "expected an object");
    if (const json* x0 = find(*initial, "x0")) {
      s.x0 = as_vector(*x0, "/initial/x0");
      if (s.x0->size() != s.n) fail("/initial/x0", "expected length " + std::to_string(s.n));
    }
    if (const json* dx0 = find(*initial, "dx0")) {
      s.dx0 = as_vector(*dx0, "/initial/dx0");
      if (s.dx0->size() != s.n)
        fail("/initial/dx0", "expected length " + std::to_string(s.n));
    }
    if (const json* u0 = find(*initial, "u0")) {
      s.u0 = as_vector(*u0, "/initial/u0");
      if (s.comparison &&
          s.u0->size() != static_cast<Eigen::Index>(s.comparison->phi.size()))
        fail("/initial/u0", "expected length " + std::to_string(s.comparison->phi.size()));
    }
  }

  if (const json* integ = find(j, "integrator")) {
    if (!integ->is_object()) fail("/integrator", "expected an object");
    if (const json* dt = find(*integ, "dt")) {
      s.integrator.dt = as_number(*dt, "/integrator/dt");
      if (!(s.integrator.dt > 0.0)) fail("/integrator/dt", "must be positive");
    }
    if (const json* t0 = find(*integ, "t0")) s.integrator.t0 = as_number(*t0, "/integrator/t0");
    if (const json* tmax = find(*integ, "tmax"))
      s.integrator.tmax = as_number(*tmax, "/integrator/tmax");
    if (!(s.integrator.tmax > s.integrator.t0))
      fail("/integrator/tmax", "must exceed t0");
    if ((s.integrator.tmax - s.integrator.t0) / s.integrator.dt > 1e8)
      fail("/integrator/dt", "grid exceeds 1e8 steps");
  }

  if (const json* ordering = find(j, "ordering")) {
    if (!ordering->is_object()) fail("/ordering", "expected an object");
    const std::string mode = as_string(require(*ordering, "mode", "/ordering"),
                                       "/ordering/mode");
    if (mode == "componentwise") {
      s.ordering_mode = comparison::OrderingMode::componentwise;
    } else if (mode == "cone") {
      s.ordering_mode = comparison::OrderingMode::cone;
      s.cone_g = as_matrix(require(*ordering, "G", "/ordering"), "/ordering/G");
    } else {
      fail("/ordering/mode", "expected \"componentwise\" or \"cone\"");
    }
  }

  if (const json* region = find(j, "region_conditions"))
    s.region_conditions = as_string_list(*region, "/region_conditions");

  if (const json* qm = find(j, "qm")) {
    if (!qm->is_object()) fail("/qm", "expected an object");
    if (const json* box = find(*qm, "box")) {
      s.qm.box = as_number(*box, "/qm/box");
      if (!(s.qm.box > 0.0)) fail("/qm/box", "must be positive");
    }
    if (const json* samples = find(*qm, "samples")) {
      if (!samples->is_number_integer() || samples->get<int>() < 1)
        fail("/qm/samples", "expected a positive integer");
      s.qm.samples = samples->get<int>();
    }
    if (const json* fx = find(*qm, "frozen_x")) {
      s.qm.frozen_x = as_vector(*fx, "/qm/frozen_x");
      if (s.qm.frozen_x->size() != s.n)
        fail("/qm/frozen_x", "expected length " + std::to_string(s.n));
    }
  }

  if (const json* output = find(j, "output")) {
    if (!output->is_object()) fail("/output", "expected an object");
    if (const json* csv = find(*output, "trajectory_csv"))
      s.output.trajectory_csv = as_string(*csv, "/output/trajectory_csv");
    if (const json* rep = find(*output, "report_json"))
      s.output.report_json = as_string(*rep, "/output/report_json");
    if (const json* man = find(*output, "manifest_json"))
      s.output.manifest_json = as_string(*man, "/output/manifest_json");
  }

  if (const json* seed = find(j, "seed")) {
    if (!seed->is_number_unsigned() && !seed->is_number_integer())
      fail("/seed", "expected an integer");
    const auto v = seed->get<std::int64_t>();
    if (v < 0) fail("/seed", "must be nonnegative");
    s.seed = static_cast<std::uint64_t>(v);
    s.seed_explicit = true;
  } else {
    s.seed = detail::env_seed_default();
  }

  // cross-field dimension checks that need several sections at once
  if (s.comparison && s.gain &&
      static_cast<Eigen::Index>(s.comparison->phi.size()) != s.gain->rows())
    fail("/comparison/phi", "expected " + std::to_string(s.gain->rows()) +
                                " components to match the rows of /norm/A");
  if (s.cone_g && s.comparison &&
      s.cone_g->cols() != static_cast<Eigen::Index>(s.comparison->phi.size()))
    fail("/ordering/G", "expected " + std::to_string(s.comparison->phi.size()) +
                            " columns to match the comparison dimension");

  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  return load_scenario(j);
}

/// Build the validated core objects a run needs. Parse errors in expression
/// strings are rethrown with their JSON path attached.
struct BuiltScenario {
  dynamics::DynamicalSystem system;
  std::optional<vnorm::NonnegativeGainMatrix> gain;
  std::optional<comparison::ComparisonSystem> comparison;
  std::optional<cone::PolyhedralCone> cone_order;
  std::vector<expr::Ast> region_conditions;
};

inline BuiltScenario build_scenario(const Scenario& s) {
  auto wrap = [](const std::string& path, auto&& fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(path, e.what());
    }
  };

  BuiltScenario built{
      wrap("/system/rhs",
           [&] { return dynamics::make_system(s.rhs, s.n, s.jacobian_mode); }),
      std::nullopt, std::nullopt, std::nullopt, {}};

  if (s.gain)
    built.gain = wrap("/norm/A", [&] { return vnorm::make_norm(*s.gain); });
  if (s.comparison) {
    built.comparison = wrap("/comparison/phi", [&] {
      return comparison::ComparisonSystem::make(
          s.comparison->phi, static_cast<int>(s.comparison->phi.size()),
          s.comparison->depends_on_state, s.n, s.comparison->affine);
    });
  }
  if (s.cone_g)
    built.cone_order = wrap("/ordering/G", [&] { return cone::make_cone(*s.cone_g); });
  const auto vars = dynamics::state_variables(s.n);
  for (std::size_t i = 0; i < s.region_conditions.size(); ++i) {
    built.region_conditions.push_back(
        wrap("/region_conditions/" + std::to_string(i), [&] {
          return expr::parse(s.region_conditions[i], vars);
        }));
  }
  return built;
}

}  // namespace veccontract::scenario
