#pragma once

// Command-line front end. run_cli() takes argv-style arguments and two
// streams so it can be driven in-process by tests; main() just forwards.
//
// Exit codes: 0 ok, 1 failed check/bound, 2 schema, 3 domain,
// 4 numerical failure, 5 non-stationary estimator.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cstar/check_suite.hpp"
#include "cstar/estimation.hpp"
#include "cstar/io.hpp"
#include "cstar/measurement.hpp"
#include "cstar/model.hpp"

namespace cstar::cli {

using json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,
  kSchema = 2,
  kDomain = 3,
  kNumerical = 4,
  kNonStationary = 5,
};

struct Options {
  std::string config_path;
  std::string point;
  std::string grid;
  std::string direction;
  std::string kind = "quantum";
  int rounds = 1;
  unsigned long long seed = 42;
  int trials = 200;
  double tol = kRegularityTol;
  std::string out_path;
  bool inject_faulty_povm = false;
};

inline std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw io::SchemaError(std::string(flag) + ": cannot parse number \"" + item + "\"");
    }
  }
  if (out.empty()) throw io::SchemaError(std::string(flag) + ": empty list");
  return out;
}

inline RealVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// "lo:hi:n" per axis, axes separated by ';'. Returns the Cartesian product, first axis major.
inline std::vector<RealVector> parse_grid(const std::string& text) {
  std::vector<std::vector<double>> axes;
  std::stringstream ss(text);
  std::string axis;
  while (std::getline(ss, axis, ';')) {
    std::vector<double> parts;
    std::stringstream as(axis);
    std::string tok;
    while (std::getline(as, tok, ':')) parts.push_back(parse_list(tok, "--grid").front());
    if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2]))
      throw io::SchemaError("--grid: each axis must be lo:hi:count with count >= 1");
    const int n = static_cast<int>(parts[2]);
    std::vector<double> values;
    for (int i = 0; i < n; ++i) values.push_back(n == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * i / (n - 1));
    axes.push_back(values);
  }
  if (axes.empty()) throw io::SchemaError("--grid: empty grid");
  std::vector<RealVector> points{RealVector(0)};
  for (const auto& values : axes) {
    std::vector<RealVector> next;
    for (const auto& p : points)
      for (double v : values) {
        RealVector q(p.size() + 1);
        q << p, v;
        next.push_back(q);
      }
    points = std::move(next);
  }
  return points;
}

inline json load_config(const std::string& path) {
  if (path.empty()) throw io::SchemaError("--config is required");
  std::ifstream in(path);
  if (!in) throw io::SchemaError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw io::SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
}

inline ParametricModel model_of(const json& config) {
  if (!config.is_object() || !config.contains("model")) throw io::SchemaError("config: missing required field \"model\"");
  return io::model_from_json(config["model"]);
}

/// Points from --point, then --grid, then config "points".
inline std::vector<RealVector> points_of(const Options& o, const json& config) {
  if (!o.point.empty()) return {to_vector(parse_list(o.point, "--point"))};
  if (!o.grid.empty()) return parse_grid(o.grid);
  if (config.contains("points")) {
    std::vector<RealVector> out;
    for (const auto& p : config["points"]) out.push_back(io::vector_from_json(p, "points"));
    if (!out.empty()) return out;
  }
  throw io::SchemaError("no parameter point given (use --point, --grid or config \"points\")");
}

inline RealVector single_point(const Options& o, const json& config) {
  const auto pts = points_of(o, config);
  if (pts.size() != 1) throw io::SchemaError("this command takes exactly one point");
  return pts.front();
}

inline RealVector direction_of(const Options& o, const json& config) {
  if (!o.direction.empty()) return to_vector(parse_list(o.direction, "--direction"));
  if (config.contains("direction")) return io::vector_from_json(config["direction"], "direction");
  throw io::SchemaError("no direction given (use --direction or config \"direction\")");
}

inline void check_dim(const ParametricModel& m, const RealVector& v, const char* what) {
  if (v.size() != m.dim())
    throw io::SchemaError(std::string(what) + " has " + std::to_string(v.size()) + " components, model " + m.name() +
                          " has dimension " + std::to_string(m.dim()));
}

inline json cmd_metric(const Options& o) {
  const json config = load_config(o.config_path);
  const ParametricModel model = model_of(config);
  if (o.kind != "quantum" && o.kind != "classical") throw io::SchemaError("--kind must be quantum or classical");
  std::optional<Povm> povm;
  if (o.kind == "classical") {
    if (!config.contains("povm")) throw io::SchemaError("classical metric needs a \"povm\" in the config");
    povm = io::povm_from_json(config["povm"]);
  }
  json results = json::array();
  for (const auto& theta : points_of(o, config)) {
    check_dim(model, theta, "point");
    const RealMatrix g = povm ? classical_metric(model, *povm, theta, o.tol) : quantum_metric(model, theta);
    results.push_back({{"point", io::to_json(theta)}, {"matrix", io::to_json(g)}});
  }
  return {{"command", "metric"}, {"model", model.name()}, {"kind", o.kind}, {"results", results}};
}

inline json cmd_sld(const Options& o) {
  const json config = load_config(o.config_path);
  // A raw tangent can be given instead of a model direction.
  if (config.contains("tangent")) {
    const TangentVector v = io::tangent_from_json(config["tangent"]);
    const SldResult r = sld_at_state(v.base(), v);
    json out{{"command", "sld"}, {"sld", io::to_json(r.sld)}, {"gauge_dim", r.gauge_dim},
             {"residual", io::round15(r.residual)}};
    if (frobenius_norm(v.rep()) == 0.0) out["note"] = "zero tangent";
    return out;
  }
  const ParametricModel model = model_of(config);
  const RealVector theta = single_point(o, config);
  const RealVector dir = direction_of(o, config);
  check_dim(model, theta, "point");
  check_dim(model, dir, "direction");
  const SldResult r = sld(model, theta, dir);
  json out{{"command", "sld"},
           {"model", model.name()},
           {"point", io::to_json(theta)},
           {"direction", io::to_json(dir)},
           {"sld", io::to_json(r.sld)},
           {"gauge_dim", r.gauge_dim},
           {"residual", io::round15(r.residual)}};
  if (dir.isZero()) out["note"] = "zero tangent";
  return out;
}

inline json cmd_geodesic(const Options& o) {
  const json config = load_config(o.config_path);
  const ParametricModel model = model_of(config);
  // --grid carries the times here, not parameter points.
  Options at = o;
  at.grid.clear();
  const RealVector theta = single_point(at, config);
  const RealVector dir = direction_of(o, config);
  check_dim(model, theta, "point");
  check_dim(model, dir, "direction");
  std::vector<double> times;
  if (!o.grid.empty()) {
    for (const auto& t : parse_grid(o.grid)) {
      if (t.size() != 1) throw io::SchemaError("geodesic --grid must be one axis of times");
      times.push_back(t(0));
    }
  } else if (config.contains("times")) {
    for (const auto& t : config["times"]) {
      if (!t.is_number()) throw io::SchemaError("times must be numbers");
      times.push_back(t.get<double>());
    }
  } else {
    throw io::SchemaError("geodesic needs times (use --grid lo:hi:count or config \"times\")");
  }
  const TangentVector v = tangent_push(model, theta, dir);
  json states = json::array();
  for (double t : times) {
    const State nu = geodesic(v.base(), v, t);
    states.push_back({{"t", io::round15(t)}, {"density", io::to_json(nu.density())}, {"orbit_signature", orbit_signature(nu)}});
  }
  return {{"command", "geodesic"},
          {"model", model.name()},
          {"point", io::to_json(theta)},
          {"direction", io::to_json(dir)},
          {"speed", io::round15(speed(v.base(), v))},
          {"states", states}};
}

inline json cmd_bounds(const Options& o, bool& passed) {
  const json config = load_config(o.config_path);
  ParametricModel model = model_of(config);
  if (!config.contains("povm")) throw io::SchemaError("bounds needs a \"povm\" in the config");
  Povm povm = io::povm_from_json(config["povm"]);
  int rounds = o.rounds;
  if (rounds == 1 && config.contains("rounds")) rounds = config["rounds"].get<int>();
  if (rounds < 1) throw io::SchemaError("--rounds must be >= 1");
  const RealVector theta = single_point(o, config);
  check_dim(model, theta, "point");
  if (rounds > 1) {
    model = multi_round(model, rounds);
    povm = tensor_power_povm(povm, rounds);
  }
  std::vector<RealVector> covectors;
  if (config.contains("covectors"))
    for (const auto& c : config["covectors"]) covectors.push_back(io::vector_from_json(c, "covectors"));
  if (covectors.empty())
    for (int r = 0; r < model.dim(); ++r) covectors.push_back(unit_vector(model.dim(), r));
  BoundReport rep;
  if (config.contains("estimator")) {
    Estimator est = io::estimator_from_json(config["estimator"]);
    if (rounds > 1 && est.size() != povm.size()) est = averaged_estimator(est, rounds);
    const CostFunction cost =
        config.contains("cost") ? io::cost_from_json(config["cost"], model.dim()) : CostFunction::euclidean(model.dim());
    rep = helstrom_check(model, povm, cost, est, theta, covectors);
  } else {
    rep = metric_chain(model, povm, theta, covectors);
  }
  passed = rep.passed;
  return {{"command", "bounds"},
          {"model", model.name()},
          {"report", io::to_json(rep)},
          {"summary", rep.passed ? "PASS" : "FAIL"}};
}

inline json cmd_check(const Options& o, bool& passed) {
  if (o.trials < 1) throw io::SchemaError("--trials must be >= 1");
  const CheckReport rep = run_checks({o.seed, o.trials, o.inject_faulty_povm});
  json items = json::array();
  for (const auto& r : rep.results)
    items.push_back({{"name", r.name},
                     {"trials", r.trials},
                     {"worst", io::round15(r.worst)},
                     {"threshold", r.threshold},
                     {"kind", r.lower_bound ? "lower_bound" : "upper_bound"},
                     {"passed", r.passed}});
  passed = rep.passed();
  json failed = json::array();
  for (const auto& r : rep.results)
    if (!r.passed) failed.push_back(r.name);
  return {{"command", "check"}, {"seed", rep.seed}, {"trials", o.trials}, {"invariants", items},
          {"failed", failed}, {"passed", passed}};
}

inline void print_error(std::ostream& err, const std::string& kind, const std::string& msg, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = msg;
  err << extra.dump() << "\n";
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimation theory on finite-dimensional C*-algebras"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Config file (JSON)");
    sub->add_option("--point", o.point, "Parameter point v1,v2,...");
    sub->add_option("--grid", o.grid, "Grid lo:hi:count per axis, axes separated by ';'");
    sub->add_option("--direction", o.direction, "Tangent direction v1,v2,...");
    sub->add_option("--tol", o.tol, "Regularity tolerance on probabilities");
    sub->add_option("--out", o.out_path, "Write the report to this file instead of stdout");
  };
  auto* metric_cmd = app.add_subcommand("metric", "Quantum or classical pullback metric");
  add_common(metric_cmd);
  metric_cmd->add_option("--kind", o.kind, "quantum|classical");
  auto* sld_cmd = app.add_subcommand("sld", "Symmetric logarithmic derivative");
  add_common(sld_cmd);
  auto* geo_cmd = app.add_subcommand("geodesic", "Geodesic of the canonical metric");
  add_common(geo_cmd);
  auto* bounds_cmd = app.add_subcommand("bounds", "Cramer-Rao and Helstrom bound report");
  add_common(bounds_cmd);
  bounds_cmd->add_option("--rounds", o.rounds, "Number of measurement rounds N");
  auto* check_cmd = app.add_subcommand("check", "Seeded invariant suite");
  check_cmd->add_option("--seed", o.seed, "Random seed");
  check_cmd->add_option("--trials", o.trials, "Trials per randomized invariant");
  check_cmd->add_flag("--inject-faulty-povm", o.inject_faulty_povm, "Add a non-positive POVM (negative control)");
  check_cmd->add_option("--out", o.out_path, "Write the report to this file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kSchema;
  }

  try {
    bool passed = true;
    json report;
    if (*metric_cmd) report = cmd_metric(o);
    else if (*sld_cmd) report = cmd_sld(o);
    else if (*geo_cmd) report = cmd_geodesic(o);
    else if (*bounds_cmd) report = cmd_bounds(o, passed);
    else report = cmd_check(o, passed);
    const std::string text = report.dump(2) + "\n";
    if (o.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(o.out_path);
      if (!f) {
        print_error(err, "io", "cannot write " + o.out_path);
        return kSchema;
      }
      f << text;
    }
    return passed ? kOk : kFailed;
  } catch (const io::SchemaError& e) {
    print_error(err, "schema", e.what());
    return kSchema;
  } catch (const SpecMismatchError& e) {
    print_error(err, "schema", e.what());
    return kSchema;
  } catch (const PreconditionError& e) {
    print_error(err, "schema", e.what());
    return kSchema;
  } catch (const DomainError& e) {
    print_error(err, "domain", e.what());
    return kDomain;
  } catch (const UnsolvableSldError& e) {
    print_error(err, "numerical", e.what(), {{"residual", e.residual()}});
    return kNumerical;
  } catch (const NumericalError& e) {
    print_error(err, "numerical", e.what());
    return kNumerical;
  } catch (const NonStationaryError& e) {
    print_error(err, "non_stationary", e.what(), {{"residual", e.residual()}});
    return kNonStationary;
  } catch (const json::exception& e) {
    print_error(err, "schema", e.what());
    return kSchema;
  }
}

}  // namespace cstar::cli
