#pragma once

// JSON forms of every value that crosses a file boundary. Complex matrices
// are row-major lists of [re, im] pairs; nested row lists are also accepted
// on input.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "json.hpp"

#include "cstar/algebra.hpp"
#include "cstar/estimation.hpp"
#include "cstar/measurement.hpp"
#include "cstar/model.hpp"
#include "cstar/state_space.hpp"

namespace cstar::io {

using json = nlohmann::json;

/// A config object does not match its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Rounds to 15 significant digits so printed values are stable and readable.
inline double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

namespace detail {

inline const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string(where) + ": missing required field \"" + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const char* where) {
  if (!j.is_number()) throw SchemaError(std::string(where) + ": expected a number");
  return j.get<double>();
}

inline Complex complex_pair(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SchemaError("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back({round15(m(i, j).real()), round15(m(i, j).imag())});
  return out;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("matrix must be an array");
  // Nested rows: [[[re,im],...],...]
  if (!j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!j[static_cast<std::size_t>(r)].is_array() || static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != n)
        throw SchemaError("matrix rows must be square");
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = detail::complex_pair(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return m;
  }
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
  if (n * n != static_cast<Eigen::Index>(j.size()) || n == 0) throw SchemaError("flat matrix length must be a nonzero square");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = detail::complex_pair(j[static_cast<std::size_t>(r * n + c)]);
  return m;
}

inline json to_json(const RealMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(round15(m(i, j)));
    out.push_back(row);
  }
  return out;
}

inline json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round15(v(i)));
  return out;
}

inline RealVector vector_from_json(const json& j, const char* where) {
  if (!j.is_array()) throw SchemaError(std::string(where) + ": expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = detail::number(j[i], where);
  return v;
}

inline RealMatrix real_matrix_from_json(const json& j, const char* where) {
  if (!j.is_array() || j.empty()) throw SchemaError(std::string(where) + ": expected a nonempty matrix");
  const auto n = static_cast<Eigen::Index>(j.size());
  RealMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const RealVector row = vector_from_json(j[static_cast<std::size_t>(r)], where);
    if (row.size() != n) throw SchemaError(std::string(where) + ": matrix must be square");
    m.row(r) = row.transpose();
  }
  return m;
}

inline json to_json(const AlgebraSpec& spec) { return {{"block_dims", spec.block_dims()}}; }

inline AlgebraSpec spec_from_json(const json& j) {
  const json& dims = detail::require(j, "block_dims", "spec");
  if (!dims.is_array() || dims.empty()) throw SchemaError("spec.block_dims must be a nonempty array");
  std::vector<int> out;
  for (const auto& d : dims) {
    if (!d.is_number_integer() || d.get<int>() < 1) throw SchemaError("spec.block_dims entries must be positive integers");
    out.push_back(d.get<int>());
  }
  return AlgebraSpec(std::move(out));
}

inline json to_json(const Element& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) blocks.push_back(to_json(b));
  return {{"blocks", blocks}};
}

/// Parses an element; when a spec is given the blocks must conform to it.
inline Element element_from_json(const json& j, const AlgebraSpec* expected = nullptr) {
  const json& blocks = detail::require(j, "blocks", "element");
  if (!blocks.is_array() || blocks.empty()) throw SchemaError("element.blocks must be a nonempty array");
  std::vector<Matrix> mats;
  std::vector<int> dims;
  for (const auto& b : blocks) {
    mats.push_back(matrix_from_json(b));
    dims.push_back(static_cast<int>(mats.back().rows()));
  }
  AlgebraSpec spec(dims);
  if (expected && !(spec == *expected))
    throw SchemaError("element blocks " + to_string(spec) + " do not match spec " + to_string(*expected));
  return Element(spec, std::move(mats));
}

inline json to_json(const State& s) { return {{"spec", to_json(s.spec())}, {"density", to_json(s.density())}}; }

inline State state_from_json(const json& j) {
  const AlgebraSpec spec = spec_from_json(detail::require(j, "spec", "state"));
  try {
    return State(element_from_json(detail::require(j, "density", "state"), &spec));
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("state: ") + e.what());
  }
}

inline json to_json(const TangentVector& v) { return {{"base", to_json(v.base())}, {"rep", to_json(v.rep())}}; }

inline TangentVector tangent_from_json(const json& j) {
  State base = state_from_json(detail::require(j, "base", "tangent"));
  const Element rep = element_from_json(detail::require(j, "rep", "tangent"), &base.spec());
  try {
    return TangentVector(std::move(base), rep);
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("tangent: ") + e.what());
  }
}

inline json to_json(const Povm& p) {
  json effects = json::array();
  for (const auto& e : p.effects()) effects.push_back(to_json(e));
  return {{"spec", to_json(p.spec())}, {"effects", effects}, {"labels", p.labels()}};
}

inline Povm povm_from_json(const json& j) {
  const AlgebraSpec spec = spec_from_json(detail::require(j, "spec", "povm"));
  const json& effects = detail::require(j, "effects", "povm");
  if (!effects.is_array() || effects.empty()) throw SchemaError("povm.effects must be a nonempty array");
  std::vector<Element> elems;
  for (const auto& e : effects) elems.push_back(element_from_json(e, &spec));
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw SchemaError("povm.labels must be an array of strings");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw SchemaError("povm.labels must be an array of strings");
      labels.push_back(l.get<std::string>());
    }
  }
  try {
    return Povm(std::move(elems), std::move(labels));
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("povm: ") + e.what());
  }
}

inline json to_json(const Estimator& e) {
  json values = json::array();
  for (const auto& v : e.values()) values.push_back(to_json(v));
  return {{"values", values}};
}

inline Estimator estimator_from_json(const json& j) {
  const json& values = detail::require(j, "values", "estimator");
  if (!values.is_array() || values.empty()) throw SchemaError("estimator.values must be a nonempty array");
  std::vector<RealVector> out;
  for (const auto& v : values) out.push_back(vector_from_json(v, "estimator.values"));
  try {
    return Estimator(std::move(out));
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("estimator: ") + e.what());
  }
}

inline CostFunction cost_from_json(const json& j, int d) {
  const json& kind = detail::require(j, "kind", "cost");
  if (kind != "euclidean") throw SchemaError("cost.kind must be \"euclidean\"");
  if (!j.contains("weight") || j["weight"].is_null()) return CostFunction::euclidean(d);
  const RealMatrix w = real_matrix_from_json(j["weight"], "cost.weight");
  if (w.rows() != d) throw SchemaError("cost.weight dimension does not match the model");
  try {
    return CostFunction::euclidean(w);
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("cost: ") + e.what());
  }
}

inline json cost_to_json(const CostFunction& c) {
  if (!c.is_euclidean()) return {{"kind", "custom"}};
  return {{"kind", "euclidean"}, {"weight", to_json(*c.weight())}};
}

/// Builds a model from {"type": ..., "spec", "generators", "skew", "rho0", "domain"}.
inline ParametricModel model_from_json(const json& j) {
  const json& type = detail::require(j, "type", "model");
  if (!type.is_string()) throw SchemaError("model.type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "qubit_pure") return qubit_pure();
  if (t == "qubit_dephasing") return qubit_dephasing();
  if (t == "simplex_affine") {
    const AlgebraSpec spec = spec_from_json(detail::require(j, "spec", "model"));
    if (!spec.is_abelian() || spec.num_blocks() < 2) throw SchemaError("simplex_affine needs an abelian spec with n >= 2");
    return simplex_affine(static_cast<int>(spec.num_blocks()));
  }
  if (t == "lie_group") {
    const State rho0 = state_from_json(detail::require(j, "rho0", "model"));
    const json& gens = detail::require(j, "generators", "model");
    if (!gens.is_array() || gens.empty()) throw SchemaError("model.generators must be a nonempty array");
    std::vector<Element> generators;
    for (const auto& g : gens) generators.push_back(element_from_json(g, &rho0.spec()));
    bool skew = true;
    if (j.contains("skew")) {
      if (!j["skew"].is_boolean()) throw SchemaError("model.skew must be a boolean");
      skew = j["skew"].get<bool>();
    }
    std::vector<Interval> domain;
    if (j.contains("domain")) {
      if (!j["domain"].is_array()) throw SchemaError("model.domain must be an array of [lo, hi]");
      for (const auto& iv : j["domain"]) {
        if (!iv.is_array() || iv.size() != 2) throw SchemaError("model.domain entries must be [lo, hi]");
        auto bound = [](const json& b, double dflt) { return b.is_null() ? dflt : detail::number(b, "model.domain"); };
        domain.push_back({bound(iv[0], -INFINITY), bound(iv[1], INFINITY)});
      }
    }
    try {
      return lie_group_model(std::move(generators), rho0, skew, std::move(domain));
    } catch (const PreconditionError& e) {
      throw SchemaError(std::string("model: ") + e.what());
    }
  }
  throw SchemaError("unknown model type \"" + t + "\"");
}

inline json to_json(const BoundReport& r) {
  json out;
  out["point"] = to_json(r.point);
  out["rounds"] = r.rounds;
  if (r.hessian) out["hessian"] = to_json(*r.hessian);
  if (r.covariance) out["covariance"] = to_json(*r.covariance);
  out["classical_metric"] = to_json(r.classical_metric);
  if (r.quantum_metric) out["quantum_metric"] = to_json(*r.quantum_metric);
  auto opt = [](const std::optional<double>& x) { return x ? json(round15(*x)) : json(nullptr); };
  out["stationarity_residual"] = opt(r.stationarity_residual);
  out["cramer_rao_min_eigenvalue"] = opt(r.cramer_rao_min_eigenvalue);
  out["helstrom_min_eigenvalue"] = opt(r.helstrom_min_eigenvalue);
  out["metric_gap_min_eigenvalue"] = opt(r.metric_gap_min_eigenvalue);
  out["metric_gap_max_eigenvalue"] = opt(r.metric_gap_max_eigenvalue);
  out["classical_singular"] = r.classical_singular;
  json gaps = json::array();
  for (const auto& g : r.gaps)
    gaps.push_back({{"covector", to_json(g.covector)},
                    {"cramer_rao", opt(g.cramer_rao)},
                    {"helstrom", opt(g.helstrom)},
                    {"round_floor", opt(g.round_floor)}});
  out["gaps"] = gaps;
  out["passed"] = r.passed;
  return out;
}

}  // namespace cstar::io
