#pragma once

// Discrete measurement procedures: positive effects m^1..m^n summing to the
// identity, equivalently positive unital maps C_n -> A. The dual map sends
// states to probability vectors on n outcomes.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/state_space.hpp"

namespace cstar {

inline constexpr double kRegularityTol = 1e-9;

class Povm {
 public:
  Povm(std::vector<Element> effects, std::vector<std::string> labels = {})
      : effects_(std::move(effects)), labels_(std::move(labels)) {
    if (effects_.empty()) throw PreconditionError("POVM needs at least one effect");
    for (const auto& e : effects_) {
      require_same_spec(effects_.front().spec(), e.spec());
      require_self_adjoint(e, kDefaultTol * std::max(1.0, norm(e)), "effect");
    }
    for (auto& e : effects_) e = hermitian_part(e);
    if (labels_.empty())
      for (std::size_t j = 0; j < effects_.size(); ++j) labels_.push_back("x" + std::to_string(j + 1));
    if (labels_.size() != effects_.size()) throw PreconditionError("POVM label count does not match effect count");
  }

  const AlgebraSpec& spec() const noexcept { return effects_.front().spec(); }
  std::size_t size() const noexcept { return effects_.size(); }
  const std::vector<Element>& effects() const noexcept { return effects_; }
  const Element& effect(std::size_t j) const { return effects_.at(j); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<Element> effects_;
  std::vector<std::string> labels_;
};

/// The trivial one-outcome measurement {𝕀}.
inline Povm trivial_povm(const AlgebraSpec& spec) { return Povm({identity(spec)}); }

/// Measurement of the delta functions on C_n (reads off the probability vector).
inline Povm identity_povm(int n) { return Povm(delta_basis(n)); }

/// Projective qubit measurement along Pauli axis k ∈ {1,2,3}: {½(σ^0+σ^k), ½(σ^0−σ^k)}.
inline Povm qubit_axis_povm(int axis) {
  return Povm({(pauli(0) + pauli(axis)) * 0.5, (pauli(0) - pauli(axis)) * 0.5}, {"+", "-"});
}

/// Projective measurement onto the eigenvectors of a self-adjoint element,
/// block by block (one rank-one effect per eigenvector).
inline Povm eigenbasis_povm(const Element& a) {
  require_self_adjoint(a, kDefaultTol * std::max(1.0, norm(a)), "eigenbasis_povm argument");
  std::vector<Element> effects;
  for (std::size_t k = 0; k < a.num_blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((a.block(k) + a.block(k).adjoint()) * 0.5);
    for (Eigen::Index i = 0; i < es.eigenvectors().cols(); ++i) {
      Element e(a.spec());
      const Eigen::VectorXcd u = es.eigenvectors().col(i);
      e.block(k) = u * u.adjoint();
      effects.push_back(e);
    }
  }
  return Povm(std::move(effects));
}

struct PovmDiagnostics {
  double min_eigenvalue;    ///< smallest eigenvalue over all effects
  double unitality_error;   ///< ‖Σ m^j − 𝕀‖
  bool passed;
};

inline PovmDiagnostics validate_povm(const Povm& p, double tol = kDefaultTol) {
  double lo = INFINITY;
  Element sum(p.spec());
  for (const auto& e : p.effects()) {
    lo = std::min(lo, min_eigenvalue(e));
    sum += e;
  }
  const double err = distance(sum, identity(p.spec()));
  return {lo, err, lo >= -tol && err <= tol};
}

/// A probability vector on n outcomes.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> p, double tol = 1e-9) : p_(std::move(p)) {
    if (p_.empty()) throw PreconditionError("empty probability vector");
    double s = 0.0;
    for (double x : p_) {
      if (x < -tol) throw PreconditionError("negative probability " + std::to_string(x));
      s += x;
    }
    if (std::abs(s - 1.0) > tol) throw PreconditionError("probabilities sum to " + std::to_string(s));
  }
  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t j) const { return p_[j]; }
  const std::vector<double>& values() const noexcept { return p_; }
  double min() const { return *std::min_element(p_.begin(), p_.end()); }
  bool is_interior(double tol = kRegularityTol) const { return min() > tol; }

 private:
  std::vector<double> p_;
};

/// p^j = ρ(m^j).
inline ProbabilityVector push_forward(const Povm& p, const State& s) {
  require_same_spec(p.spec(), s.spec());
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& e : p.effects()) out.push_back(evaluate(s, e).real());
  return ProbabilityVector(std::move(out));
}

/// Directional derivative of p^j along a tangent: ξ(m^j).
inline std::vector<double> push_forward_tangent(const Povm& p, const TangentVector& v) {
  require_same_spec(p.spec(), v.base().spec());
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& e : p.effects()) out.push_back(pairing(v.rep(), e).real());
  return out;
}

/// The positive unital lift m(f) = Σ_j f_j m^j.
inline Element lift_function(const Povm& p, const std::vector<double>& f) {
  if (f.size() != p.size())
    throw PreconditionError("lift_function: got " + std::to_string(f.size()) + " values for " +
                            std::to_string(p.size()) + " outcomes");
  Element out(p.spec());
  for (std::size_t j = 0; j < f.size(); ++j) out += p.effect(j) * f[j];
  return out;
}

/// Fisher-Rao metric Σ_j u_j v_j / p^j on the open simplex.
inline double fisher_rao(const ProbabilityVector& p, const std::vector<double>& u, const std::vector<double>& v,
                         double tol = kRegularityTol) {
  if (u.size() != p.size() || v.size() != p.size()) throw PreconditionError("fisher_rao: length mismatch");
  if (!p.is_interior(tol)) throw NonRegularError("fisher_rao: probability vector on the simplex boundary");
  double su = 0.0, sv = 0.0, g = 0.0;
  double scale = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    su += u[j];
    sv += v[j];
    scale = std::max({scale, std::abs(u[j]), std::abs(v[j])});
    g += u[j] * v[j] / p[j];
  }
  if (std::abs(su) > 1e-9 * scale || std::abs(sv) > 1e-9 * scale)
    throw PreconditionError("fisher_rao: vectors are not tangent to the simplex (components must sum to 0)");
  return g;
}

/// Minimum eigenvalue of m(f²) − m(f)²; nonnegative for positive unital maps.
inline double kadison_defect(const Povm& p, const std::vector<double>& f) {
  std::vector<double> f2(f.size());
  std::transform(f.begin(), f.end(), f2.begin(), [](double x) { return x * x; });
  const Element lf = lift_function(p, f);
  return min_eigenvalue(lift_function(p, f2) - multiply(lf, lf));
}

/// N-fold product measurement; outcomes in lexicographic order of (j_1, ..., j_N).
inline Povm tensor_power_povm(const Povm& p, int n) {
  if (n < 1) throw PreconditionError("tensor_power_povm: N must be >= 1");
  double count = std::pow(static_cast<double>(p.size()), n);
  if (count > 1e6) throw PreconditionError("tensor_power_povm: n^N exceeds 10^6 outcomes");
  std::vector<Element> effects = p.effects();
  std::vector<std::string> labels = p.labels();
  for (int r = 1; r < n; ++r) {
    std::vector<Element> next;
    std::vector<std::string> next_labels;
    next.reserve(effects.size() * p.size());
    for (std::size_t a = 0; a < effects.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b) {
        next.push_back(tensor(effects[a], p.effect(b)));
        next_labels.push_back(labels[a] + "," + p.labels()[b]);
      }
    effects = std::move(next);
    labels = std::move(next_labels);
  }
  return Povm(std::move(effects), std::move(labels));
}

}  // namespace cstar
