#pragma once

// Parametric models of states: a chart domain in R^d mapped smoothly into
// one orbit of the state space, plus the pulled-back quantum metric G^M and
// the classical Fisher-Rao metric G^Mc induced by a measurement.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/measurement.hpp"
#include "cstar/state_space.hpp"

namespace cstar {

using ModelPoint = RealVector;

/// Open interval (lo, hi); infinite endpoints allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
};

class ParametricModel {
 public:
  using DensityMap = std::function<Element(const RealVector&)>;
  /// Analytic ∂ρ̂/∂θ_r, when known.
  using PartialMap = std::function<Element(const RealVector&, int)>;
  /// Extra domain condition beyond the per-coordinate intervals.
  using Constraint = std::function<bool(const RealVector&)>;

  ParametricModel(std::string name, AlgebraSpec spec, std::vector<Interval> domain, DensityMap map,
                  PartialMap partial = {}, Constraint constraint = {})
      : name_(std::move(name)),
        spec_(std::move(spec)),
        domain_(std::move(domain)),
        map_(std::move(map)),
        partial_(std::move(partial)),
        constraint_(std::move(constraint)) {
    if (domain_.empty()) throw PreconditionError("model needs at least one parameter");
  }

  const std::string& name() const noexcept { return name_; }
  const AlgebraSpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return static_cast<int>(domain_.size()); }
  const std::vector<Interval>& domain() const noexcept { return domain_; }

  bool contains(const RealVector& theta) const {
    if (theta.size() != dim()) return false;
    for (int r = 0; r < dim(); ++r)
      if (!domain_[static_cast<std::size_t>(r)].contains(theta(r))) return false;
    return !constraint_ || constraint_(theta);
  }

  /// Density at θ with no domain check.
  Element density(const RealVector& theta) const { return map_(theta); }
  bool has_analytic_partial() const noexcept { return static_cast<bool>(partial_); }
  Element analytic_partial(const RealVector& theta, int r) const { return partial_(theta, r); }

  /// Number of tensor rounds (1 unless built by multi_round).
  int rounds() const noexcept { return rounds_; }
  /// The single-round model a multi-round model was built from, or nullptr.
  const std::shared_ptr<const ParametricModel>& base() const noexcept { return base_; }

 private:
  friend ParametricModel multi_round(const ParametricModel&, int);

  std::string name_;
  AlgebraSpec spec_;
  std::vector<Interval> domain_;
  DensityMap map_;
  PartialMap partial_;
  Constraint constraint_;
  int rounds_ = 1;
  std::shared_ptr<const ParametricModel> base_;
};

enum class Differencing { automatic, numerical };

inline void require_in_domain(const ParametricModel& model, const RealVector& theta) {
  if (theta.size() != model.dim())
    throw PreconditionError("model " + model.name() + " expects " + std::to_string(model.dim()) +
                            " parameters, got " + std::to_string(theta.size()));
  if (!model.contains(theta)) throw DomainError("point outside the domain of model " + model.name());
}

inline State state_at(const ParametricModel& model, const RealVector& theta) {
  require_in_domain(model, theta);
  return State(model.density(theta));
}

/// Central-difference step for coordinate r: 1e-5·max(1, |θ_r|).
inline double fd_step(const RealVector& theta, int r) { return 1e-5 * std::max(1.0, std::abs(theta(r))); }

/// ∂ρ̂/∂θ_r: analytic when the model provides it, central differences otherwise.
inline Element partial_derivative(const ParametricModel& model, const RealVector& theta, int r,
                                  Differencing mode = Differencing::automatic) {
  require_in_domain(model, theta);
  if (r < 0 || r >= model.dim()) throw PreconditionError("coordinate index out of range");
  if (mode == Differencing::automatic && model.has_analytic_partial()) return model.analytic_partial(theta, r);
  const double h = fd_step(theta, r);
  RealVector plus = theta, minus = theta;
  plus(r) += h;
  minus(r) -= h;
  if (!model.contains(plus) || !model.contains(minus))
    throw DomainError("finite-difference stencil leaves the domain of model " + model.name());
  return (model.density(plus) - model.density(minus)) / (2.0 * h);
}

/// T_θ j(dir) as a tangent vector at j(θ).
inline TangentVector tangent_push(const ParametricModel& model, const RealVector& theta, const RealVector& dir,
                                  Differencing mode = Differencing::automatic) {
  const State s = state_at(model, theta);
  if (dir.size() != model.dim()) throw PreconditionError("direction has wrong dimension");
  Element rep(model.spec());
  for (int r = 0; r < model.dim(); ++r)
    if (dir(r) != 0.0) rep += partial_derivative(model, theta, r, mode) * dir(r);
  return TangentVector(s, rep);
}

inline RealVector unit_vector(int d, int r) {
  RealVector e = RealVector::Zero(d);
  e(r) = 1.0;
  return e;
}

inline SldResult sld(const ParametricModel& model, const RealVector& theta, const RealVector& dir) {
  const TangentVector v = tangent_push(model, theta, dir);
  return sld_at_state(v.base(), v);
}

/// G^M_rs = G(T j(e_r), T j(e_s)).
inline RealMatrix quantum_metric(const ParametricModel& model, const RealVector& theta,
                                 Differencing mode = Differencing::automatic) {
  const int d = model.dim();
  std::vector<TangentVector> tangents;
  std::vector<Element> slds;
  for (int r = 0; r < d; ++r) {
    tangents.push_back(tangent_push(model, theta, unit_vector(d, r), mode));
    slds.push_back(sld_at_state(tangents.back().base(), tangents.back()).sld);
  }
  RealMatrix g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = pairing(tangents[static_cast<std::size_t>(r)].rep(), slds[static_cast<std::size_t>(c)]).real();
  return (g + g.transpose()) * 0.5;
}

/// G^Mc_rs = Σ_j ∂_r p^j ∂_s p^j / p^j for the statistical model induced by the POVM.
inline RealMatrix classical_metric(const ParametricModel& model, const Povm& povm, const RealVector& theta,
                                   double tol = kRegularityTol, Differencing mode = Differencing::automatic) {
  require_same_spec(model.spec(), povm.spec());
  const int d = model.dim();
  const State s = state_at(model, theta);
  const ProbabilityVector p = push_forward(povm, s);
  if (!p.is_interior(tol))
    throw NonRegularError("measurement is not regular at this point (min probability " + std::to_string(p.min()) + ")");
  std::vector<std::vector<double>> dp;
  for (int r = 0; r < d; ++r) dp.push_back(push_forward_tangent(povm, tangent_push(model, theta, unit_vector(d, r), mode)));
  RealMatrix g = RealMatrix::Zero(d, d);
  for (std::size_t j = 0; j < p.size(); ++j)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        g(r, c) += dp[static_cast<std::size_t>(r)][j] * dp[static_cast<std::size_t>(c)][j] / p[j];
  return (g + g.transpose()) * 0.5;
}

struct RegularityReport {
  bool regular;
  RealVector worst_point;
  double min_prob;
};

inline RegularityReport is_regular(const Povm& povm, const ParametricModel& model, const std::vector<RealVector>& grid,
                                   double tol = kRegularityTol) {
  if (grid.empty()) throw PreconditionError("is_regular: empty grid");
  RegularityReport rep{true, grid.front(), INFINITY};
  for (const auto& theta : grid) {
    const double m = push_forward(povm, state_at(model, theta)).min();
    if (m < rep.min_prob) {
      rep.min_prob = m;
      rep.worst_point = theta;
    }
  }
  rep.regular = rep.min_prob > tol;
  return rep;
}

// --- built-in models -------------------------------------------------------

/// ρ_γ = ½(σ^0 + cos γ σ^1 − sin γ σ^2) on the pure-state orbit of a qubit, γ ∈ R.
inline ParametricModel qubit_pure() {
  return ParametricModel(
      "qubit_pure", AlgebraSpec::full(2), {Interval{}},
      [](const RealVector& t) {
        return (pauli(0) + pauli(1) * std::cos(t(0)) - pauli(2) * std::sin(t(0))) * 0.5;
      },
      [](const RealVector& t, int) { return (pauli(1) * (-std::sin(t(0))) - pauli(2) * std::cos(t(0))) * 0.5; });
}

/// ρ_{γ,ζ} = ½(σ^0 + e^{−ζγ}(cos γ σ^1 − sin γ σ^2)), γ, ζ > 0: a dephasing qubit.
inline ParametricModel qubit_dephasing() {
  return ParametricModel(
      "qubit_dephasing", AlgebraSpec::full(2), {Interval{0.0, INFINITY}, Interval{0.0, INFINITY}},
      [](const RealVector& t) {
        const double g = t(0), z = t(1), e = std::exp(-z * g);
        return (pauli(0) + (pauli(1) * std::cos(g) - pauli(2) * std::sin(g)) * e) * 0.5;
      },
      [](const RealVector& t, int r) {
        const double g = t(0), z = t(1), e = std::exp(-z * g);
        if (r == 0)
          return (pauli(1) * (-z * std::cos(g) - std::sin(g)) + pauli(2) * (z * std::sin(g) - std::cos(g))) * (0.5 * e);
        return (pauli(1) * std::cos(g) - pauli(2) * std::sin(g)) * (-0.5 * g * e);
      });
}

/// The full open simplex of C_n in affine coordinates p^1..p^{n−1}; p^n = 1 − Σ p^r.
inline ParametricModel simplex_affine(int n) {
  if (n < 2) throw PreconditionError("simplex_affine needs n >= 2");
  const AlgebraSpec spec = AlgebraSpec::abelian(n);
  return ParametricModel(
      "simplex_affine", spec, std::vector<Interval>(static_cast<std::size_t>(n - 1), Interval{0.0, 1.0}),
      [n](const RealVector& t) {
        std::vector<Complex> p(static_cast<std::size_t>(n));
        for (int r = 0; r < n - 1; ++r) p[static_cast<std::size_t>(r)] = t(r);
        p.back() = 1.0 - t.sum();
        return Element::diagonal(p);
      },
      [n](const RealVector&, int r) {
        std::vector<Complex> p(static_cast<std::size_t>(n), 0.0);
        p[static_cast<std::size_t>(r)] = 1.0;
        p.back() = -1.0;
        return Element::diagonal(p);
      },
      [](const RealVector& t) { return t.sum() < 1.0; });
}

/// exp(i·h) for skew, exp(h) otherwise, for self-adjoint h, via eigendecomposition per block.
inline Element exp_self_adjoint(const Element& h, bool skew) {
  Element out(h.spec());
  for (std::size_t k = 0; k < h.num_blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((h.block(k) + h.block(k).adjoint()) * 0.5);
    Eigen::VectorXcd f(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
      f(i) = skew ? std::exp(kI * es.eigenvalues()(i)) : Complex(std::exp(es.eigenvalues()(i)));
    out.block(k) = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  }
  return out;
}

/// j(θ) = Φ(exp(Σ_r θ_r g_r'), ρ0) with g_r' = i·g_r when skew (unitary subgroups), g_r otherwise.
inline ParametricModel lie_group_model(std::vector<Element> generators, const State& rho0, bool skew,
                                       std::vector<Interval> domain = {}) {
  if (generators.empty()) throw PreconditionError("lie_group_model needs at least one generator");
  for (const auto& g : generators) {
    require_same_spec(rho0.spec(), g.spec());
    require_self_adjoint(g, kDefaultTol * std::max(1.0, norm(g)), "generator");
  }
  if (domain.empty()) domain.assign(generators.size(), Interval{});
  if (domain.size() != generators.size()) throw PreconditionError("domain size does not match generator count");
  return ParametricModel(
      "lie_group", rho0.spec(), std::move(domain), [generators = std::move(generators), rho0, skew](const RealVector& t) {
        Element h(rho0.spec());
        for (std::size_t r = 0; r < generators.size(); ++r) h += generators[r] * t(static_cast<Eigen::Index>(r));
        return group_action(exp_self_adjoint(h, skew), rho0).density();
      });
}

/// j^N(θ) = ρ_θ^{⊗N}. Its quantum metric is N times the base metric.
inline ParametricModel multi_round(const ParametricModel& model, int n) {
  if (n < 1) throw PreconditionError("multi_round: N must be >= 1");
  const AlgebraSpec& spec = model.spec();
  if (spec.num_blocks() != 1 && !spec.is_abelian())
    throw PreconditionError("multi_round supports single-block or abelian algebras only");
  if (2.0 * std::pow(static_cast<double>(spec.hilbert_dim()), n) > 4096.0)
    throw PreconditionError("multi_round: tensor dimension guard exceeded (2·n^N > 4096)");
  auto base = std::make_shared<const ParametricModel>(model);
  auto map = [base, n](const RealVector& t) {
    return tensor_elements(std::vector<Element>(static_cast<std::size_t>(n), base->density(t)));
  };
  // Product rule, one factor differentiated at a time.
  auto partial = [base, n](const RealVector& t, int r) {
    const Element rho = base->density(t);
    const Element d = partial_derivative(*base, t, r);
    Element out(tensor_power(base->spec(), n));
    for (int i = 0; i < n; ++i) {
      std::vector<Element> factors(static_cast<std::size_t>(n), rho);
      factors[static_cast<std::size_t>(i)] = d;
      out += tensor_elements(factors);
    }
    return out;
  };
  auto contains = [base](const RealVector& t) { return base->contains(t); };
  ParametricModel out(model.name() + "^" + std::to_string(n), tensor_power(spec, n), model.domain(), map, partial,
                      contains);
  out.rounds_ = model.rounds() * n;
  out.base_ = model.base() ? model.base() : base;
  return out;
}

}  // namespace cstar
