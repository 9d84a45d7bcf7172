#pragma once

// Estimation on top of a parametric model and a measurement: cost
// functions, estimators, the loss functional L(m1, m2), stationarity, the
// Hessian form H⋆ and covariance bivector, and numerical verification of
// the Cramer-Rao and Helstrom bounds.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cstar/measurement.hpp"
#include "cstar/model.hpp"

namespace cstar {

inline constexpr double kStationarityTol = 1e-6;
inline constexpr double kBoundSlack = -1e-8;
inline constexpr double kMaxCondition = 1e8;

/// C(m1, m2) ≥ 0 with C(m, m) = 0. Either Euclidean in the chart,
/// ½ (m1−m2)ᵀ W (m1−m2), or a user-supplied smooth function.
class CostFunction {
 public:
  using Value = std::function<double(const RealVector&, const RealVector&)>;
  /// Gradient in the first slot.
  using Gradient = std::function<RealVector(const RealVector&, const RealVector&)>;

  static CostFunction euclidean(int d) { return euclidean(RealMatrix::Identity(d, d)); }
  static CostFunction euclidean(const RealMatrix& weight) {
    if (weight.rows() != weight.cols()) throw PreconditionError("cost weight must be square");
    if ((weight - weight.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("cost weight must be symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(weight);
    if (es.eigenvalues().minCoeff() <= 0.0) throw PreconditionError("cost weight must be positive definite");
    CostFunction c;
    c.weight_ = weight;
    return c;
  }
  static CostFunction custom(Value value, Gradient gradient = {}) {
    CostFunction c;
    c.value_ = std::move(value);
    c.gradient_ = std::move(gradient);
    return c;
  }

  bool is_euclidean() const noexcept { return weight_.has_value(); }
  const std::optional<RealMatrix>& weight() const noexcept { return weight_; }

  double operator()(const RealVector& m1, const RealVector& m2) const {
    if (weight_) {
      const RealVector d = m1 - m2;
      return 0.5 * scale_ * d.dot(*weight_ * d);
    }
    return scale_ * value_(m1, m2);
  }

  /// ∂C/∂m1 at (m1, m2): analytic for Euclidean or when supplied, central differences (h = 1e-5) otherwise.
  RealVector gradient_first(const RealVector& m1, const RealVector& m2) const {
    if (weight_) return scale_ * (*weight_ * (m1 - m2));
    if (gradient_) return scale_ * gradient_(m1, m2);
    RealVector g(m1.size());
    for (Eigen::Index r = 0; r < m1.size(); ++r) {
      const double h = 1e-5 * std::max(1.0, std::abs(m1(r)));
      RealVector p = m1, q = m1;
      p(r) += h;
      q(r) -= h;
      g(r) = scale_ * (value_(p, m2) - value_(q, m2)) / (2.0 * h);
    }
    return g;
  }

  /// λ·C.
  CostFunction scaled(double lambda) const {
    CostFunction c = *this;
    c.scale_ *= lambda;
    return c;
  }

 private:
  CostFunction() = default;
  std::optional<RealMatrix> weight_;
  Value value_;
  Gradient gradient_;
  double scale_ = 1.0;
};

/// Outcome j ↦ 𝓔_j ∈ R^d. Values may sit on the closure of the chart domain.
class Estimator {
 public:
  explicit Estimator(std::vector<RealVector> values) : values_(std::move(values)) {
    if (values_.empty()) throw PreconditionError("estimator needs at least one value");
    const auto d = values_.front().size();
    bool distinct = false;
    for (const auto& v : values_) {
      if (v.size() != d) throw PreconditionError("estimator values have inconsistent dimensions");
      if (v != values_.front()) distinct = true;
    }
    if (!distinct) throw PreconditionError("estimator is constant; only non-constant estimators are admitted");
  }

  /// One-dimensional convenience constructor.
  static Estimator scalar(const std::vector<double>& values) {
    std::vector<RealVector> v;
    for (double x : values) v.push_back(RealVector::Constant(1, x));
    return Estimator(std::move(v));
  }

  std::size_t size() const noexcept { return values_.size(); }
  int dim() const noexcept { return static_cast<int>(values_.front().size()); }
  const RealVector& operator[](std::size_t j) const { return values_[j]; }
  const std::vector<RealVector>& values() const noexcept { return values_; }

 private:
  std::vector<RealVector> values_;
};

/// N-round estimator taking the sample mean of the single-round values,
/// outcomes ordered like tensor_power_povm.
inline Estimator averaged_estimator(const Estimator& est, int rounds) {
  if (rounds < 1) throw PreconditionError("averaged_estimator: N must be >= 1");
  std::vector<RealVector> sums = est.values();
  for (int r = 1; r < rounds; ++r) {
    std::vector<RealVector> next;
    next.reserve(sums.size() * est.size());
    for (const auto& s : sums)
      for (const auto& v : est.values()) next.push_back(s + v);
    sums = std::move(next);
  }
  for (auto& s : sums) s /= static_cast<double>(rounds);
  return Estimator(std::move(sums));
}

namespace detail {

inline void check_shapes(const ParametricModel& model, const Povm& povm, const Estimator& est) {
  require_same_spec(model.spec(), povm.spec());
  if (est.size() != povm.size())
    throw PreconditionError("estimator has " + std::to_string(est.size()) + " values for " +
                            std::to_string(povm.size()) + " outcomes");
  if (est.dim() != model.dim()) throw PreconditionError("estimator dimension does not match the model");
}

inline ProbabilityVector regular_probabilities(const ParametricModel& model, const Povm& povm, const RealVector& theta) {
  const ProbabilityVector p = push_forward(povm, state_at(model, theta));
  if (!p.is_interior())
    throw NonRegularError("measurement is not regular at this point (min probability " + std::to_string(p.min()) + ")");
  return p;
}

}  // namespace detail

/// L(m1, m2) = Σ_j C(m1, 𝓔_j) p^j(m2).
inline double loss(const ParametricModel& model, const Povm& povm, const CostFunction& cost, const Estimator& est,
                   const RealVector& m1, const RealVector& m2) {
  detail::check_shapes(model, povm, est);
  const ProbabilityVector p = detail::regular_probabilities(model, povm, m2);
  double l = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) l += cost(m1, est[j]) * p[j];
  return l;
}

/// 𝓜_{m1} = Σ_j C(m1, 𝓔_j) m^j, so that L(m1, m2) = ρ_{m2}(𝓜_{m1}).
inline Element cost_element(const Povm& povm, const CostFunction& cost, const Estimator& est, const RealVector& m1) {
  if (est.size() != povm.size()) throw PreconditionError("estimator size does not match the POVM");
  Element out(povm.spec());
  for (std::size_t j = 0; j < povm.size(); ++j) out += povm.effect(j) * cost(m1, est[j]);
  return out;
}

/// Gradient of L⋆(m) = L(m, θ⋆) at m = θ⋆. For Euclidean cost this is W(θ⋆ − E[𝓔]).
inline RealVector stationarity_residual(const ParametricModel& model, const Povm& povm, const CostFunction& cost,
                                        const Estimator& est, const RealVector& theta) {
  detail::check_shapes(model, povm, est);
  const ProbabilityVector p = detail::regular_probabilities(model, povm, theta);
  RealVector g = RealVector::Zero(model.dim());
  for (std::size_t j = 0; j < p.size(); ++j) g += cost.gradient_first(theta, est[j]) * p[j];
  return g;
}

/// Hessian of m ↦ Σ_j C(m, 𝓔_j) p^j for fixed probabilities, by central
/// differences of the first-slot gradient, symmetrized.
inline RealMatrix loss_hessian(const CostFunction& cost, const Estimator& est, const std::vector<double>& probs,
                               const RealVector& theta) {
  const int d = static_cast<int>(theta.size());
  auto grad = [&](const RealVector& m) {
    RealVector g = RealVector::Zero(d);
    for (std::size_t j = 0; j < probs.size(); ++j) g += cost.gradient_first(m, est[j]) * probs[j];
    return g;
  };
  RealMatrix h(d, d);
  for (int r = 0; r < d; ++r) {
    const double step = 1e-5 * std::max(1.0, std::abs(theta(r)));
    RealVector plus = theta, minus = theta;
    plus(r) += step;
    minus(r) -= step;
    h.col(r) = (grad(plus) - grad(minus)) / (2.0 * step);
  }
  return (h + h.transpose()) * 0.5;
}

/// H⋆, defined only where the estimator is stationary (‖residual‖∞ ≤ tol).
inline RealMatrix hessian(const ParametricModel& model, const Povm& povm, const CostFunction& cost,
                          const Estimator& est, const RealVector& theta, double tol = kStationarityTol) {
  const RealVector res = stationarity_residual(model, povm, cost, est, theta);
  if (res.cwiseAbs().maxCoeff() > tol)
    throw NonStationaryError("estimator is not stationary at this point (residual " +
                                 std::to_string(res.cwiseAbs().maxCoeff()) + ")",
                             std::vector<double>(res.data(), res.data() + res.size()));
  const ProbabilityVector p = detail::regular_probabilities(model, povm, theta);
  return loss_hessian(cost, est, p.values(), theta);
}

/// 𝒞_rs = Σ_j ∂_r C(θ, 𝓔_j) ∂_s C(θ, 𝓔_j) p^j, derivatives in the first slot.
inline RealMatrix score_matrix(const CostFunction& cost, const Estimator& est, const std::vector<double>& probs,
                               const RealVector& theta) {
  if (probs.size() != est.size()) throw PreconditionError("score_matrix: probability/estimator size mismatch");
  const auto d = theta.size();
  RealMatrix c = RealMatrix::Zero(d, d);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const RealVector g = cost.gradient_first(theta, est[j]);
    c += probs[j] * g * g.transpose();
  }
  return (c + c.transpose()) * 0.5;
}

inline double condition_number(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return INFINITY;
  return s(0) / s(s.size() - 1);
}

inline RealMatrix checked_inverse(const RealMatrix& m, const char* what) {
  if (condition_number(m) >= kMaxCondition) throw NumericalError(std::string(what) + " is singular or ill-conditioned");
  RealMatrix inv = m.inverse();
  return (inv + inv.transpose()) * 0.5;
}

/// Cov = H⁻¹ 𝒞 H⁻¹.
inline RealMatrix covariance_from(const RealMatrix& hess, const RealMatrix& score) {
  const RealMatrix hinv = checked_inverse(hess, "Hessian form");
  const RealMatrix cov = hinv * score * hinv;
  return (cov + cov.transpose()) * 0.5;
}

inline RealMatrix covariance(const ParametricModel& model, const Povm& povm, const CostFunction& cost,
                             const Estimator& est, const RealVector& theta) {
  const RealMatrix h = hessian(model, povm, cost, est, theta);
  const ProbabilityVector p = detail::regular_probabilities(model, povm, theta);
  return covariance_from(h, score_matrix(cost, est, p.values(), theta));
}

struct CovectorGaps {
  RealVector covector;
  std::optional<double> cramer_rao;  ///< ξᵀ Cov ξ − ξᵀ (G^Mc)⁻¹ ξ
  std::optional<double> helstrom;    ///< ξᵀ (G^Mc)⁻¹ ξ − ξᵀ (G^M)⁻¹ ξ
  std::optional<double> round_floor; ///< (1/N) ξᵀ (G^M_base)⁻¹ ξ for N-round models
};

struct BoundReport {
  RealVector point;
  std::optional<RealMatrix> hessian;
  std::optional<RealMatrix> covariance;
  RealMatrix classical_metric;
  std::optional<RealMatrix> quantum_metric;
  std::optional<double> stationarity_residual;       ///< ‖residual‖∞
  std::optional<double> cramer_rao_min_eigenvalue;   ///< of Cov − (G^Mc)⁻¹
  std::optional<double> helstrom_min_eigenvalue;     ///< of (G^Mc)⁻¹ − (G^M)⁻¹
  std::optional<double> metric_gap_min_eigenvalue;   ///< of G^M − G^Mc
  std::optional<double> metric_gap_max_eigenvalue;
  bool classical_singular = false;
  int rounds = 1;
  std::vector<CovectorGaps> gaps;
  bool passed = true;
};

inline double quad(const RealMatrix& m, const RealVector& x) { return x.dot(m * x); }

inline double min_sym_eigenvalue(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es((m + m.transpose()) * 0.5, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}
inline double max_sym_eigenvalue(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es((m + m.transpose()) * 0.5, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

namespace detail {

inline void require_covectors(const std::vector<RealVector>& covectors, int d) {
  for (const auto& xi : covectors)
    if (xi.size() != d) throw PreconditionError("covector has wrong dimension");
}

}  // namespace detail

/// Cramer-Rao: Cov ⪰ (G^Mc)⁻¹ at a stationary point, checked per covector and as a matrix inequality.
inline BoundReport cr_check(const ParametricModel& model, const Povm& povm, const CostFunction& cost,
                            const Estimator& est, const RealVector& theta, const std::vector<RealVector>& covectors) {
  detail::require_covectors(covectors, model.dim());
  BoundReport rep;
  rep.point = theta;
  rep.rounds = model.rounds();
  rep.stationarity_residual = stationarity_residual(model, povm, cost, est, theta).cwiseAbs().maxCoeff();
  rep.hessian = hessian(model, povm, cost, est, theta);
  const ProbabilityVector p = detail::regular_probabilities(model, povm, theta);
  rep.covariance = covariance_from(*rep.hessian, score_matrix(cost, est, p.values(), theta));
  rep.classical_metric = classical_metric(model, povm, theta);
  const RealMatrix gc_inv = checked_inverse(rep.classical_metric, "classical metric");
  rep.cramer_rao_min_eigenvalue = min_sym_eigenvalue(*rep.covariance - gc_inv);
  rep.passed = *rep.cramer_rao_min_eigenvalue >= kBoundSlack;
  for (const auto& xi : covectors) {
    CovectorGaps g{xi, quad(*rep.covariance, xi) - quad(gc_inv, xi), std::nullopt, std::nullopt};
    rep.passed = rep.passed && *g.cramer_rao >= kBoundSlack;
    rep.gaps.push_back(std::move(g));
  }
  return rep;
}

namespace detail {

inline void add_round_floor(const ParametricModel& model, const RealVector& theta, BoundReport& rep) {
  if (model.rounds() <= 1 || !model.base()) return;
  const RealMatrix base_inv = checked_inverse(quantum_metric(*model.base(), theta), "base quantum metric");
  for (auto& g : rep.gaps) g.round_floor = quad(base_inv, g.covector) / model.rounds();
}

}  // namespace detail

/// Helstrom chain Cov ⪰ (G^Mc)⁻¹ ⪰ (G^M)⁻¹, plus the N-round floor for multi-round models.
inline BoundReport helstrom_check(const ParametricModel& model, const Povm& povm, const CostFunction& cost,
                                  const Estimator& est, const RealVector& theta,
                                  const std::vector<RealVector>& covectors) {
  BoundReport rep = cr_check(model, povm, cost, est, theta, covectors);
  rep.quantum_metric = quantum_metric(model, theta);
  const RealMatrix gc_inv = checked_inverse(rep.classical_metric, "classical metric");
  const RealMatrix gq_inv = checked_inverse(*rep.quantum_metric, "quantum metric");
  rep.helstrom_min_eigenvalue = min_sym_eigenvalue(gc_inv - gq_inv);
  rep.metric_gap_min_eigenvalue = min_sym_eigenvalue(*rep.quantum_metric - rep.classical_metric);
  rep.metric_gap_max_eigenvalue = max_sym_eigenvalue(*rep.quantum_metric - rep.classical_metric);
  rep.passed = rep.passed && *rep.helstrom_min_eigenvalue >= kBoundSlack;
  for (auto& g : rep.gaps) {
    g.helstrom = quad(gc_inv, g.covector) - quad(gq_inv, g.covector);
    rep.passed = rep.passed && *g.helstrom >= kBoundSlack;
  }
  detail::add_round_floor(model, theta, rep);
  return rep;
}

/// Estimator-free part of the chain: compares G^M with G^Mc directly (majorization),
/// and per covector when G^Mc is invertible. A singular G^Mc is reported, not an error.
inline BoundReport metric_chain(const ParametricModel& model, const Povm& povm, const RealVector& theta,
                                const std::vector<RealVector>& covectors) {
  detail::require_covectors(covectors, model.dim());
  BoundReport rep;
  rep.point = theta;
  rep.rounds = model.rounds();
  rep.classical_metric = classical_metric(model, povm, theta);
  rep.quantum_metric = quantum_metric(model, theta);
  const RealMatrix gap = *rep.quantum_metric - rep.classical_metric;
  rep.metric_gap_min_eigenvalue = min_sym_eigenvalue(gap);
  rep.metric_gap_max_eigenvalue = max_sym_eigenvalue(gap);
  rep.passed = *rep.metric_gap_min_eigenvalue >= kBoundSlack;
  const RealMatrix gq_inv = checked_inverse(*rep.quantum_metric, "quantum metric");
  rep.classical_singular = condition_number(rep.classical_metric) >= kMaxCondition;
  std::optional<RealMatrix> gc_inv;
  if (!rep.classical_singular) {
    gc_inv = checked_inverse(rep.classical_metric, "classical metric");
    rep.helstrom_min_eigenvalue = min_sym_eigenvalue(*gc_inv - gq_inv);
    rep.passed = rep.passed && *rep.helstrom_min_eigenvalue >= kBoundSlack;
  }
  for (const auto& xi : covectors) {
    CovectorGaps g{xi, std::nullopt, std::nullopt, std::nullopt};
    if (gc_inv) {
      g.helstrom = quad(*gc_inv, xi) - quad(gq_inv, xi);
      rep.passed = rep.passed && *g.helstrom >= kBoundSlack;
    }
    rep.gaps.push_back(std::move(g));
  }
  detail::add_round_floor(model, theta, rep);
  return rep;
}

}  // namespace cstar
