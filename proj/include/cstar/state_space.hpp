#pragma once

// States, tangent vectors and the canonical geometry of the state space:
// the action of the invertible group, gradient and Hamiltonian vector
// fields, the Jordan metric G, its geodesics, and the SLD solver.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cstar/algebra.hpp"

namespace cstar {

/// Trace tolerance for tangent vectors built by finite differences.
inline constexpr double kTangentTraceTol = 1e-8;

/// A positive, normalized functional ρ(a) = Σ_k trace(ρ̂_k a_k), stored as its density element.
class State {
 public:
  State() : State(identity(AlgebraSpec{})) {}
  explicit State(const Element& density, double tol = kDefaultTol) : density_(hermitian_part(density)) {
    require_self_adjoint(density, tol * std::max(1.0, norm(density)), "density");
    const auto pos = is_positive(density_, tol);
    if (!pos.positive)
      throw PreconditionError("density is not positive (min eigenvalue " + std::to_string(pos.min_eigenvalue) + ")");
    const double tr = trace(density_).real();
    if (std::abs(tr - 1.0) > tol) throw PreconditionError("density trace is " + std::to_string(tr) + ", expected 1");
  }

  const Element& density() const noexcept { return density_; }
  const AlgebraSpec& spec() const noexcept { return density_.spec(); }

 private:
  Element density_;
};

inline State maximally_mixed(const AlgebraSpec& spec) {
  return State(identity(spec) / static_cast<double>(spec.hilbert_dim()));
}

/// Pure state |ψ⟩⟨ψ|/⟨ψ|ψ⟩ on M_n.
inline State pure_state(const Eigen::VectorXcd& psi) {
  const Matrix m = psi * psi.adjoint() / psi.squaredNorm();
  return State(Element(m));
}

/// ρ(a) = Σ_k trace(ρ̂_k a_k).
inline Complex evaluate(const State& s, const Element& a) { return pairing(s.density(), a); }

/// A tangent vector at a state, stored as its traceless self-adjoint representative ξ̂.
class TangentVector {
 public:
  TangentVector(State base, const Element& rep, double trace_tol = kTangentTraceTol)
      : base_(std::move(base)), rep_(hermitian_part(rep)) {
    require_same_spec(base_.spec(), rep.spec());
    require_self_adjoint(rep, trace_tol * std::max(1.0, norm(rep)), "tangent representative");
    const double tr = std::abs(trace(rep));
    if (tr > trace_tol * std::max(1.0, frobenius_norm(rep)))
      throw PreconditionError("tangent representative has trace " + std::to_string(tr) + ", expected 0");
  }

  static TangentVector zero_at(const State& s) { return TangentVector(s, zero(s.spec())); }

  const State& base() const noexcept { return base_; }
  const Element& rep() const noexcept { return rep_; }

 private:
  State base_;
  Element rep_;
};

inline void require_same_base(const State& a, const State& b) {
  require_same_spec(a.spec(), b.spec());
  const double scale = std::max(1.0, norm(a.density()));
  if (distance(a.density(), b.density()) > 1e-12 * scale)
    throw PreconditionError("tangent vectors are based at different states");
}

/// Minimum singular value over all blocks.
inline double min_singular_value(const Element& g) {
  double m = INFINITY;
  for (const auto& b : g.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b);
    m = std::min(m, svd.singularValues().minCoeff());
  }
  return m;
}

/// Φ(g, ρ)(c) = ρ(g† c g) / ρ(g† g); on densities ρ̂ ↦ g ρ̂ g† / trace(g ρ̂ g†).
/// This is a left action: Φ(g1, Φ(g2, ρ)) = Φ(g1 g2, ρ).
inline State group_action(const Element& g, const State& s, double tol = kDefaultTol) {
  require_same_spec(g.spec(), s.spec());
  if (min_singular_value(g) <= tol) throw PreconditionError("group_action: element is not invertible");
  const double normalization = evaluate(s, multiply(adjoint(g), g)).real();
  if (normalization <= tol) throw NumericalError("group_action: vanishing normalization ρ(g†g)");
  return State(multiply(multiply(g, s.density()), adjoint(g)) / normalization);
}

/// Differential of Φ_g: pushes a tangent at ρ to a tangent at Φ(g, ρ).
inline TangentVector group_action_tangent(const Element& g, const TangentVector& v, double tol = kDefaultTol) {
  const State moved = group_action(g, v.base(), tol);
  const Element gh = adjoint(g);
  const double normalization = evaluate(v.base(), multiply(gh, g)).real();
  const Element pushed = multiply(multiply(g, v.rep()), gh);
  const double rate = trace(pushed).real() / normalization;
  return TangentVector(moved, pushed / normalization - moved.density() * rate);
}

/// Γ_ab(ρ): c ↦ ρ({a,c}) − ρ(a)ρ(c) + ρ([[b,c]]).
inline TangentVector fundamental_vector(const State& s, const Element& a, const Element& b) {
  require_self_adjoint(a, kDefaultTol * std::max(1.0, norm(a)), "gradient label");
  require_self_adjoint(b, kDefaultTol * std::max(1.0, norm(b)), "hamiltonian label");
  const Element& rho = s.density();
  const double ra = evaluate(s, a).real();
  const Element grad = jordan(rho, a) - rho * ra;
  const Element ham = (multiply(rho, b) - multiply(b, rho)) * (1.0 / (2.0 * kI));
  return TangentVector(s, grad + ham);
}

/// Y_a(ρ), representative {ρ̂, a} − ρ(a) ρ̂.
inline TangentVector gradient_vector(const State& s, const Element& a) {
  return fundamental_vector(s, a, zero(s.spec()));
}

/// X_b(ρ), representative [ρ̂, b]/(2i).
inline TangentVector hamiltonian_vector(const State& s, const Element& b) {
  return fundamental_vector(s, zero(s.spec()), b);
}

struct SldResult {
  Element sld;     ///< self-adjoint, ρ(a) = 0, zero on the kernel block
  int gauge_dim;   ///< free directions: kernel pairs plus the identity
  double residual; ///< Frobenius norm of Y_a(ρ) − v
};

/// Solves {ρ̂, a} − ρ(a) ρ̂ = ξ̂ block by block in the eigenbasis of ρ̂:
/// a_ij = 2 ξ_ij / (λ_i + λ_j) where λ_i + λ_j > ε = 1e-12·λ_max, and
/// a_ij = 0 otherwise. Throws UnsolvableSldError when ξ̂ has support on the
/// excluded pairs, i.e. the tangent leaves the orbit's tangent space.
inline SldResult sld_at_state(const State& s, const TangentVector& v) {
  require_same_base(s, v.base());
  const Element& rho = s.density();
  const Element& xi = v.rep();
  const auto spectrum = eigenvalues(rho);
  const double lmax = *std::max_element(spectrum.begin(), spectrum.end());
  const double eps = 1e-12 * lmax;
  const double forbidden_tol = 1e-8 * std::max(1.0, frobenius_norm(xi));

  Element a(s.spec());
  int gauge = 1;
  double worst_forbidden = 0.0;
  for (std::size_t k = 0; k < rho.num_blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.block(k));
    const auto& lam = es.eigenvalues();
    const Matrix& u = es.eigenvectors();
    const Matrix x = u.adjoint() * xi.block(k) * u;
    Matrix y = Matrix::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double denom = lam(i) + lam(j);
        if (denom > eps) {
          y(i, j) = 2.0 * x(i, j) / denom;
        } else {
          ++gauge;
          worst_forbidden = std::max(worst_forbidden, std::abs(x(i, j)));
        }
      }
    a.block(k) = u * y * u.adjoint();
  }
  if (worst_forbidden > forbidden_tol)
    throw UnsolvableSldError("SLD equation is inconsistent: tangent has support " + std::to_string(worst_forbidden) +
                                 " outside the orbit tangent space",
                             worst_forbidden);
  a = hermitian_part(a);
  const Element back = jordan(rho, a) - rho * evaluate(s, a).real();
  return {a, gauge, frobenius_norm(back - xi)};
}

/// G(v, w), computed as the pairing of v's functional with the SLD of w.
/// Independent of the SLD gauge because v annihilates the free directions.
inline double metric(const State& s, const TangentVector& v, const TangentVector& w) {
  require_same_base(s, v.base());
  require_same_base(s, w.base());
  (void)sld_at_state(s, v);
  const Element b = sld_at_state(s, w).sld;
  return pairing(v.rep(), b).real();
}

/// ν(t) = cos²(|v|t) ρ + sin²(|v|t)/|v|² ρ_v + sin(2|v|t)/(2|v|) ρ_{v}', with
/// ρ_v(b) = ρ(aba), ρ_{v}'(b) = ρ({a,b}) and a the SLD of v with ρ(a) = 0.
inline State geodesic(const State& s, const TangentVector& v, double t) {
  const Element a = sld_at_state(s, v).sld;
  const Element& rho = s.density();
  const double speed2 = evaluate(s, multiply(a, a)).real();
  if (speed2 < 1e-28) return s;
  const double speed = std::sqrt(speed2);
  const double c = std::cos(speed * t);
  const double sn = std::sin(speed * t);
  const Element out = rho * (c * c) + multiply(multiply(a, rho), a) * (sn * sn / speed2) +
                      jordan(rho, a) * (std::sin(2.0 * speed * t) / (2.0 * speed));
  return State(out);
}

/// |v| = sqrt(G(v, v)).
inline double speed(const State& s, const TangentVector& v) { return std::sqrt(std::max(0.0, metric(s, v, v))); }

/// Per-block numerical rank of ρ̂; constant along orbits of the group action.
inline std::vector<int> orbit_signature(const State& s, double tol = kDefaultTol) {
  std::vector<int> ranks;
  for (const auto& b : s.density().blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    ranks.push_back(static_cast<int>((es.eigenvalues().array() > tol).count()));
  }
  return ranks;
}

}  // namespace cstar
