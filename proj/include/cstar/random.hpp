#pragma once

// Seeded random generators for property checks. Every generator takes the
// engine explicitly; nothing here touches global state.

#include <random>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/measurement.hpp"
#include "cstar/state_space.hpp"

namespace cstar {

using Rng = std::mt19937_64;

inline Matrix random_ginibre(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline Element random_element(const AlgebraSpec& spec, Rng& rng) {
  Element x(spec);
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) x.block(k) = random_ginibre(spec.block_dim(k), rng);
  return x;
}

inline Element random_self_adjoint(const AlgebraSpec& spec, Rng& rng) { return hermitian_part(random_element(spec, rng)); }

/// Haar-distributed unitary in every block (QR of a Ginibre matrix with phase correction).
inline Element random_unitary(const AlgebraSpec& spec, Rng& rng) {
  Element u(spec);
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) {
    const Matrix g = random_ginibre(spec.block_dim(k), rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
      const Complex d = r(i, i);
      if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    u.block(k) = q;
  }
  return u;
}

/// Faithful state b b† / trace with b Ginibre (full rank with probability one).
inline State random_faithful_state(const AlgebraSpec& spec, Rng& rng) {
  const Element b = random_element(spec, rng);
  const Element a = multiply(b, adjoint(b));
  return State(a / trace(a).real());
}

/// Random pure state on a single-block algebra.
inline State random_pure_state(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd psi(n);
  for (int i = 0; i < n; ++i) psi(i) = Complex(gauss(rng), gauss(rng));
  return pure_state(psi);
}

/// Inverse square root of a positive definite element, block by block.
inline Element inverse_sqrt(const Element& s) {
  Element out(s.spec());
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((s.block(k) + s.block(k).adjoint()) * 0.5);
    const Eigen::VectorXd f = es.eigenvalues().cwiseSqrt().cwiseInverse();
    out.block(k) = es.eigenvectors() * f.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  }
  return out;
}

/// k generic effects: a_j = b_j† b_j with Ginibre b_j, m^j = S^{-1/2} a_j S^{-1/2}, S = Σ a_j.
inline Povm random_povm(const AlgebraSpec& spec, int k, Rng& rng) {
  std::vector<Element> a;
  Element sum(spec);
  for (int j = 0; j < k; ++j) {
    const Element b = random_element(spec, rng);
    a.push_back(multiply(adjoint(b), b));
    sum += a.back();
  }
  const Element w = inverse_sqrt(sum);
  std::vector<Element> effects;
  for (const auto& x : a) effects.push_back(hermitian_part(multiply(multiply(w, x), w)));
  return Povm(std::move(effects));
}

inline std::vector<double> random_reals(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (auto& x : out) x = u(rng);
  return out;
}

/// Random point of the open simplex, bounded away from the boundary by floor.
inline std::vector<double> random_simplex_point(std::size_t n, Rng& rng, double floor = 0.05) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - u(rng));
    s += x;
  }
  const double spare = 1.0 - floor * static_cast<double>(n);
  for (auto& x : p) x = floor + spare * x / s;
  return p;
}

}  // namespace cstar
