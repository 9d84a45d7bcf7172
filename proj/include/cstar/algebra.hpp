#pragma once

// Finite-dimensional C*-algebras in Artin-Wedderburn form: a direct sum of
// full complex matrix blocks M_{n_1} ⊕ ... ⊕ M_{n_B}. Every element is a
// tuple of square complex matrices, one per block, and all algebra
// operations act block by block.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cstar/error.hpp"

namespace cstar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr Complex kI{0.0, 1.0};

/// Block structure of an algebra: the ordered list of block sizes.
class AlgebraSpec {
 public:
  AlgebraSpec() : dims_{1} {}
  explicit AlgebraSpec(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
    if (dims_.empty()) throw PreconditionError("algebra spec needs at least one block");
    for (int n : dims_)
      if (n < 1) throw PreconditionError("block dimensions must be >= 1");
  }

  /// The commutative algebra C_n of functions on n points.
  static AlgebraSpec abelian(int n) { return AlgebraSpec(std::vector<int>(static_cast<std::size_t>(n), 1)); }
  /// The full matrix algebra M_n.
  static AlgebraSpec full(int n) { return AlgebraSpec({n}); }

  const std::vector<int>& block_dims() const noexcept { return dims_; }
  std::size_t num_blocks() const noexcept { return dims_.size(); }
  int block_dim(std::size_t k) const { return dims_.at(k); }

  /// Complex dimension Σ n_k², also the real dimension of the self-adjoint part.
  int dimension() const {
    return std::accumulate(dims_.begin(), dims_.end(), 0, [](int acc, int n) { return acc + n * n; });
  }
  /// Size of the Hilbert space the algebra acts on, Σ n_k.
  int hilbert_dim() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }

  bool is_abelian() const {
    return std::all_of(dims_.begin(), dims_.end(), [](int n) { return n == 1; });
  }

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

 private:
  std::vector<int> dims_;
};

inline std::string to_string(const AlgebraSpec& spec) {
  std::string s = "[";
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) {
    if (k) s += ",";
    s += std::to_string(spec.block_dim(k));
  }
  return s + "]";
}

/// A member of the algebra: one n_k × n_k complex matrix per block.
class Element {
 public:
  Element() : Element(AlgebraSpec{}) {}
  explicit Element(AlgebraSpec spec) : spec_(std::move(spec)) {
    blocks_.reserve(spec_.num_blocks());
    for (int n : spec_.block_dims()) blocks_.push_back(Matrix::Zero(n, n));
  }
  Element(AlgebraSpec spec, std::vector<Matrix> blocks) : spec_(std::move(spec)), blocks_(std::move(blocks)) {
    if (blocks_.size() != spec_.num_blocks())
      throw SpecMismatchError("element has " + std::to_string(blocks_.size()) + " blocks, spec " +
                              to_string(spec_) + " needs " + std::to_string(spec_.num_blocks()));
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto n = spec_.block_dim(k);
      if (blocks_[k].rows() != n || blocks_[k].cols() != n)
        throw SpecMismatchError("block " + std::to_string(k) + " does not match spec " + to_string(spec_));
    }
  }
  /// Single-block convenience constructor.
  explicit Element(const Matrix& m) : Element(AlgebraSpec::full(static_cast<int>(m.rows())), {m}) {}

  /// Diagonal element of C_n from a vector of values.
  static Element diagonal(const std::vector<Complex>& values) {
    Element x(AlgebraSpec::abelian(static_cast<int>(values.size())));
    for (std::size_t k = 0; k < values.size(); ++k) x.blocks_[k](0, 0) = values[k];
    return x;
  }

  const AlgebraSpec& spec() const noexcept { return spec_; }
  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }
  const Matrix& block(std::size_t k) const { return blocks_.at(k); }
  Matrix& block(std::size_t k) { return blocks_.at(k); }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }

  Element& operator+=(const Element& o) {
    check_same(o);
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
    return *this;
  }
  Element& operator-=(const Element& o) {
    check_same(o);
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
    return *this;
  }
  Element& operator*=(Complex s) {
    for (auto& b : blocks_) b *= s;
    return *this;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator-(Element a) { return a *= -1.0; }
  friend Element operator*(Element a, Complex s) { return a *= s; }
  friend Element operator*(Complex s, Element a) { return a *= s; }
  friend Element operator*(Element a, double s) { return a *= Complex(s); }
  friend Element operator*(double s, Element a) { return a *= Complex(s); }
  friend Element operator/(Element a, double s) { return a *= Complex(1.0 / s); }

  void check_same(const Element& o) const {
    if (!(spec_ == o.spec_))
      throw SpecMismatchError("spec mismatch: " + to_string(spec_) + " vs " + to_string(o.spec_));
  }

 private:
  AlgebraSpec spec_;
  std::vector<Matrix> blocks_;
};

inline void require_same_spec(const AlgebraSpec& a, const AlgebraSpec& b) {
  if (!(a == b)) throw SpecMismatchError("spec mismatch: " + to_string(a) + " vs " + to_string(b));
}

inline Element zero(const AlgebraSpec& spec) { return Element(spec); }

inline Element identity(const AlgebraSpec& spec) {
  Element x(spec);
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) x.block(k).setIdentity();
  return x;
}

inline Element adjoint(const Element& x) {
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (const auto& b : x.blocks()) blocks.push_back(b.adjoint());
  return Element(x.spec(), std::move(blocks));
}

inline Element multiply(const Element& x, const Element& y) {
  x.check_same(y);
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (std::size_t k = 0; k < x.num_blocks(); ++k) blocks.push_back(x.block(k) * y.block(k));
  return Element(x.spec(), std::move(blocks));
}

inline Element operator*(const Element& x, const Element& y) { return multiply(x, y); }

/// Jordan product {x,y} = (xy + yx)/2.
inline Element jordan(const Element& x, const Element& y) { return (multiply(x, y) + multiply(y, x)) * 0.5; }

/// Lie product [[x,y]] = (xy − yx)/(2i).
inline Element lie(const Element& x, const Element& y) {
  return (multiply(x, y) - multiply(y, x)) * (1.0 / (2.0 * kI));
}

/// Σ_k trace(x_k).
inline Complex trace(const Element& x) {
  Complex t = 0.0;
  for (const auto& b : x.blocks()) t += b.trace();
  return t;
}

/// Bilinear trace pairing Σ_k trace(x_k y_k); real on pairs of self-adjoint elements.
inline Complex pairing(const Element& x, const Element& y) {
  x.check_same(y);
  Complex t = 0.0;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) t += (x.block(k).transpose().array() * y.block(k).array()).sum();
  return t;
}

inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// Maximum spectral norm over blocks.
inline double norm(const Element& x) {
  double n = 0.0;
  for (const auto& b : x.blocks()) n = std::max(n, spectral_norm(b));
  return n;
}

/// Frobenius norm over all blocks.
inline double frobenius_norm(const Element& x) {
  double s = 0.0;
  for (const auto& b : x.blocks()) s += b.squaredNorm();
  return std::sqrt(s);
}

inline double distance(const Element& x, const Element& y) { return norm(x - y); }

inline double self_adjoint_deviation(const Element& x) {
  double d = 0.0;
  for (const auto& b : x.blocks()) d = std::max(d, spectral_norm(b - b.adjoint()));
  return d;
}

inline bool is_self_adjoint(const Element& x, double tol = kDefaultTol) { return self_adjoint_deviation(x) <= tol; }

inline void require_self_adjoint(const Element& x, double tol, const char* what) {
  const double dev = self_adjoint_deviation(x);
  if (dev > tol)
    throw PreconditionError(std::string(what) + " is not self-adjoint (deviation " + std::to_string(dev) + ")");
}

/// Hermitian part (x + x†)/2, used to clean rounding noise.
inline Element hermitian_part(const Element& x) { return (x + adjoint(x)) * 0.5; }

/// Removes the component along the identity: x − (tr x / tr 𝕀)·𝕀.
inline Element traceless_part(const Element& x) {
  const auto& spec = x.spec();
  return x - identity(spec) * (trace(x) / static_cast<double>(spec.hilbert_dim()));
}

struct PositivityResult {
  bool positive;
  double min_eigenvalue;
};

/// Eigenvalues of every block (ascending within a block), concatenated in block order.
inline std::vector<double> eigenvalues(const Element& x) {
  std::vector<double> out;
  for (const auto& b : x.blocks()) {
    const Matrix h = (b + b.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

inline double min_eigenvalue(const Element& x) {
  const auto ev = eigenvalues(x);
  return *std::min_element(ev.begin(), ev.end());
}

inline PositivityResult is_positive(const Element& x, double tol = kDefaultTol) {
  require_self_adjoint(x, tol, "is_positive argument");
  const double m = min_eigenvalue(x);
  return {m >= -tol, m};
}

inline double commutator_norm(const Element& x, const Element& y) { return norm(multiply(x, y) - multiply(y, x)); }

/// Structure constants of a basis of the self-adjoint part:
/// {e^j,e^k} = Σ_l d(j,k,l) e^l and [[e^j,e^k]] = Σ_l c(j,k,l) e^l.
class StructureConstants {
 public:
  explicit StructureConstants(std::size_t n) : n_(n), d_(n * n * n, 0.0), c_(n * n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double d(std::size_t j, std::size_t k, std::size_t l) const { return d_[idx(j, k, l)]; }
  double c(std::size_t j, std::size_t k, std::size_t l) const { return c_[idx(j, k, l)]; }
  double& d(std::size_t j, std::size_t k, std::size_t l) { return d_[idx(j, k, l)]; }
  double& c(std::size_t j, std::size_t k, std::size_t l) { return c_[idx(j, k, l)]; }

 private:
  std::size_t idx(std::size_t j, std::size_t k, std::size_t l) const { return (j * n_ + k) * n_ + l; }
  std::size_t n_;
  std::vector<double> d_, c_;
};

/// Solves for the structure constants by least squares in the trace inner
/// product, so the basis need not be orthonormal. Throws NumericalError when
/// the basis does not span the self-adjoint part.
inline StructureConstants structure_constants(const std::vector<Element>& basis, double tol = kDefaultTol) {
  if (basis.empty()) throw PreconditionError("structure_constants: empty basis");
  const auto& spec = basis.front().spec();
  for (const auto& e : basis) {
    require_same_spec(spec, e.spec());
    require_self_adjoint(e, tol, "basis element");
  }
  const auto n = basis.size();
  if (static_cast<int>(n) != spec.dimension())
    throw NumericalError("basis has " + std::to_string(n) + " elements, self-adjoint part has dimension " +
                         std::to_string(spec.dimension()));

  RealMatrix gram(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) gram(a, b) = pairing(basis[a], basis[b]).real();
  Eigen::FullPivLU<RealMatrix> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() < static_cast<Eigen::Index>(n)) throw NumericalError("structure_constants: rank-deficient basis");

  StructureConstants sc(n);
  RealVector rhs_d(n), rhs_c(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const Element jp = jordan(basis[j], basis[k]);
      const Element lp = lie(basis[j], basis[k]);
      for (std::size_t l = 0; l < n; ++l) {
        rhs_d(l) = pairing(basis[l], jp).real();
        rhs_c(l) = pairing(basis[l], lp).real();
      }
      const RealVector dv = lu.solve(rhs_d);
      const RealVector cv = lu.solve(rhs_c);
      for (std::size_t l = 0; l < n; ++l) {
        sc.d(j, k, l) = dv(l);
        sc.c(j, k, l) = cv(l);
      }
    }
  }
  return sc;
}

/// Kronecker product A ⊗ B with A's index major.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Spec of A ⊗ B: one block per pair (k_a, k_b) in lexicographic order.
inline AlgebraSpec tensor_product(const AlgebraSpec& a, const AlgebraSpec& b) {
  std::vector<int> dims;
  dims.reserve(a.num_blocks() * b.num_blocks());
  for (int na : a.block_dims())
    for (int nb : b.block_dims()) dims.push_back(na * nb);
  return AlgebraSpec(std::move(dims));
}

inline AlgebraSpec tensor_power(const AlgebraSpec& spec, int n) {
  if (n < 1) throw PreconditionError("tensor_power: N must be >= 1");
  AlgebraSpec out = spec;
  for (int i = 1; i < n; ++i) out = tensor_product(out, spec);
  return out;
}

inline Element tensor(const Element& x, const Element& y) {
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks() * y.num_blocks());
  for (const auto& bx : x.blocks())
    for (const auto& by : y.blocks()) blocks.push_back(kron(bx, by));
  return Element(tensor_product(x.spec(), y.spec()), std::move(blocks));
}

inline Element tensor_elements(const std::vector<Element>& xs) {
  if (xs.empty()) throw PreconditionError("tensor_elements: empty list");
  Element out = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) out = tensor(out, xs[i]);
  return out;
}

/// Pauli matrix σ^k (σ^0 = 𝕀) as an element of M_2.
inline Element pauli(int k) {
  Matrix m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw PreconditionError("pauli index must be 0..3");
  }
  return Element(m);
}

inline std::vector<Element> pauli_basis() { return {pauli(0), pauli(1), pauli(2), pauli(3)}; }

/// Delta functions e^j on n points, a basis of C_n summing to the identity.
inline std::vector<Element> delta_basis(int n) {
  std::vector<Element> out;
  for (int j = 0; j < n; ++j) {
    std::vector<Complex> v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(j)] = 1.0;
    out.push_back(Element::diagonal(v));
  }
  return out;
}

/// Hermitian matrix units spanning the self-adjoint part of any spec
/// (diagonal units, plus symmetric and antisymmetric off-diagonal pairs).
inline std::vector<Element> self_adjoint_basis(const AlgebraSpec& spec) {
  std::vector<Element> out;
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) {
    const int n = spec.block_dim(k);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Element e(spec);
        if (i == j) {
          e.block(k)(i, i) = 1.0;
          out.push_back(e);
          continue;
        }
        e.block(k)(i, j) = 1.0;
        e.block(k)(j, i) = 1.0;
        out.push_back(e);
        Element f(spec);
        f.block(k)(i, j) = -kI;
        f.block(k)(j, i) = kI;
        out.push_back(f);
      }
  }
  return out;
}

}  // namespace cstar
