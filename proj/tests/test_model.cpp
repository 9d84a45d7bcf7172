#include "catch_amalgamated.hpp"

#include "cstar/model.hpp"
#include "cstar/random.hpp"

using namespace cstar;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RealVector pt(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

double component(const Element& a, int k) { return 0.5 * pairing(a, pauli(k)).real(); }

}  // namespace

TEST_CASE("analytic partials agree with finite differences", "[model]") {
  for (const auto& [model, theta] : std::vector<std::pair<ParametricModel, RealVector>>{
           {qubit_pure(), pt({0.4})}, {qubit_dephasing(), pt({0.7, 1.3})}, {simplex_affine(4), pt({0.2, 0.3, 0.1})}}) {
    REQUIRE(model.has_analytic_partial());
    for (int r = 0; r < model.dim(); ++r) {
      const Element a = partial_derivative(model, theta, r);
      const Element n = partial_derivative(model, theta, r, Differencing::numerical);
      CHECK(distance(a, n) < 1e-9);
    }
  }
}

TEST_CASE("domain checks", "[model]") {
  const ParametricModel m = qubit_dephasing();
  CHECK(m.contains(pt({1.0, 1.0})));
  CHECK_FALSE(m.contains(pt({-1.0, 1.0})));
  CHECK_FALSE(m.contains(pt({1.0})));
  CHECK_THROWS_AS(state_at(m, pt({-1.0, 1.0})), DomainError);
  CHECK_THROWS_AS(state_at(m, pt({1.0})), PreconditionError);
  CHECK_THROWS_AS(quantum_metric(m, pt({1.0, 0.0})), DomainError);
  CHECK_THROWS_AS(partial_derivative(m, pt({1e-7, 1.0}), 0, Differencing::numerical), DomainError);
  CHECK_THROWS_AS(partial_derivative(m, pt({1.0, 1.0}), 2), PreconditionError);
  const ParametricModel s = simplex_affine(3);
  CHECK(s.contains(pt({0.3, 0.3})));
  CHECK_FALSE(s.contains(pt({0.6, 0.6})));
  CHECK_THROWS_AS(simplex_affine(1), PreconditionError);
}

TEST_CASE("pure qubit metric is constant", "[model]") {
  const ParametricModel m = qubit_pure();
  for (double g : {-3.0, -0.5, 0.0, 1.2, 2.9}) {
    CHECK_THAT(quantum_metric(m, pt({g}))(0, 0), WithinAbs(1.0, 1e-12));
    const Element a = sld(m, pt({g}), pt({1.0})).sld;
    CHECK_THAT(component(a, 1) * std::sin(g) + component(a, 2) * std::cos(g), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(component(a, 3), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("dephasing qubit metric", "[model]") {
  const ParametricModel m = qubit_dephasing();
  for (const auto& [g, z] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {0.5, 1.5}, {1.5, 0.5}}) {
    const RealMatrix G = quantum_metric(m, pt({g, z}));
    const double e = std::exp(2 * z * g) - 1;
    CHECK_THAT(G(0, 0), WithinRel(std::exp(-2 * z * g) + z * z / e, 1e-9));
    CHECK_THAT(G(1, 1), WithinRel(g * g / e, 1e-9));
    CHECK_THAT(G(0, 1), WithinRel(z * g / e, 1e-9));
    CHECK(G(0, 1) == G(1, 0));
    const RealMatrix Gn = quantum_metric(m, pt({g, z}), Differencing::numerical);
    CHECK((G - Gn).norm() < 1e-7);
  }
}

TEST_CASE("dephasing cross term from explicit SLDs", "[model]") {
  // ρ({a,b}) − ρ(a)ρ(b) with the closed-form SLDs of the γ and ζ directions.
  const double g = 0.8, z = 1.2;
  const double sh = 2 * std::sinh(z * g), e = std::exp(-z * g);
  const Element aV = pauli(1) * -(e * std::sin(g) + z * std::cos(g) / sh) + pauli(2) * (z * std::sin(g) / sh - e * std::cos(g));
  const Element aW = (pauli(1) * std::cos(g) - pauli(2) * std::sin(g)) * (-g / sh);
  const ParametricModel m = qubit_dephasing();
  const State s = state_at(m, pt({g, z}));
  const double cross = evaluate(s, jordan(aV, aW)).real() - evaluate(s, aV).real() * evaluate(s, aW).real();
  CHECK_THAT(quantum_metric(m, pt({g, z}))(0, 1), WithinRel(cross, 1e-9));
}

TEST_CASE("simplex classical and quantum metrics coincide", "[model]") {
  const ParametricModel m = simplex_affine(3);
  const RealVector theta = pt({0.2, 0.5});
  const RealMatrix q = quantum_metric(m, theta);
  const RealMatrix c = classical_metric(m, identity_povm(3), theta);
  CHECK((q - c).norm() < 1e-12);
  // Bernoulli: 1/(θ(1−θ))
  CHECK_THAT(quantum_metric(simplex_affine(2), pt({0.3}))(0, 0), WithinRel(1.0 / 0.21, 1e-12));
}

TEST_CASE("classical metric needs a regular point", "[model]") {
  const ParametricModel m = qubit_pure();
  CHECK_THROWS_AS(classical_metric(m, qubit_axis_povm(1), pt({0.0})), NonRegularError);
  CHECK_THAT(classical_metric(m, qubit_axis_povm(1), pt({0.5}))(0, 0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(classical_metric(m, qubit_axis_povm(3), pt({0.5}))(0, 0), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(classical_metric(m, identity_povm(2), pt({0.5})), SpecMismatchError);
}

TEST_CASE("regularity report", "[model]") {
  const ParametricModel m = qubit_pure();
  const std::vector<RealVector> grid = {pt({0.5}), pt({0.0}), pt({1.0})};
  const RegularityReport r = is_regular(qubit_axis_povm(1), m, grid);
  CHECK_FALSE(r.regular);
  CHECK(r.worst_point(0) == 0.0);
  CHECK_THAT(r.min_prob, WithinAbs(0.0, 1e-15));
  CHECK(is_regular(qubit_axis_povm(3), m, grid).regular);
  CHECK_THROWS_AS(is_regular(qubit_axis_povm(3), m, {}), PreconditionError);
}

TEST_CASE("lie group model", "[model]") {
  const State rho0((pauli(0) + pauli(1)) * 0.5);
  const ParametricModel m = lie_group_model({pauli(3) * 0.5}, rho0, true);
  CHECK_FALSE(m.has_analytic_partial());
  // rotation about z at unit rate of a pure state
  for (double t : {0.0, 0.7, 2.0}) {
    const State s = state_at(m, pt({t}));
    CHECK_THAT(evaluate(s, pauli(1)).real(), WithinAbs(std::cos(t), 1e-12));
    CHECK_THAT(std::abs(evaluate(s, pauli(2)).real()), WithinAbs(std::abs(std::sin(t)), 1e-12));
    CHECK_THAT(quantum_metric(m, pt({t}))(0, 0), WithinAbs(1.0, 1e-8));
  }
  CHECK_THROWS_AS(lie_group_model({}, rho0, true), PreconditionError);
  CHECK_THROWS_AS(lie_group_model({pauli(3) * kI}, rho0, true), PreconditionError);
  CHECK_THROWS_AS(lie_group_model({pauli(3)}, rho0, true, {Interval{}, Interval{}}), PreconditionError);
}

TEST_CASE("exp of self-adjoint elements", "[model]") {
  const Element u = exp_self_adjoint(pauli(3) * 0.3, true);
  CHECK(std::abs(u.block(0)(0, 0) - std::exp(Complex(0, 0.3))) < 1e-15);
  const Element x = exp_self_adjoint(Element::diagonal({1.0, 2.0}), false);
  CHECK_THAT(x.block(1)(0, 0).real(), WithinAbs(std::exp(2.0), 1e-12));
}

TEST_CASE("multi round models", "[model]") {
  const ParametricModel base = qubit_dephasing();
  const ParametricModel m3 = multi_round(base, 3);
  CHECK(m3.rounds() == 3);
  CHECK(m3.base() != nullptr);
  CHECK(m3.name() == "qubit_dephasing^3");
  CHECK(m3.spec().block_dims() == std::vector<int>{8});
  const RealVector theta = pt({0.9, 0.6});
  CHECK((quantum_metric(m3, theta) - 3.0 * quantum_metric(base, theta)).norm() < 1e-9);
  CHECK(distance(partial_derivative(m3, theta, 1), partial_derivative(m3, theta, 1, Differencing::numerical)) < 1e-8);
  CHECK_FALSE(m3.contains(pt({-1.0, 1.0})));
  CHECK(multi_round(simplex_affine(2), 2).spec().is_abelian());
  CHECK_THROWS_AS(multi_round(base, 0), PreconditionError);
  CHECK_THROWS_AS(multi_round(base, 12), PreconditionError);
  const ParametricModel mixed("mixed", AlgebraSpec({2, 1}), {Interval{}}, [](const RealVector&) {
    return Element(AlgebraSpec({2, 1}), {Matrix::Identity(2, 2) / 3.0, Matrix::Identity(1, 1) / 3.0});
  });
  CHECK_THROWS_AS(multi_round(mixed, 2), PreconditionError);
}
