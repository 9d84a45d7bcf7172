#include "catch_amalgamated.hpp"

#include "cstar/estimation.hpp"
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

RealMatrix mat1(double x) { return RealMatrix::Constant(1, 1, x); }

}  // namespace

TEST_CASE("euclidean cost", "[estimation]") {
  RealMatrix w(2, 2);
  w << 2, 1, 1, 3;
  const CostFunction c = CostFunction::euclidean(w);
  CHECK(c.is_euclidean());
  const RealVector a = pt({1.0, 2.0}), b = pt({0.5, 1.0});
  // ½ dᵀWd with d = (0.5, 1): ½(0.5 + 1 + 3) = 2.25
  CHECK_THAT(c(a, b), WithinAbs(2.25, 1e-15));
  CHECK((c.gradient_first(a, b) - pt({2.0, 3.5})).norm() < 1e-15);
  CHECK_THAT(c.scaled(2.0)(a, b), WithinAbs(4.5, 1e-15));
  CHECK(c(a, a) == 0.0);
  RealMatrix bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(CostFunction::euclidean(bad), PreconditionError);
  bad << 1, 2, 0, 1;
  CHECK_THROWS_AS(CostFunction::euclidean(bad), PreconditionError);
  CHECK_THROWS_AS(CostFunction::euclidean(RealMatrix::Identity(2, 3)), PreconditionError);
}

TEST_CASE("custom cost uses numerical gradients", "[estimation]") {
  const CostFunction c = CostFunction::custom(
      [](const RealVector& x, const RealVector& y) { return 1.0 - std::cos(x(0) - y(0)); });
  CHECK_FALSE(c.is_euclidean());
  CHECK_THAT(c.gradient_first(pt({0.7}), pt({0.2}))(0), WithinAbs(std::sin(0.5), 1e-9));
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto xs = random_reals(2, rng, -1.0, 1.0);
    CHECK(c(pt({xs[0]}), pt({xs[1]})) >= 0.0);
    CHECK(c(pt({xs[0]}), pt({xs[0]})) == 0.0);
  }
}

TEST_CASE("estimators", "[estimation]") {
  CHECK_THROWS_AS(Estimator({}), PreconditionError);
  CHECK_THROWS_AS(Estimator::scalar({0.5, 0.5}), PreconditionError);
  CHECK_THROWS_AS(Estimator({pt({1.0}), pt({1.0, 2.0})}), PreconditionError);
  const Estimator e = Estimator::scalar({-1.0, 1.0});
  CHECK(e.size() == 2);
  CHECK(e.dim() == 1);
  const Estimator e2 = averaged_estimator(e, 2);
  REQUIRE(e2.size() == 4);
  CHECK(e2[0](0) == -1.0);
  CHECK(e2[1](0) == 0.0);
  CHECK(e2[2](0) == 0.0);
  CHECK(e2[3](0) == 1.0);
  CHECK_THROWS_AS(averaged_estimator(e, 0), PreconditionError);
}

TEST_CASE("bernoulli frequency estimator is efficient", "[estimation]") {
  const ParametricModel m = simplex_affine(2);
  const Povm p = identity_povm(2);
  const CostFunction c = CostFunction::euclidean(1);
  const Estimator e = Estimator::scalar({1.0, 0.0});
  for (double th : {0.2, 0.5, 0.8}) {
    const RealVector theta = pt({th});
    CHECK(std::abs(stationarity_residual(m, p, c, e, theta)(0)) <= 1e-12);
    CHECK_THAT(hessian(m, p, c, e, theta)(0, 0), WithinAbs(1.0, 1e-6));
    CHECK_THAT(covariance(m, p, c, e, theta)(0, 0), WithinAbs(th * (1 - th), 1e-10));
    // L(m, θ) = ½[θ(1−m)² + (1−θ)m²]
    const double m1 = 0.35;
    CHECK_THAT(loss(m, p, c, e, pt({m1}), theta),
               WithinAbs(0.5 * (th * (1 - m1) * (1 - m1) + (1 - th) * m1 * m1), 1e-15));
    const BoundReport r = cr_check(m, p, c, e, theta, {pt({1.0})});
    CHECK(r.passed);
    CHECK_THAT(*r.cramer_rao_min_eigenvalue, WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("cost element represents the loss", "[estimation]") {
  const ParametricModel m = qubit_pure();
  const Povm p = qubit_axis_povm(2);
  const CostFunction c = CostFunction::euclidean(1);
  const Estimator e = Estimator::scalar({-1.0, 1.0});
  const RealVector m1 = pt({0.3}), m2 = pt({-0.2});
  CHECK_THAT(evaluate(state_at(m, m2), cost_element(p, c, e, m1)).real(), WithinAbs(loss(m, p, c, e, m1, m2), 1e-14));
  CHECK_THROWS_AS(cost_element(p, c, Estimator::scalar({1, 2, 3}), m1), PreconditionError);
}

TEST_CASE("biased estimator is not stationary", "[estimation]") {
  const ParametricModel m = simplex_affine(2);
  const Estimator e = Estimator::scalar({1.0, 0.1});
  const CostFunction c = CostFunction::euclidean(1);
  CHECK_THAT(stationarity_residual(m, identity_povm(2), c, e, pt({0.5}))(0), WithinAbs(-0.05, 1e-15));
  try {
    hessian(m, identity_povm(2), c, e, pt({0.5}));
    FAIL("expected NonStationaryError");
  } catch (const NonStationaryError& err) {
    REQUIRE(err.residual().size() == 1);
    CHECK_THAT(err.residual()[0], WithinAbs(-0.05, 1e-15));
  }
}

TEST_CASE("shape and regularity errors", "[estimation]") {
  const ParametricModel m = qubit_pure();
  const CostFunction c = CostFunction::euclidean(1);
  CHECK_THROWS_AS(loss(m, qubit_axis_povm(2), c, Estimator::scalar({1, 2, 3}), pt({0}), pt({0})), PreconditionError);
  CHECK_THROWS_AS(loss(m, qubit_axis_povm(2), c, Estimator({pt({1, 0}), pt({0, 1})}), pt({0}), pt({0})),
                  PreconditionError);
  CHECK_THROWS_AS(loss(m, identity_povm(2), c, Estimator::scalar({0, 1}), pt({0}), pt({0})), SpecMismatchError);
  CHECK_THROWS_AS(stationarity_residual(m, qubit_axis_povm(1), c, Estimator::scalar({0, 1}), pt({0})),
                  NonRegularError);
}

TEST_CASE("covariance from a given hessian and score", "[estimation]") {
  RealMatrix h(2, 2), s(2, 2);
  h << 2, 0, 0, 4;
  s << 4, 2, 2, 8;
  const RealMatrix cov = covariance_from(h, s);
  RealMatrix expect(2, 2);
  expect << 1.0, 0.25, 0.25, 0.5;
  CHECK((cov - expect).norm() < 1e-15);
  CHECK_THROWS_AS(covariance_from(RealMatrix::Zero(2, 2), s), NumericalError);
  CHECK_THAT(condition_number(h), WithinAbs(2.0, 1e-15));
  // score matrix for the Bernoulli frequency estimator: Σ p_j (θ − 𝓔_j)² = θ(1−θ)
  CHECK_THAT(score_matrix(CostFunction::euclidean(1), Estimator::scalar({1, 0}), {0.3, 0.7}, pt({0.3}))(0, 0),
             WithinAbs(0.21, 1e-15));
}

TEST_CASE("cramer-rao gap of a redundant measurement", "[estimation]") {
  // effects ½e1, ½e1, e2 with estimator (2, 0, 0): Cov = 2θ − θ², (G^Mc)⁻¹ = θ(1−θ), gap θ.
  const Element e1 = Element::diagonal({1.0, 0.0}), e2 = Element::diagonal({0.0, 1.0});
  const Povm p({e1 * 0.5, e1 * 0.5, e2});
  const ParametricModel m = simplex_affine(2);
  const Estimator e = Estimator::scalar({2.0, 0.0, 0.0});
  for (double th : {0.2, 0.6}) {
    const BoundReport r = helstrom_check(m, p, CostFunction::euclidean(1), e, pt({th}), {pt({1.0})});
    CHECK(r.passed);
    CHECK_THAT((*r.covariance)(0, 0), WithinAbs(2 * th - th * th, 1e-9));
    CHECK_THAT(*r.gaps[0].cramer_rao, WithinAbs(th, 1e-9));
    CHECK_THAT(*r.gaps[0].helstrom, WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("helstrom chain on the pure qubit", "[estimation]") {
  const ParametricModel m = qubit_pure();
  const BoundReport r = helstrom_check(m, qubit_axis_povm(2), CostFunction::euclidean(1), Estimator::scalar({-1, 1}),
                                       pt({0.0}), {pt({1.0})});
  CHECK(r.passed);
  CHECK_THAT((*r.covariance)(0, 0), WithinAbs(1.0, 1e-8));
  CHECK_THAT(r.classical_metric(0, 0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(*r.helstrom_min_eigenvalue, WithinAbs(0.0, 1e-12));
  CHECK_FALSE(r.gaps[0].round_floor.has_value());
  CHECK_THROWS_AS(helstrom_check(m, qubit_axis_povm(2), CostFunction::euclidean(1), Estimator::scalar({-1, 1}),
                                 pt({0.0}), {pt({1.0, 0.0})}),
                  PreconditionError);
}

TEST_CASE("multi-round floor", "[estimation]") {
  const ParametricModel m = multi_round(qubit_pure(), 3);
  const Povm p = tensor_power_povm(qubit_axis_povm(2), 3);
  const Estimator e = averaged_estimator(Estimator::scalar({-1, 1}), 3);
  const BoundReport r = helstrom_check(m, p, CostFunction::euclidean(1), e, pt({0.0}), {pt({1.0})});
  CHECK(r.passed);
  CHECK(r.rounds == 3);
  CHECK_THAT(*r.gaps[0].round_floor, WithinAbs(1.0 / 3.0, 1e-12));
  CHECK_THAT((*r.covariance)(0, 0), WithinAbs(1.0 / 3.0, 1e-8));
}

TEST_CASE("metric chain reports a singular classical metric", "[estimation]") {
  const ParametricModel m = qubit_dephasing();
  const BoundReport r = metric_chain(m, qubit_axis_povm(3), pt({1.0, 1.0}), {pt({1.0, 0.0})});
  CHECK(r.classical_singular);
  CHECK(r.passed);
  CHECK_FALSE(r.helstrom_min_eigenvalue.has_value());
  CHECK_FALSE(r.gaps[0].helstrom.has_value());
  CHECK(*r.metric_gap_min_eigenvalue >= -1e-12);
  const BoundReport q = metric_chain(m, qubit_axis_povm(1), pt({1.0, 1.0}), {pt({1.0, 0.0})});
  CHECK(*q.metric_gap_min_eigenvalue >= -1e-8);
}

TEST_CASE("non-euclidean cost", "[estimation]") {
  // symmetric estimator around θ keeps any even cost stationary
  const CostFunction c = CostFunction::custom([](const RealVector& x, const RealVector& y) {
    const double d = x(0) - y(0);
    return d * d + d * d * d * d;
  });
  const ParametricModel m = simplex_affine(2);
  const Estimator e = Estimator::scalar({1.0, 0.0});
  const RealVector theta = pt({0.5});
  CHECK(std::abs(stationarity_residual(m, identity_povm(2), c, e, theta)(0)) < 1e-9);
  // H = Σ p (2 + 12 d²) = 2 + 12·0.25 = 5
  CHECK_THAT(hessian(m, identity_povm(2), c, e, theta)(0, 0), WithinRel(5.0, 1e-5));
}
