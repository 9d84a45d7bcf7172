#include "catch_amalgamated.hpp"

#include "cstar/check_suite.hpp"
#include "cstar/measurement.hpp"
#include "cstar/random.hpp"

using namespace cstar;
using Catch::Matchers::WithinAbs;

namespace {

State qubit(double x, double y, double z) {
  return State((pauli(0) + pauli(1) * x + pauli(2) * y + pauli(3) * z) * 0.5);
}

}  // namespace

TEST_CASE("povm construction", "[measurement]") {
  const Povm p = qubit_axis_povm(3);
  CHECK(p.size() == 2);
  CHECK(p.labels() == std::vector<std::string>{"+", "-"});
  CHECK(identity_povm(3).labels() == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK_THROWS_AS(Povm({}), PreconditionError);
  CHECK_THROWS_AS(Povm({pauli(0)}, {"a", "b"}), PreconditionError);
  CHECK_THROWS_AS(Povm({pauli(1) * kI}), PreconditionError);
  CHECK_THROWS_AS(Povm({pauli(0), Element::diagonal({1.0, 0.0})}), SpecMismatchError);
}

TEST_CASE("povm validation", "[measurement]") {
  CHECK(validate_povm(qubit_axis_povm(1)).passed);
  CHECK(validate_povm(trivial_povm(AlgebraSpec({2, 1}))).passed);
  const PovmDiagnostics bad = validate_povm(faulty_povm());
  CHECK_FALSE(bad.passed);
  CHECK_THAT(bad.min_eigenvalue, WithinAbs(-1.0, 1e-15));
  CHECK_THAT(bad.unitality_error, WithinAbs(0.0, 1e-15));
  const PovmDiagnostics short_sum = validate_povm(Povm({pauli(0) * 0.5}));
  CHECK_FALSE(short_sum.passed);
  CHECK_THAT(short_sum.unitality_error, WithinAbs(0.5, 1e-15));
  Rng rng(1);
  CHECK(validate_povm(random_povm(AlgebraSpec({2, 3}), 5, rng), 1e-10).passed);
}

TEST_CASE("push forward of states and tangents", "[measurement]") {
  const State s = qubit(0.0, 0.0, 0.4);
  const ProbabilityVector p = push_forward(qubit_axis_povm(3), s);
  CHECK_THAT(p[0], WithinAbs(0.7, 1e-15));
  CHECK_THAT(p[1], WithinAbs(0.3, 1e-15));
  CHECK(push_forward(trivial_povm(s.spec()), s).values() == std::vector<double>{1.0});
  const TangentVector v(s, pauli(3) * 0.1);
  const auto dp = push_forward_tangent(qubit_axis_povm(3), v);
  CHECK_THAT(dp[0], WithinAbs(0.1, 1e-15));
  CHECK_THAT(dp[1], WithinAbs(-0.1, 1e-15));
  CHECK_THROWS_AS(push_forward(identity_povm(2), s), SpecMismatchError);
}

TEST_CASE("eigenbasis povm", "[measurement]") {
  const Povm p = eigenbasis_povm(pauli(2));
  REQUIRE(p.size() == 2);
  CHECK(validate_povm(p).passed);
  // ascending eigenvalues: the −1 eigenprojector comes first
  CHECK(distance(p.effect(0), (pauli(0) - pauli(2)) * 0.5) < 1e-14);
  CHECK(distance(p.effect(1), (pauli(0) + pauli(2)) * 0.5) < 1e-14);
  CHECK(eigenbasis_povm(Element(AlgebraSpec({2, 1}))).size() == 3);
}

TEST_CASE("probability vectors", "[measurement]") {
  CHECK_THROWS_AS(ProbabilityVector({}), PreconditionError);
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), PreconditionError);
  CHECK_THROWS_AS(ProbabilityVector({1.1, -0.1}), PreconditionError);
  CHECK(ProbabilityVector({0.25, 0.75}).is_interior());
  CHECK_FALSE(ProbabilityVector({0.0, 1.0}).is_interior());
}

TEST_CASE("fisher-rao by hand", "[measurement]") {
  const ProbabilityVector p({0.2, 0.3, 0.5});
  // 0.1²/0.2 + 0.2²/0.3 + 0.3²/0.5
  CHECK_THAT(fisher_rao(p, {0.1, 0.2, -0.3}, {0.1, 0.2, -0.3}), WithinAbs(0.05 + 0.04 / 0.3 + 0.18, 1e-15));
  CHECK_THAT(fisher_rao(p, {1, -1, 0}, {0, 1, -1}), WithinAbs(-1.0 / 0.3, 1e-14));
  CHECK_THROWS_AS(fisher_rao(ProbabilityVector({0.0, 1.0}), {1, -1}, {1, -1}), NonRegularError);
  CHECK_THROWS_AS(fisher_rao(p, {1, 0, 0}, {1, 0, 0}), PreconditionError);
  CHECK_THROWS_AS(fisher_rao(p, {1, -1}, {1, -1}), PreconditionError);
}

TEST_CASE("lift of functions", "[measurement]") {
  const Povm p = qubit_axis_povm(3);
  CHECK(distance(lift_function(p, {1.0, -1.0}), pauli(3)) < 1e-15);
  CHECK(distance(lift_function(p, {2.0, 2.0}), pauli(0) * 2.0) < 1e-15);
  CHECK_THROWS_AS(lift_function(p, {1.0}), PreconditionError);
}

TEST_CASE("kadison defect", "[measurement]") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Povm p = random_povm(AlgebraSpec::full(3), 4, rng);
    CHECK(kadison_defect(p, random_reals(4, rng, -2, 2)) >= -1e-10);
  }
  CHECK(std::abs(kadison_defect(qubit_axis_povm(2), {3.0, -1.0})) <= 1e-12);
  CHECK(std::abs(kadison_defect(identity_povm(4), {3.0, -1.0, 0.5, 2.0})) <= 1e-12);
  CHECK(kadison_defect(faulty_povm(), {1.0, 0.0}) < -1.0);
}

TEST_CASE("tensor power povm", "[measurement]") {
  const Povm p3 = tensor_power_povm(qubit_axis_povm(3), 3);
  CHECK(p3.size() == 8);
  CHECK(p3.spec().block_dims() == std::vector<int>{8});
  CHECK(p3.labels().front() == "+,+,+");
  CHECK(p3.labels()[1] == "+,+,-");
  CHECK(p3.labels().back() == "-,-,-");
  CHECK(validate_povm(p3).passed);
  const State s = qubit(0.0, 0.0, 0.4);
  const State s3(tensor_elements({s.density(), s.density(), s.density()}));
  CHECK_THAT(push_forward(p3, s3)[1], WithinAbs(0.7 * 0.7 * 0.3, 1e-15));
  CHECK(tensor_power_povm(qubit_axis_povm(1), 1).size() == 2);
  CHECK_THROWS_AS(tensor_power_povm(qubit_axis_povm(1), 0), PreconditionError);
  CHECK_THROWS_AS(tensor_power_povm(qubit_axis_povm(1), 21), PreconditionError);
}
