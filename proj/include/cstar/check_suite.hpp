#pragma once

// Seeded property suite over the library's structural guarantees: Kadison's
// inequality, metric majorization, N-round scaling, unitary invariance of G,
// and geodesic validity. Deterministic for a given seed and trial count.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cstar/estimation.hpp"
#include "cstar/measurement.hpp"
#include "cstar/model.hpp"
#include "cstar/random.hpp"
#include "cstar/state_space.hpp"

namespace cstar {

struct InvariantResult {
  std::string name;
  int trials = 0;
  /// Worst observed value of the checked quantity (a slack: larger is better
  /// for lower bounds, smaller is better for error norms).
  double worst = 0.0;
  double threshold = 0.0;
  bool lower_bound = true;  ///< pass iff worst >= threshold; otherwise worst <= threshold
  bool passed = true;
};

struct CheckOptions {
  unsigned long long seed = 42;
  int trials = 200;
  bool inject_faulty_povm = false;
};

struct CheckReport {
  unsigned long long seed = 0;
  std::vector<InvariantResult> results;
  bool passed() const {
    return std::all_of(results.begin(), results.end(), [](const InvariantResult& r) { return r.passed; });
  }
};

namespace detail {

inline void finish(InvariantResult& r) { r.passed = r.lower_bound ? r.worst >= r.threshold : r.worst <= r.threshold; }

inline int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace detail

/// A unital but non-positive "measurement" that violates Kadison's inequality.
inline Povm faulty_povm() {
  Matrix m(2, 2);
  m << 2.0, 0.0, 0.0, -1.0;
  const Element e(m);
  return Povm({e, identity(e.spec()) - e});
}

inline InvariantResult check_kadison(Rng& rng, int trials, bool inject_faulty = false) {
  InvariantResult r{"kadison", 0, INFINITY, -1e-10, true, true};
  for (int t = 0; t < trials; ++t) {
    const AlgebraSpec spec = AlgebraSpec::full(detail::pick(rng, 2, 3));
    const Povm p = random_povm(spec, detail::pick(rng, 2, 6), rng);
    r.worst = std::min(r.worst, kadison_defect(p, random_reals(p.size(), rng, -2.0, 2.0)));
    ++r.trials;
  }
  if (inject_faulty) {
    r.worst = std::min(r.worst, kadison_defect(faulty_povm(), {1.0, 0.0}));
    ++r.trials;
  }
  detail::finish(r);
  return r;
}

/// Random Lie-group model with d ∈ {1,2} generators on a random faithful state.
inline ParametricModel random_lie_model(const AlgebraSpec& spec, int d, Rng& rng) {
  std::vector<Element> gens;
  for (int r = 0; r < d; ++r) gens.push_back(random_self_adjoint(spec, rng));
  const bool skew = std::bernoulli_distribution(0.5)(rng);
  return lie_group_model(std::move(gens), random_faithful_state(spec, rng), skew);
}

inline InvariantResult check_majorization(Rng& rng, int trials) {
  InvariantResult r{"majorization", 0, INFINITY, -1e-8, true, true};
  for (int t = 0; t < trials; ++t) {
    const AlgebraSpec spec = AlgebraSpec::full(detail::pick(rng, 2, 3));
    const int d = detail::pick(rng, 1, 2);
    const ParametricModel model = random_lie_model(spec, d, rng);
    const Povm p = random_povm(spec, detail::pick(rng, 2, 6), rng);
    RealVector theta(d);
    for (int i = 0; i < d; ++i) theta(i) = random_reals(1, rng, -0.5, 0.5)[0];
    const RealMatrix gap = quantum_metric(model, theta) - classical_metric(model, p, theta);
    r.worst = std::min(r.worst, min_sym_eigenvalue(gap));
    ++r.trials;
  }
  detail::finish(r);
  return r;
}

inline InvariantResult check_round_scaling() {
  InvariantResult r{"round_scaling", 0, 0.0, 1e-6, false, true};
  const std::vector<std::pair<ParametricModel, std::vector<RealVector>>> cases = {
      {qubit_pure(), {RealVector::Constant(1, -0.7), RealVector::Constant(1, 0.3), RealVector::Constant(1, 1.9)}},
      {qubit_dephasing(),
       {(RealVector(2) << 0.5, 0.5).finished(), (RealVector(2) << 1.0, 1.0).finished(),
        (RealVector(2) << 1.5, 0.7).finished()}}};
  for (const auto& [model, points] : cases)
    for (int n : {2, 3}) {
      const ParametricModel rounds = multi_round(model, n);
      for (const auto& theta : points) {
        const double err = (quantum_metric(rounds, theta) - n * quantum_metric(model, theta)).norm();
        r.worst = std::max(r.worst, err);
        ++r.trials;
      }
    }
  detail::finish(r);
  return r;
}

inline InvariantResult check_unitary_invariance(Rng& rng, int trials) {
  InvariantResult r{"unitary_invariance", 0, 0.0, 1e-8, false, true};
  for (int t = 0; t < trials; ++t) {
    const AlgebraSpec spec = AlgebraSpec::full(detail::pick(rng, 2, 3));
    const State s = random_faithful_state(spec, rng);
    const TangentVector v = gradient_vector(s, random_self_adjoint(spec, rng));
    const TangentVector w = gradient_vector(s, random_self_adjoint(spec, rng));
    const Element u = random_unitary(spec, rng);
    const TangentVector pv = group_action_tangent(u, v);
    const TangentVector pw = group_action_tangent(u, w);
    const double err = std::abs(metric(pv.base(), pv, pw) - metric(s, v, w));
    r.worst = std::max(r.worst, err / std::max(1.0, std::abs(metric(s, v, w))));
    ++r.trials;
  }
  detail::finish(r);
  return r;
}

/// Worst positivity and trace errors of ν(t) over t ∈ [−3, 3] in 0.1 steps.
struct GeodesicSweep {
  double min_eigenvalue = INFINITY;
  double max_trace_error = 0.0;
};

inline GeodesicSweep sweep_geodesic(const State& s, const TangentVector& v) {
  GeodesicSweep out;
  for (int i = -30; i <= 30; ++i) {
    const State nu = geodesic(s, v, 0.1 * i);
    out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigenvalue(nu.density()));
    out.max_trace_error = std::max(out.max_trace_error, std::abs(trace(nu.density()).real() - 1.0));
  }
  return out;
}

/// Random (state, tangent) pair on a qubit or qutrit; pure states with probability ½.
inline std::pair<State, TangentVector> random_state_and_tangent(Rng& rng) {
  const int n = detail::pick(rng, 2, 3);
  const AlgebraSpec spec = AlgebraSpec::full(n);
  const bool pure = std::bernoulli_distribution(0.5)(rng);
  State s = pure ? random_pure_state(n, rng) : random_faithful_state(spec, rng);
  TangentVector v = fundamental_vector(s, random_self_adjoint(spec, rng), random_self_adjoint(spec, rng));
  return {std::move(s), std::move(v)};
}

inline InvariantResult check_geodesic_validity(Rng& rng, int trials) {
  InvariantResult r{"geodesic_validity", 0, INFINITY, -1e-9, true, true};
  bool trace_ok = true;
  for (int t = 0; t < trials; ++t) {
    const auto [s, v] = random_state_and_tangent(rng);
    const GeodesicSweep sw = sweep_geodesic(s, v);
    r.worst = std::min(r.worst, sw.min_eigenvalue);
    trace_ok = trace_ok && sw.max_trace_error <= 1e-12;
    ++r.trials;
  }
  detail::finish(r);
  r.passed = r.passed && trace_ok;
  return r;
}

inline CheckReport run_checks(const CheckOptions& opts) {
  Rng rng(opts.seed);
  CheckReport rep;
  rep.seed = opts.seed;
  const int light = std::max(1, opts.trials / 4);
  rep.results.push_back(check_kadison(rng, opts.trials, opts.inject_faulty_povm));
  rep.results.push_back(check_majorization(rng, opts.trials));
  rep.results.push_back(check_round_scaling());
  rep.results.push_back(check_unitary_invariance(rng, light));
  rep.results.push_back(check_geodesic_validity(rng, light));
  return rep;
}

}  // namespace cstar
