#pragma once

// Instance builders shared by the experiment runner, the tests and the benchmarks.

#include <cstddef>
#include <vector>

#include "penbsde/constraint_set.hpp"
#include "penbsde/model.hpp"
#include "penbsde/random_stream.hpp"
#include "penbsde/switching_costs.hpp"

namespace penbsde::harness {

double uniformIn(RandomStream& stream, double lo, double hi);
/// Uniform index in [0, n).
std::size_t uniformIndex(RandomStream& stream, std::size_t n);

/// f = rate, S = obstacle, xi = terminal, all constant.
ProblemSpec constantProblem(double rate, double obstacle, double terminal, double intensity);

/// Piecewise-affine data in (t, x): driver a(t, x) + b y + c z with |b|, |c| <= 0.5
/// when `nonlinear`, else a(t, x) alone; obstacle and terminal with one kink each.
ProblemSpec randomProblem(RandomStream& stream, bool nonlinear, double intensity = 0.0);

/// Costs c + noise off the diagonal, noise within c/4, so every triangle margin is positive.
SwitchingCosts randomValidCosts(RandomStream& stream, std::size_t regimes);

struct RandomSwitchingInstance {
    std::vector<ProblemSpec> regimes;
    SwitchingCosts costs;
};

RandomSwitchingInstance randomSwitching(RandomStream& stream, std::size_t regimes, bool nonlinear);

/// One of interval, ball, singleton, whole line with random bounds.
ConstraintSet randomConstraintSet(RandomStream& stream);

/// Deterministic two-regime instance: f = (1, 0), xi = 0, both costs `cost`.
RandomSwitchingInstance twoRegimeInstance(double cost);

}  // namespace penbsde::harness
