#pragma once

// Optimal switching between regimes where switches happen only at Poisson
// arrival steps 1..K-1, at most one per arrival.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "penbsde/model.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/switching_costs.hpp"
#include "penbsde/value_field.hpp"

namespace penbsde {

struct RegimeAugmentedField {
    /// Per regime: continuation = no arrival at step k, arrival = best of holding or one switch.
    std::vector<AugmentedValueField> regimes;

    std::size_t regimeCount() const noexcept { return regimes.size(); }
    double root(std::size_t regime) const { return regimes.at(regime).root(); }
};

/// yCont^i = f^i dt + E[p yArr^i + (1-p) yCont^i]_{k+1},
/// yArr^i = max(yCont^i, max_{l != i}(yCont^l - C(i,l))), terminal xi^i.
/// Rates come from `plugIn` (a solved multi-regime field) or f^i(t, x, 0, 0).
RegimeAugmentedField poissonSwitchingDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                        std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                        const RegimeValueField* plugIn = nullptr);

/// Arrival-form multi-regime penalized roots against the switching DP roots, per regime.
IdentityReport switchingEqualsPenalizedIdentity(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                                double tolerance = kIdentityTolerance);

/// Markov switching decisions at arrival steps: target(k, j, regime) is the new
/// regime, or ImpulseResult::kNone to hold.
class SwitchingStrategy {
public:
    static SwitchingStrategy neverSwitch(std::size_t steps, std::size_t regimes);
    /// `decide(k, j, regime)` is consulted for k = 1..steps-1; returning the current
    /// regime means hold.
    static SwitchingStrategy fromFunction(std::size_t steps, std::size_t regimes,
                                          const std::function<std::size_t(std::size_t, std::size_t, std::size_t)>& decide);

    std::size_t steps() const noexcept { return table_.empty() ? 0 : table_.size() - 1; }
    std::size_t regimes() const noexcept { return regimes_; }

    /// kNone at step 0, at the horizon and without an arrival.
    std::size_t target(std::size_t k, std::size_t j, std::size_t regime, bool arrival) const;

private:
    std::size_t regimes_ = 0;
    std::vector<std::vector<std::vector<std::size_t>>> table_;
};

/// Switch at an arrival iff yCont^i <= max_{l != i}(yCont^l - C(i,l)); target is
/// the argmax with the lowest index on ties.
SwitchingStrategy extractSwitchingStrategy(const RegimeAugmentedField& field, const SwitchingCosts& costs);

/// Forward simulation from `initialRegime`: accrues f^{regime} dt, charges C at each
/// switch (always strictly inside the horizon) and pays xi of the final regime.
MonteCarloEstimate simulateSwitchingStrategy(const Lattice& lattice, const ArrivalOverlay& overlay,
                                             std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                             const SwitchingStrategy& strategy, std::size_t initialRegime,
                                             std::size_t paths, RandomStream& stream,
                                             const RegimeValueField* plugIn = nullptr);

/// Exact expected payoff of a Markov strategy, per initial regime, by backward summation.
std::vector<double> evaluateSwitchingStrategyExactly(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                     std::span<const ProblemSpec> regimes,
                                                     const SwitchingCosts& costs, const SwitchingStrategy& strategy,
                                                     const RegimeValueField* plugIn = nullptr);

/// Per initial regime, the maximum over every Markov strategy on the reachable
/// (step, node, regime) states, each evaluated by summation over all
/// (walk, arrival) scenarios. Refuses beyond 3 steps or 3 regimes.
std::vector<double> bruteForceSwitchingOracle(const Lattice& lattice, const ArrivalOverlay& overlay,
                                              std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                              const RegimeValueField* plugIn = nullptr);

/// Largest gain over all arrival nodes of two switches at one instant
/// (i -> l -> m, including round trips) against the one-switch value yArr^i.
/// Nonpositive under valid costs.
double sameInstantChainGain(const RegimeAugmentedField& field, const SwitchingCosts& costs);

/// Number of (step, node, i, l) where the strategy sends i to l and l straight back
/// to i, i.e. a zero-duration round trip if decisions were chained at one instant.
std::size_t countSameInstantRoundTrips(const SwitchingStrategy& strategy);

}  // namespace penbsde
