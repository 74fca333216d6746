#pragma once

// Optimal stopping restricted to Poisson arrival times on the lattice.
//
// State is (step, node, arrival flag). Stopping is allowed only at steps
// 1..K-1 carrying an arrival; reaching the horizon pays the terminal value.
// The driver enters as a frozen rate process: either the `rate` field of a
// solved penalized scheme (the plug-in) or f(t, x, 0, 0) for drivers that do
// not depend on the solution.

#include <cstddef>
#include <functional>
#include <vector>

#include "penbsde/model.hpp"
#include "penbsde/value_field.hpp"

namespace penbsde {

/// yCont(k,j) = f dt + E[p yArr + (1-p) yCont]_{k+1},  yArr = max(S, yCont),
/// with yArr = yCont = terminal on the horizon.
AugmentedValueField poissonStoppingDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                      const ProblemSpec& spec, const ValueField* plugIn = nullptr,
                                      SolveOptions options = {});

struct IdentityReport {
    double maxDiscrepancy = 0.0;
    std::size_t worstStep = 0;
    std::size_t worstNode = 0;
    double tolerance = 0.0;

    bool passed() const noexcept { return maxDiscrepancy <= tolerance; }
};

inline constexpr double kIdentityTolerance = 1e-12;

/// Node-wise |a - b| / max(1, |b|) over every retained step.
IdentityReport compareNodeArrays(const NodeArray& a, const NodeArray& b, double tolerance = kIdentityTolerance);

/// Solves the arrival-form penalized scheme, feeds its rates to the stopping
/// DP and compares the penalized Y against the no-stop-now value node by node.
IdentityReport penalizedEqualsStoppingIdentity(const Lattice& lattice, const ArrivalOverlay& overlay,
                                               const ProblemSpec& spec, double tolerance = kIdentityTolerance);

/// exp(-lambda(T-t)) xi + int_t^T exp(-lambda(s-t)) (f(s) + lambda max(S(s), Y(s))) ds
/// for deterministic data, by adaptive Gauss-Kronrod quadrature.
double intervalDiscountValue(const std::function<double(double)>& rate,
                             const std::function<double(double)>& obstacle, double terminal, double intensity,
                             double start, double horizon, const std::function<double(double)>& solution);

/// Markov stopping rule: decision per (step, node) when the step carries an arrival.
class StoppingRule {
public:
    static StoppingRule never(std::size_t steps);
    static StoppingRule atEveryArrival(std::size_t steps);
    /// `stopAt(k, j)` is consulted for k = 1..steps-1 only.
    static StoppingRule fromPredicate(std::size_t steps, const std::function<bool(std::size_t, std::size_t)>& stopAt);

    std::size_t steps() const noexcept { return table_.empty() ? 0 : table_.size() - 1; }

    /// Never stops at step 0, at the horizon, or without an arrival.
    bool stops(std::size_t k, std::size_t j, bool arrival) const noexcept {
        return arrival && k > 0 && k < steps() && table_[k][j] != 0;
    }

private:
    std::vector<std::vector<char>> table_;
};

/// Stop at an arrival iff yCont(k,j) <= S(t_k, x) (ties stop).
StoppingRule extractOptimalRule(const AugmentedValueField& field, const Lattice& lattice, const ProblemSpec& spec);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standardError = 0.0;
    std::size_t paths = 0;

    /// sigmas * SE plus a rounding floor of 1e-12 relative, so zero-variance payoffs
    /// are not judged on summation order.
    double band(double reference, double sigmas = 3.0) const noexcept;
    bool within(double reference, double sigmas = 3.0) const noexcept;
    bool atMost(double reference, double sigmas = 3.0) const noexcept {
        return mean <= reference + band(reference, sigmas);
    }
};

/// Accumulates a running mean and standard error (Welford).
class EstimateAccumulator {
public:
    void add(double sample) noexcept;
    MonteCarloEstimate estimate() const noexcept;

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Forward simulation of lattice paths and per-step arrival flags under `rule`;
/// payoff is the accrued rate up to the stopping step plus S there, or the terminal value.
MonteCarloEstimate simulateStoppingRule(const Lattice& lattice, const ArrivalOverlay& overlay,
                                        const ProblemSpec& spec, const StoppingRule& rule, std::size_t paths,
                                        RandomStream& stream, const ValueField* plugIn = nullptr);

/// Exact expected payoff of `rule` by summation over every (walk, arrival) scenario.
double evaluateStoppingRuleExactly(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                   const StoppingRule& rule, const ValueField* plugIn = nullptr);

/// Maximum over every Markov stopping rule, each evaluated by scenario summation.
/// Refuses (SizeGuardError) beyond 5 steps.
double bruteForceStoppingOracle(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                const ValueField* plugIn = nullptr);

/// Same maximum over rules that may also depend on the full arrival history.
/// Refuses beyond 3 steps.
double bruteForceHistoryStoppingOracle(const Lattice& lattice, const ArrivalOverlay& overlay,
                                       const ProblemSpec& spec, const ValueField* plugIn = nullptr);

struct AuxiliaryStoppingResult {
    /// arrival = hat value max(S, C), continuation = C, computed by the hat recursion.
    AugmentedValueField field;
    /// Value of the problem allowed to stop at the initial time.
    double root = 0.0;
};

/// Hat recursion yHat(k,j) = max(S, f dt + E[p yHat + (1-p) C]_{k+1}).
AuxiliaryStoppingResult auxiliaryStoppingDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                            const ProblemSpec& spec, const ValueField* plugIn = nullptr);

/// Snell envelope of the cumulated quantities (S + int f, xi + int f) on the
/// non-recombining (walk, arrival) tree. With allowStopAtStart the root may stop
/// immediately (auxiliary problem). Refuses beyond 12 steps.
double transformedSnellValue(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                             bool allowStopAtStart, const ValueField* plugIn = nullptr);

/// Largest |yCont - (f dt + E[p V + (1-p) yCont]_{k+1})| over nodes where `rule`
/// has not stopped, with V = S where the rule stops and yCont elsewhere, plus
/// |yArr - V| at every arrival node. Zero when the stopped value process is a martingale
/// (after adding the accrued rate).
double stoppedValueMartingaleDefect(const AugmentedValueField& field, const StoppingRule& rule,
                                    const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                    const ValueField* plugIn = nullptr);

/// Frozen driver rate at (k, j): plugIn->rate(k, j) when given, else f(t_k, x, 0, 0).
double frozenRate(const Lattice& lattice, const ProblemSpec& spec, const ValueField* plugIn, std::size_t k,
                  std::size_t j);

}  // namespace penbsde
