#pragma once

// Backward-induction solvers for penalized, reflected, multi-regime and
// Z-constrained BSDEs on the Brownian lattice.
//
// Two penalty discretizations are provided:
//  * implicit: the penalty lambda*(S-Y)^+ is solved in closed form inside each
//    step, the driver is explicit at the predictor E[Y_{k+1}];
//  * arrival form: the penalty acts on the step k+1 values with weight
//    p = 1 - exp(-lambda dt), i.e. Y_k = E[Y + p (S-Y)^+]_{k+1} + f dt. This is
//    the discretization on which the Poisson stopping, switching and dual
//    control problems coincide with the penalized equation node by node.

#include <span>
#include <vector>

#include "penbsde/constraint_set.hpp"
#include "penbsde/model.hpp"
#include "penbsde/switching_costs.hpp"
#include "penbsde/value_field.hpp"

namespace penbsde {

/// Largest admissible lambda*dt for the implicit schemes.
inline constexpr double kPenaltyStabilityBound = 10.0;

/// Y = (Y0 + w S) / (1 + w) when that stays below S, else Y0 (w = lambda dt).
inline double implicitPenaltyStep(double predictor, double obstacle, double weight) noexcept {
    const double candidate = (predictor + weight * obstacle) / (1.0 + weight);
    return candidate < obstacle ? candidate : predictor;
}

ValueField solvePenalized(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options = {});

ValueField solvePenalizedArrival(const Lattice& lattice, const ArrivalOverlay& overlay,
                                 const ProblemSpec& spec, SolveOptions options = {});

/// Discretely reflected scheme Y = max(S, E + f dt); obstaclePush holds the reflection jump.
ValueField solveReflected(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options = {});

struct LadderEntry {
    double intensity;
    double root;
    double rootGap;  // reflected root - penalized root
    double supGap;   // max over nodes of |reflected - penalized|
};

struct MonotonicityViolation {
    std::size_t ladderIndex;  // entry i compared against entry i+1
    std::size_t step;
    std::size_t node;
    double amount;
};

struct LadderReport {
    double reflectedRoot = 0.0;
    std::vector<LadderEntry> entries;
    std::vector<MonotonicityViolation> violations;

    bool monotone() const noexcept { return violations.empty(); }
    /// Sup-norm gaps nonincreasing along the ladder (within 1e-12).
    bool gapsDecreasing() const noexcept;
};

inline constexpr double kLadderTolerance = 1e-10;

/// Solves the implicit penalized scheme for each intensity (strictly increasing)
/// and compares node-wise against each other and against solveReflected.
LadderReport lambdaLadder(const Lattice& lattice, const ProblemSpec& spec, std::span<const double> intensities);

/// Implicit multi-regime scheme; the impulse target max_{l!=i}(Y^l - C(i,l)) is
/// frozen at the other regimes' predictor values. The regimes' own penalty and
/// obstacle fields are ignored.
RegimeValueField solveMultiPenalized(const Lattice& lattice, std::span<const ProblemSpec> regimes,
                                     const SwitchingCosts& costs, double intensity,
                                     SolveOptions options = {});

RegimeValueField solveMultiPenalizedArrival(const Lattice& lattice, const ArrivalOverlay& overlay,
                                            std::span<const ProblemSpec> regimes,
                                            const SwitchingCosts& costs, SolveOptions options = {});

/// Y^i = max(Y0^i, max_{l != i}(Y0^l - C(i,l))).
RegimeValueField solveMultiReflected(const Lattice& lattice, std::span<const ProblemSpec> regimes,
                                     const SwitchingCosts& costs, SolveOptions options = {});

/// Implicit scheme with the extra driver term m * dist(Z, set). Requires
/// m >= 0 and m * sqrt(dt) < 1.
ValueField solveConstrainedPenalized(const Lattice& lattice, const ProblemSpec& spec,
                                     const ConstraintSet& set, double constraintPenalty,
                                     SolveOptions options = {});

ValueField solveConstrainedPenalizedArrival(const Lattice& lattice, const ArrivalOverlay& overlay,
                                            const ProblemSpec& spec, const ConstraintSet& set,
                                            double constraintPenalty, SolveOptions options = {});

/// Throws InvalidParameter when lambda is negative or lambda*dt breaks the stability bound.
void checkPenaltyGuard(double intensity, double dt);

/// Throws InvalidParameter unless m >= 0 and m * sqrt(dt) < 1.
void checkConstraintGuard(double constraintPenalty, double dt);

}  // namespace penbsde
