#pragma once

// Z-constrained penalized problems as stopping plus a bounded drift control:
// the penalty m*dist(z) is the value of sup over |nu| <= m of z*nu - support(nu),
// realized on the lattice by tilting the branch probabilities.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "penbsde/constraint_set.hpp"
#include "penbsde/model.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/value_field.hpp"

namespace penbsde {

/// Maximizer of z*nu - support(nu) over |nu| <= m: zero inside the set, else
/// m times the outward normal at the projection.
double solveAlgebraicControl(const ConstraintSet& set, double bound, double z);

/// |m dist(z) - (z nu - support(nu))|; +inf when nu is outside the barrier cone.
double algebraicResidual(const ConstraintSet& set, double bound, double z, double nu);

/// Worst residual of m dist(z) = sup_nu {z nu - support(nu)} over `zs`: the closed
/// form is attained at the algebraic control, and no sampled admissible nu may beat it.
double penaltyDualityCheck(const ConstraintSet& set, double bound, std::span<const double> zs,
                           std::span<const double> nuSamples);

/// Node function nu(k, j) on steps 0..K-1 with |nu| <= bound.
class DualControl {
public:
    DualControl() = default;
    DualControl(std::size_t steps, double bound);

    static DualControl zero(std::size_t steps, double bound);
    /// Throws InvalidParameter if some value exceeds the bound.
    static DualControl fromFunction(std::size_t steps, double bound,
                                    const std::function<double(std::size_t, std::size_t)>& nu);

    std::size_t steps() const noexcept { return values_.size(); }
    double bound() const noexcept { return bound_; }
    double operator()(std::size_t k, std::size_t j) const { return values_.at(k).at(j); }
    void set(std::size_t k, std::size_t j, double nu);

    /// Every value within the bound and inside the barrier cone of `set`.
    bool admissible(const ConstraintSet& set) const;

private:
    double bound_ = 0.0;
    std::vector<std::vector<double>> values_;
};

/// Branch probabilities (1 +- nu sqrt(dt)) / 2 per node.
class TiltedLaw {
public:
    std::size_t steps() const noexcept { return up_.size(); }
    double upProbability(std::size_t k, std::size_t j) const { return up_.at(k).at(j); }
    double downProbability(std::size_t k, std::size_t j) const { return down_.at(k).at(j); }
    /// Tilted one-step mean of the walk increment.
    double incrementMean(std::size_t k, std::size_t j, double sqrtDt) const {
        return (upProbability(k, j) - downProbability(k, j)) * sqrtDt;
    }

    /// Product of 2 p(branch) along the path; bit k of `walk` set means up at step k.
    double pathLikelihood(std::uint64_t walk) const;

private:
    friend TiltedLaw girsanovWeights(const Lattice& lattice, const DualControl& control);
    std::vector<std::vector<double>> up_;
    std::vector<std::vector<double>> down_;
};

/// Throws InvalidParameter naming the node where |nu| sqrt(dt) >= 1.
TiltedLaw girsanovWeights(const Lattice& lattice, const DualControl& control);

/// Base-law expectation of the path likelihood by enumerating all 2^K walks.
/// Refuses beyond 20 steps.
double likelihoodExpectation(const TiltedLaw& law);

struct ConstrainedRepresentation {
    AugmentedValueField field;
    /// nu* chosen at each node.
    DualControl control;
};

/// yCont = f dt + E^nu*[p yArr + (1-p) yCont]_{k+1} - support(nu*) dt, nu* the algebraic
/// control of the martingale coefficient of the mixed next row; yArr = max(S, yCont).
ConstrainedRepresentation constrainedRepresentationDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                      const ProblemSpec& spec, const ConstraintSet& set,
                                                      double bound, const ValueField* plugIn = nullptr);

/// Arrival-form constrained penalized solve against the representation DP, node by node.
IdentityReport constrainedEqualsRepresentationIdentity(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                       const ProblemSpec& spec, const ConstraintSet& set,
                                                       double bound, double tolerance = kIdentityTolerance);

/// Paths drawn under the tilted law of `control`; accrues (f - support(nu)) dt and
/// applies `rule` at arrivals.
MonteCarloEstimate simulateDualControl(const Lattice& lattice, const ArrivalOverlay& overlay,
                                       const ProblemSpec& spec, const ConstraintSet& set,
                                       const DualControl& control, const StoppingRule& rule, std::size_t paths,
                                       RandomStream& stream, const ValueField* plugIn = nullptr);

/// Exact value of (control, rule) under the tilted law, by backward summation.
double evaluateDualControlExactly(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                  const ConstraintSet& set, const DualControl& control, const StoppingRule& rule,
                                  const ValueField* plugIn = nullptr);

struct ConstrainedLadderReport {
    std::vector<double> intensities;
    std::vector<double> bounds;
    /// roots[i][l]: implicit constrained penalized root at intensities[i], bounds[l].
    std::vector<std::vector<double>> roots;

    bool monotoneInIntensity(double tolerance = 1e-10) const;
    bool monotoneInBound(double tolerance = 1e-10) const;
};

ConstrainedLadderReport reflectedConstrainedLadder(const Lattice& lattice, const ProblemSpec& spec,
                                                   const ConstraintSet& set, std::span<const double> intensities,
                                                   std::span<const double> bounds);

}  // namespace penbsde
