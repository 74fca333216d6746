#include "penbsde/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "node_tables.hpp"
#include "penbsde/penalized.hpp"

namespace penbsde {

ConstraintSet ConstraintSet::interval(double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || !(lower <= 0.0 && 0.0 <= upper))
        throw InvalidParameter("interval constraint must contain the origin");
    return ConstraintSet(Kind::Interval, lower, upper);
}

ConstraintSet ConstraintSet::ball(double radius) {
    if (!(radius >= 0.0)) throw InvalidParameter("ball radius must be nonnegative");
    return ConstraintSet(Kind::Ball, -radius, radius);
}

ConstraintSet ConstraintSet::singleton() { return ConstraintSet(Kind::Singleton, 0.0, 0.0); }

ConstraintSet ConstraintSet::wholeLine() { return ConstraintSet(Kind::WholeLine, -kInfinity, kInfinity); }

double ConstraintSet::project(double z) const noexcept { return std::clamp(z, lower_, upper_); }

double distanceToSet(const ConstraintSet& set, double z) noexcept {
    return std::max({set.lower() - z, 0.0, z - set.upper()});
}

double supportFunction(const ConstraintSet& set, double nu) noexcept {
    if (nu == 0.0) return 0.0;
    const double end = nu > 0.0 ? set.upper() : set.lower();
    if (std::isinf(end)) return kInfinity;
    return end * nu;
}

bool inBarrierCone(const ConstraintSet& set, double nu) noexcept { return std::isfinite(supportFunction(set, nu)); }

double solveAlgebraicControl(const ConstraintSet& set, double bound, double z) {
    if (!(bound >= 0.0)) throw InvalidParameter("dual control bound must be nonnegative");
    if (set.contains(z) || bound == 0.0) return 0.0;
    return z > set.upper() ? bound : -bound;
}

double algebraicResidual(const ConstraintSet& set, double bound, double z, double nu) {
    const double support = supportFunction(set, nu);
    if (!std::isfinite(support)) return kInfinity;
    return std::abs(bound * distanceToSet(set, z) - (z * nu - support));
}

double penaltyDualityCheck(const ConstraintSet& set, double bound, std::span<const double> zs,
                           std::span<const double> nuSamples) {
    double worst = 0.0;
    for (const double z : zs) {
        const double penalty = bound * distanceToSet(set, z);
        worst = std::max(worst, algebraicResidual(set, bound, z, solveAlgebraicControl(set, bound, z)));
        for (const double nu : nuSamples) {
            if (std::abs(nu) > bound || !inBarrierCone(set, nu)) continue;
            worst = std::max(worst, z * nu - supportFunction(set, nu) - penalty);
        }
    }
    return worst;
}

DualControl::DualControl(std::size_t steps, double bound) : bound_(bound), values_(steps) {
    if (!(bound >= 0.0)) throw InvalidParameter("dual control bound must be nonnegative");
    for (std::size_t k = 0; k < steps; ++k) values_[k].assign(k + 1, 0.0);
}

DualControl DualControl::zero(std::size_t steps, double bound) { return DualControl(steps, bound); }

DualControl DualControl::fromFunction(std::size_t steps, double bound,
                                      const std::function<double(std::size_t, std::size_t)>& nu) {
    DualControl control(steps, bound);
    for (std::size_t k = 0; k < steps; ++k)
        for (std::size_t j = 0; j <= k; ++j) control.set(k, j, nu(k, j));
    return control;
}

void DualControl::set(std::size_t k, std::size_t j, double nu) {
    if (!(std::abs(nu) <= bound_))
        throw InvalidParameter("dual control " + std::to_string(nu) + " exceeds its bound at step " +
                               std::to_string(k) + ", node " + std::to_string(j));
    values_.at(k).at(j) = nu;
}

bool DualControl::admissible(const ConstraintSet& set) const {
    for (const auto& row : values_)
        for (const double nu : row)
            if (std::abs(nu) > bound_ || !inBarrierCone(set, nu)) return false;
    return true;
}

TiltedLaw girsanovWeights(const Lattice& lattice, const DualControl& control) {
    if (control.steps() != lattice.steps()) throw InvalidParameter("control and lattice have different step counts");
    const double h = lattice.sqrtDt();
    TiltedLaw law;
    law.up_.resize(control.steps());
    law.down_.resize(control.steps());
    for (std::size_t k = 0; k < control.steps(); ++k) {
        law.up_[k].resize(k + 1);
        law.down_[k].resize(k + 1);
        for (std::size_t j = 0; j <= k; ++j) {
            const double tilt = control(k, j) * h;
            if (!(std::abs(tilt) < 1.0))
                throw InvalidParameter("tilt |nu| sqrt(dt) must stay below 1 at step " + std::to_string(k) +
                                       ", node " + std::to_string(j));
            law.up_[k][j] = 0.5 * (1.0 + tilt);
            law.down_[k][j] = 0.5 * (1.0 - tilt);
        }
    }
    return law;
}

double TiltedLaw::pathLikelihood(std::uint64_t walk) const {
    double ratio = 1.0;
    std::size_t j = 0;
    for (std::size_t k = 0; k < steps(); ++k) {
        const bool up = ((walk >> k) & 1U) != 0;
        ratio *= 2.0 * (up ? up_[k][j] : down_[k][j]);
        j += up ? 1 : 0;
    }
    return ratio;
}

double likelihoodExpectation(const TiltedLaw& law) {
    const std::size_t K = law.steps();
    if (K > 20) throw SizeGuardError("likelihood enumeration is limited to 20 steps, got " + std::to_string(K));
    const std::uint64_t walks = std::uint64_t{1} << K;
    double total = 0.0;
    for (std::uint64_t walk = 0; walk < walks; ++walk) total += law.pathLikelihood(walk);
    return std::ldexp(total, -static_cast<int>(K));
}

ConstrainedRepresentation constrainedRepresentationDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                      const ProblemSpec& spec, const ConstraintSet& set,
                                                      double bound, const ValueField* plugIn) {
    detail::checkOverlayMatches(lattice, overlay);
    detail::checkPlugIn(lattice, plugIn);
    checkConstraintGuard(bound, lattice.dt());
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const double h = lattice.sqrtDt();
    const double p = overlay.stepProbability();

    ConstrainedRepresentation out{AugmentedValueField(K, true), DualControl(K, bound)};
    std::vector<double> contNext(K + 1), arrNext(K + 1);
    for (std::size_t j = 0; j <= K; ++j) contNext[j] = arrNext[j] = spec.terminal(lattice.level(K, j));
    out.field.continuation.storeRow(K, contNext);
    out.field.arrival.storeRow(K, arrNext);

    std::vector<double> cont, arr, mixed;
    for (std::size_t k = K; k-- > 0;) {
        mixed.resize(k + 2);
        for (std::size_t j = 0; j <= k + 1; ++j)
            mixed[j] = k + 1 == K ? contNext[j] : p * arrNext[j] + (1.0 - p) * contNext[j];
        cont.assign(k + 1, 0.0);
        arr.assign(k + 1, 0.0);
        const double t = lattice.time(k);
        for (std::size_t j = 0; j <= k; ++j) {
            const double z = martingaleCoefficient(mixed, j, dt);
            const double nu = solveAlgebraicControl(set, bound, z);
            out.control.set(k, j, nu);
            const double up = 0.5 * (1.0 + nu * h);
            const double down = 0.5 * (1.0 - nu * h);
            const double tilted = up * mixed[j + 1] + down * mixed[j];
            const double rate = frozenRate(lattice, spec, plugIn, k, j);
            cont[j] = rate * dt + tilted - supportFunction(set, nu) * dt;
            arr[j] = std::max(spec.obstacle(t, lattice.level(k, j)), cont[j]);
        }
        out.field.continuation.storeRow(k, cont);
        out.field.arrival.storeRow(k, arr);
        contNext.swap(cont);
        arrNext.swap(arr);
    }
    return out;
}

IdentityReport constrainedEqualsRepresentationIdentity(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                       const ProblemSpec& spec, const ConstraintSet& set,
                                                       double bound, double tolerance) {
    const ValueField penalized = solveConstrainedPenalizedArrival(lattice, overlay, spec, set, bound);
    const ConstrainedRepresentation rep = constrainedRepresentationDP(lattice, overlay, spec, set, bound, &penalized);
    return compareNodeArrays(penalized.y, rep.field.continuation, tolerance);
}

namespace {

void checkDualInputs(const Lattice& lattice, const ArrivalOverlay& overlay, const ConstraintSet& set,
                     const DualControl& control, const StoppingRule& rule, const ValueField* plugIn) {
    detail::checkOverlayMatches(lattice, overlay);
    detail::checkPlugIn(lattice, plugIn);
    if (rule.steps() != lattice.steps()) throw InvalidParameter("rule and lattice have different step counts");
    if (!control.admissible(set)) throw InvalidParameter("dual control is not admissible for the constraint set");
}

}  // namespace

MonteCarloEstimate simulateDualControl(const Lattice& lattice, const ArrivalOverlay& overlay,
                                       const ProblemSpec& spec, const ConstraintSet& set,
                                       const DualControl& control, const StoppingRule& rule, std::size_t paths,
                                       RandomStream& stream, const ValueField* plugIn) {
    if (paths == 0) throw InvalidParameter("path count must be positive");
    checkDualInputs(lattice, overlay, set, control, rule, plugIn);
    const TiltedLaw law = girsanovWeights(lattice, control);
    const detail::NodeTables tables(lattice, spec, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    EstimateAccumulator acc;
    for (std::size_t n = 0; n < paths; ++n) {
        double payoff = 0.0;
        std::size_t j = 0;
        bool stopped = false;
        for (std::size_t k = 0; k < K; ++k) {
            if (k > 0) {
                const bool arrival = stream.uniform() < p;
                if (rule.stops(k, j, arrival)) {
                    payoff += tables.obstacle[k][j];
                    stopped = true;
                    break;
                }
            }
            payoff += (tables.rate[k][j] - supportFunction(set, control(k, j))) * dt;
            j += stream.uniform() < law.upProbability(k, j) ? 1 : 0;
        }
        if (!stopped) payoff += tables.terminal[j];
        acc.add(payoff);
    }
    return acc.estimate();
}

double evaluateDualControlExactly(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                  const ConstraintSet& set, const DualControl& control, const StoppingRule& rule,
                                  const ValueField* plugIn) {
    checkDualInputs(lattice, overlay, set, control, rule, plugIn);
    const TiltedLaw law = girsanovWeights(lattice, control);
    const detail::NodeTables tables(lattice, spec, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    std::vector<double> next = tables.terminal, value, mixed;
    for (std::size_t k = K; k-- > 0;) {
        mixed.resize(k + 2);
        for (std::size_t j = 0; j <= k + 1; ++j) {
            const double onArrival = rule.stops(k + 1, j, true) ? tables.obstacle[k + 1][j] : next[j];
            mixed[j] = p * onArrival + (1.0 - p) * next[j];
        }
        value.assign(k + 1, 0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            value[j] = (tables.rate[k][j] - supportFunction(set, control(k, j))) * dt +
                       law.upProbability(k, j) * mixed[j + 1] + law.downProbability(k, j) * mixed[j];
        }
        next.swap(value);
    }
    return next[0];
}

bool ConstrainedLadderReport::monotoneInIntensity(double tolerance) const {
    for (std::size_t i = 1; i < roots.size(); ++i)
        for (std::size_t l = 0; l < roots[i].size(); ++l)
            if (roots[i][l] < roots[i - 1][l] - tolerance) return false;
    return true;
}

bool ConstrainedLadderReport::monotoneInBound(double tolerance) const {
    for (const auto& row : roots)
        for (std::size_t l = 1; l < row.size(); ++l)
            if (row[l] < row[l - 1] - tolerance) return false;
    return true;
}

ConstrainedLadderReport reflectedConstrainedLadder(const Lattice& lattice, const ProblemSpec& spec,
                                                   const ConstraintSet& set, std::span<const double> intensities,
                                                   std::span<const double> bounds) {
    if (intensities.empty() || bounds.empty()) throw InvalidParameter("ladder lists must be nonempty");
    for (std::size_t i = 1; i < intensities.size(); ++i)
        if (!(intensities[i] > intensities[i - 1])) throw InvalidParameter("intensity list must be increasing");
    for (std::size_t l = 1; l < bounds.size(); ++l)
        if (!(bounds[l] > bounds[l - 1])) throw InvalidParameter("bound list must be increasing");

    ConstrainedLadderReport report;
    report.intensities.assign(intensities.begin(), intensities.end());
    report.bounds.assign(bounds.begin(), bounds.end());
    const SolveOptions rootOnly{false};
    for (const double intensity : intensities) {
        ProblemSpec rung = spec;
        rung.penalty = intensity;
        std::vector<double> row;
        for (const double bound : bounds)
            row.push_back(solveConstrainedPenalized(lattice, rung, set, bound, rootOnly).root());
        report.roots.push_back(std::move(row));
    }
    return report;
}

}  // namespace penbsde
