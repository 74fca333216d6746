#include "penbsde/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "node_tables.hpp"
#include "penbsde/penalized.hpp"

namespace penbsde {

IntensityPolicy IntensityPolicy::none(std::size_t steps, double intensity) {
    return fromPredicate(steps, intensity, [](std::size_t, std::size_t) { return false; });
}

IntensityPolicy IntensityPolicy::full(std::size_t steps, double intensity) {
    return fromPredicate(steps, intensity, [](std::size_t, std::size_t) { return true; });
}

IntensityPolicy IntensityPolicy::fromPredicate(std::size_t steps, double intensity,
                                               const std::function<bool(std::size_t, std::size_t)>& active) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw InvalidParameter("policy intensity must be finite and nonnegative");
    IntensityPolicy policy;
    policy.intensity_ = intensity;
    policy.active_.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        policy.active_[k].resize(k + 1);
        for (std::size_t j = 0; j <= k; ++j) policy.active_[k][j] = active(k, j) ? 1 : 0;
    }
    return policy;
}

namespace {

void checkPolicy(const Lattice& lattice, const IntensityPolicy& policy) {
    if (policy.steps() != lattice.steps()) throw InvalidParameter("policy and lattice have different step counts");
    checkPenaltyGuard(policy.intensity(), lattice.dt());
}

double controlledStep(double predictor, double obstacle, double weight) {
    return (predictor + weight * obstacle) / (1.0 + weight);
}

/// Backward sweep where `choose(k, j, predictor, obstacle)` returns the weight r dt.
template <class Choose>
ValueField sweepControlled(const Lattice& lattice, const ProblemSpec& spec, const ValueField* plugIn,
                           SolveOptions options, Choose choose) {
    detail::checkPlugIn(lattice, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    ValueField field(K, options.retainHistory);

    std::vector<double> next(K + 1), zeros(K + 1, 0.0);
    for (std::size_t j = 0; j <= K; ++j) next[j] = spec.terminal(lattice.level(K, j));
    field.y.storeRow(K, next);
    field.z.storeRow(K, zeros);
    field.obstaclePush.storeRow(K, zeros);
    field.constraintPush.storeRow(K, zeros);
    field.rate.storeRow(K, zeros);

    std::vector<double> y, z, push, rate;
    for (std::size_t k = K; k-- > 0;) {
        y.assign(k + 1, 0.0);
        z.assign(k + 1, 0.0);
        push.assign(k + 1, 0.0);
        rate.assign(k + 1, 0.0);
        const double t = lattice.time(k);
        for (std::size_t j = 0; j <= k; ++j) {
            const double x = lattice.level(k, j);
            const double e = conditionalExpectation(next, j);
            z[j] = martingaleCoefficient(next, j, dt);
            rate[j] = plugIn != nullptr ? plugIn->rate(k, j) : spec.driver(t, x, e, z[j]);
            if (!std::isfinite(rate[j])) throw NumericDomainError(k, j, "driver returned a non-finite value");
            const double predictor = e + rate[j] * dt;
            const double s = spec.obstacle(t, x);
            const double weight = choose(k, j, predictor, s);
            y[j] = weight > 0.0 ? controlledStep(predictor, s, weight) : predictor;
            push[j] = weight * (s - y[j]);
        }
        field.y.storeRow(k, y);
        field.z.storeRow(k, z);
        field.obstaclePush.storeRow(k, push);
        field.constraintPush.storeRow(k, std::vector<double>(k + 1, 0.0));
        field.rate.storeRow(k, rate);
        next.swap(y);
    }
    return field;
}

}  // namespace

double randomizedStoppingPayoff(const Lattice& lattice, const ProblemSpec& spec, const IntensityPolicy& policy,
                                const ValueField* plugIn) {
    checkPolicy(lattice, policy);
    detail::checkPlugIn(lattice, plugIn);
    const detail::NodeTables tables(lattice, spec, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();

    double value = 0.0;
    std::vector<double> mass{1.0}, moved;
    for (std::size_t k = 0; k < K; ++k) {
        moved.assign(k + 2, 0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            const double weight = policy.rate(k, j) * dt;
            const double survive = 1.0 / (1.0 + weight);
            const double stop = weight * survive;
            value += mass[j] * (stop * tables.obstacle[k][j] + survive * tables.rate[k][j] * dt);
            moved[j] += 0.5 * survive * mass[j];
            moved[j + 1] += 0.5 * survive * mass[j];
        }
        mass.swap(moved);
    }
    for (std::size_t j = 0; j <= K; ++j) value += mass[j] * tables.terminal[j];
    return value;
}

ValueField controlledLinearBSDE(const Lattice& lattice, const ProblemSpec& spec, const IntensityPolicy& policy,
                                const ValueField* plugIn, SolveOptions options) {
    checkPolicy(lattice, policy);
    const double dt = lattice.dt();
    return sweepControlled(lattice, spec, plugIn, options,
                           [&](std::size_t k, std::size_t j, double, double) { return policy.rate(k, j) * dt; });
}

OptimalControl optimalControlValue(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options) {
    checkPenaltyGuard(spec.penalty, lattice.dt());
    const double weight = spec.penalty * lattice.dt();
    ValueField field =
        sweepControlled(lattice, spec, nullptr, options, [&](std::size_t, std::size_t, double y0, double s) {
            const double stopped = controlledStep(y0, s, weight);
            return stopped > y0 ? weight : 0.0;
        });
    if (!options.retainHistory) return {std::move(field), IntensityPolicy::none(0, spec.penalty)};
    IntensityPolicy policy = IntensityPolicy::fromPredicate(
        lattice.steps(), spec.penalty,
        [&](std::size_t k, std::size_t j) { return field.y(k, j) <= spec.obstacleAt(lattice, k, j); });
    return {std::move(field), std::move(policy)};
}

double bruteForceControlOracle(const Lattice& lattice, const ProblemSpec& spec) {
    const std::size_t K = lattice.steps();
    if (K > 4) throw SizeGuardError("brute-force control oracle is limited to 4 steps, got " + std::to_string(K));
    checkPenaltyGuard(spec.penalty, lattice.dt());
    const std::size_t nodes = K * (K + 1) / 2;
    double best = -kInfinity;
    for (std::size_t mask = 0; mask < (std::size_t{1} << nodes); ++mask) {
        const IntensityPolicy policy =
            IntensityPolicy::fromPredicate(K, spec.penalty, [&](std::size_t k, std::size_t j) {
                return ((mask >> (k * (k + 1) / 2 + j)) & 1U) != 0;
            });
        best = std::max(best, controlledLinearBSDE(lattice, spec, policy).root());
    }
    return best;
}

bool ControlLimitReport::rootsNondecreasing(double tolerance) const {
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].root < entries[i - 1].root - tolerance) return false;
    return true;
}

bool ControlLimitReport::gapsNonincreasing(double tolerance) const {
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].gap > entries[i - 1].gap + tolerance) return false;
    return true;
}

ControlLimitReport reflectedControlLimit(const Lattice& lattice, const ProblemSpec& spec,
                                         std::span<const double> intensities) {
    if (intensities.empty()) throw InvalidParameter("intensity list must be nonempty");
    for (std::size_t i = 1; i < intensities.size(); ++i)
        if (!(intensities[i] > intensities[i - 1])) throw InvalidParameter("intensity list must be increasing");
    ControlLimitReport report;
    report.reflectedRoot = solveReflected(lattice, spec, SolveOptions{false}).root();
    for (const double intensity : intensities) {
        ProblemSpec rung = spec;
        rung.penalty = intensity;
        const double root = optimalControlValue(lattice, rung, SolveOptions{false}).field.root();
        report.entries.push_back({intensity, root, report.reflectedRoot - root});
    }
    return report;
}

MonteCarloEstimate simulateRandomizedStopping(const Lattice& lattice, const ProblemSpec& spec,
                                              const IntensityPolicy& policy, std::size_t paths,
                                              RandomStream& stream, const ValueField* plugIn) {
    if (paths == 0) throw InvalidParameter("path count must be positive");
    checkPolicy(lattice, policy);
    detail::checkPlugIn(lattice, plugIn);
    const detail::NodeTables tables(lattice, spec, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();

    EstimateAccumulator acc;
    for (std::size_t n = 0; n < paths; ++n) {
        double payoff = 0.0;
        std::size_t j = 0;
        bool stopped = false;
        for (std::size_t k = 0; k < K; ++k) {
            const double weight = policy.rate(k, j) * dt;
            if (weight > 0.0 && stream.uniform() < weight / (1.0 + weight)) {
                payoff += tables.obstacle[k][j];
                stopped = true;
                break;
            }
            payoff += tables.rate[k][j] * dt;
            j += stream.nextU64() >> 63;
        }
        if (!stopped) payoff += tables.terminal[j];
        acc.add(payoff);
    }
    return acc.estimate();
}

}  // namespace penbsde
