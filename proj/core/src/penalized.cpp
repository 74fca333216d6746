#include "penbsde/penalized.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace penbsde {
namespace {

double evaluateDriver(const Driver& driver, double t, double x, double y, double z, std::size_t k,
                      std::size_t j) {
    const double rate = driver(t, x, y, z);
    if (!std::isfinite(rate)) throw NumericDomainError(k, j, "driver returned a non-finite value");
    return rate;
}

std::vector<double> terminalRow(const Lattice& lattice, const Terminal& terminal) {
    const std::size_t K = lattice.steps();
    std::vector<double> row(K + 1);
    for (std::size_t j = 0; j <= K; ++j) row[j] = terminal(lattice.level(K, j));
    return row;
}

struct NodeResult {
    double y;
    double obstaclePush;
    double constraintPush;
};

struct NodeInputs {
    std::size_t k;
    std::size_t j;
    double t;
    double x;
    double expectation;     // E of the (possibly transformed) next row
    double z;               // martingale coefficient of the same row
    double rate;            // driver at (t, x, expectation, z)
    double rawExpectation;  // E of the untransformed next Y row
};

/// Generic scalar backward sweep. `transform(k1, next, out)` maps the Y row of
/// step k1 to the row whose expectation drives step k1-1; `node` finishes a node.
template <class Transform, class Node>
ValueField sweepScalar(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options,
                       Transform transform, Node node) {
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    ValueField field(K, options.retainHistory);

    std::vector<double> next = terminalRow(lattice, spec.terminal);
    std::vector<double> zeros(K + 1, 0.0);
    field.y.storeRow(K, next);
    field.z.storeRow(K, zeros);
    field.obstaclePush.storeRow(K, zeros);
    field.constraintPush.storeRow(K, zeros);
    field.rate.storeRow(K, zeros);

    std::vector<double> source, y, z, kObs, kCon, rate;
    for (std::size_t k = K; k-- > 0;) {
        source.resize(k + 2);
        transform(k + 1, std::span<const double>(next), std::span<double>(source));
        y.assign(k + 1, 0.0);
        z.assign(k + 1, 0.0);
        kObs.assign(k + 1, 0.0);
        kCon.assign(k + 1, 0.0);
        rate.assign(k + 1, 0.0);
        const double t = lattice.time(k);
        for (std::size_t j = 0; j <= k; ++j) {
            NodeInputs in{};
            in.k = k;
            in.j = j;
            in.t = t;
            in.x = lattice.level(k, j);
            in.expectation = conditionalExpectation(source, j);
            in.z = martingaleCoefficient(source, j, dt);
            in.rate = evaluateDriver(spec.driver, t, in.x, in.expectation, in.z, k, j);
            in.rawExpectation = conditionalExpectation(next, j);
            const NodeResult out = node(in);
            y[j] = out.y;
            z[j] = in.z;
            kObs[j] = out.obstaclePush;
            kCon[j] = out.constraintPush;
            rate[j] = in.rate;
        }
        field.y.storeRow(k, y);
        field.z.storeRow(k, z);
        field.obstaclePush.storeRow(k, kObs);
        field.constraintPush.storeRow(k, kCon);
        field.rate.storeRow(k, rate);
        next.swap(y);
    }
    return field;
}

auto identityTransform() {
    return [](std::size_t, std::span<const double> next, std::span<double> out) {
        std::copy(next.begin(), next.end(), out.begin());
    };
}

/// W = Y + p (S - Y)^+ on step k1 < K; the terminal row passes through.
auto arrivalTransform(const Lattice& lattice, const ProblemSpec& spec, double p) {
    return [&lattice, &spec, p](std::size_t k1, std::span<const double> next, std::span<double> out) {
        if (k1 == lattice.steps()) {
            std::copy(next.begin(), next.end(), out.begin());
            return;
        }
        for (std::size_t j = 0; j <= k1; ++j) {
            const double s = spec.obstacleAt(lattice, k1, j);
            out[j] = next[j] + p * std::max(0.0, s - next[j]);
        }
    };
}

void checkOverlay(const Lattice& lattice, const ArrivalOverlay& overlay) {
    if (overlay.steps() != lattice.steps())
        throw InvalidParameter("arrival overlay and lattice have different step counts");
    const double p = overlay.stepProbability();
    if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("arrival probability must lie in [0, 1)");
}

void checkRegimes(std::span<const ProblemSpec> regimes, const SwitchingCosts& costs) {
    if (regimes.empty()) throw InvalidParameter("at least one regime is required");
    if (costs.regimes() != regimes.size())
        throw InvalidParameter("switching cost matrix size does not match the regime count");
}

struct RegimeRows {
    std::vector<double> y, z, push, rate;
};

void storeRegimeRow(ValueField& field, std::size_t k, const RegimeRows& rows) {
    field.y.storeRow(k, rows.y);
    field.z.storeRow(k, rows.z);
    field.obstaclePush.storeRow(k, rows.push);
    field.constraintPush.storeRow(k, std::vector<double>(rows.y.size(), 0.0));
    field.rate.storeRow(k, rows.rate);
}

enum class MultiScheme { Implicit, Arrival, Reflected };

RegimeValueField sweepMulti(const Lattice& lattice, std::span<const ProblemSpec> regimes,
                            const SwitchingCosts& costs, MultiScheme scheme, double weight,
                            SolveOptions options) {
    checkRegimes(regimes, costs);
    const std::size_t K = lattice.steps();
    const std::size_t d = regimes.size();
    const double dt = lattice.dt();

    RegimeValueField result;
    std::vector<std::vector<double>> next(d);
    for (std::size_t i = 0; i < d; ++i) {
        result.regimes.emplace_back(K, options.retainHistory);
        next[i] = terminalRow(lattice, regimes[i].terminal);
        RegimeRows rows{next[i], std::vector<double>(K + 1, 0.0), std::vector<double>(K + 1, 0.0),
                        std::vector<double>(K + 1, 0.0)};
        storeRegimeRow(result.regimes[i], K, rows);
    }

    std::vector<std::vector<double>> source(d);
    std::vector<RegimeRows> rows(d);
    std::vector<double> predictors(d), atNode(d);
    for (std::size_t k = K; k-- > 0;) {
        const double t = lattice.time(k);
        // Row feeding the expectation: Y itself, or Y + p (MY - Y)^+ in arrival form.
        for (std::size_t i = 0; i < d; ++i) {
            source[i] = next[i];
            if (scheme == MultiScheme::Arrival && k + 1 < K) {
                for (std::size_t j = 0; j <= k + 1; ++j) {
                    for (std::size_t l = 0; l < d; ++l) atNode[l] = next[l][j];
                    const ImpulseResult impulse = impulseValue(atNode, costs, i);
                    if (impulse.target != ImpulseResult::kNone)
                        source[i][j] = next[i][j] + weight * std::max(0.0, impulse.value - next[i][j]);
                }
            }
            rows[i].y.assign(k + 1, 0.0);
            rows[i].z.assign(k + 1, 0.0);
            rows[i].push.assign(k + 1, 0.0);
            rows[i].rate.assign(k + 1, 0.0);
        }
        for (std::size_t j = 0; j <= k; ++j) {
            const double x = lattice.level(k, j);
            for (std::size_t i = 0; i < d; ++i) {
                const double e = conditionalExpectation(source[i], j);
                const double z = martingaleCoefficient(source[i], j, dt);
                const double rate = evaluateDriver(regimes[i].driver, t, x, e, z, k, j);
                rows[i].z[j] = z;
                rows[i].rate[j] = rate;
                predictors[i] = e + rate * dt;
                if (scheme == MultiScheme::Arrival)
                    rows[i].push[j] = e - conditionalExpectation(next[i], j);
            }
            for (std::size_t i = 0; i < d; ++i) {
                if (scheme == MultiScheme::Arrival) {
                    rows[i].y[j] = predictors[i];
                    continue;
                }
                const ImpulseResult impulse = impulseValue(predictors, costs, i);
                double y = predictors[i];
                if (impulse.target != ImpulseResult::kNone) {
                    y = scheme == MultiScheme::Implicit ? implicitPenaltyStep(predictors[i], impulse.value, weight)
                                                        : std::max(predictors[i], impulse.value);
                }
                rows[i].y[j] = y;
                rows[i].push[j] = scheme == MultiScheme::Implicit
                                      ? weight * std::max(0.0, impulse.value - y)
                                      : y - predictors[i];
                if (impulse.target == ImpulseResult::kNone) rows[i].push[j] = 0.0;
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            storeRegimeRow(result.regimes[i], k, rows[i]);
            next[i] = rows[i].y;
        }
    }
    return result;
}

}  // namespace

void checkPenaltyGuard(double intensity, double dt) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw InvalidParameter("penalty intensity must be finite and nonnegative");
    if (!(intensity * dt < kPenaltyStabilityBound))
        throw InvalidParameter("penalty intensity * dt = " + std::to_string(intensity * dt) +
                               " breaks the stability bound " + std::to_string(kPenaltyStabilityBound));
}

void checkConstraintGuard(double constraintPenalty, double dt) {
    if (!(constraintPenalty >= 0.0) || !std::isfinite(constraintPenalty))
        throw InvalidParameter("constraint penalty must be finite and nonnegative");
    if (!(constraintPenalty * std::sqrt(dt) < 1.0))
        throw InvalidParameter("constraint penalty * sqrt(dt) must stay below 1");
}

ValueField solvePenalized(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options) {
    checkPenaltyGuard(spec.penalty, lattice.dt());
    const double dt = lattice.dt();
    const double weight = spec.penalty * dt;
    return sweepScalar(lattice, spec, options, identityTransform(), [&](const NodeInputs& in) {
        const double s = spec.obstacle(in.t, in.x);
        const double y = implicitPenaltyStep(in.expectation + in.rate * dt, s, weight);
        return NodeResult{y, weight * std::max(0.0, s - y), 0.0};
    });
}

ValueField solvePenalizedArrival(const Lattice& lattice, const ArrivalOverlay& overlay,
                                 const ProblemSpec& spec, SolveOptions options) {
    checkOverlay(lattice, overlay);
    const double dt = lattice.dt();
    return sweepScalar(lattice, spec, options, arrivalTransform(lattice, spec, overlay.stepProbability()),
                       [&](const NodeInputs& in) {
                           return NodeResult{in.expectation + in.rate * dt,
                                             in.expectation - in.rawExpectation, 0.0};
                       });
}

ValueField solveReflected(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options) {
    const double dt = lattice.dt();
    return sweepScalar(lattice, spec, options, identityTransform(), [&](const NodeInputs& in) {
        const double candidate = in.expectation + in.rate * dt;
        const double y = std::max(spec.obstacle(in.t, in.x), candidate);
        return NodeResult{y, y - candidate, 0.0};
    });
}

bool LadderReport::gapsDecreasing() const noexcept {
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].supGap > entries[i - 1].supGap + 1e-12) return false;
    return true;
}

LadderReport lambdaLadder(const Lattice& lattice, const ProblemSpec& spec, std::span<const double> intensities) {
    if (intensities.empty()) throw InvalidParameter("lambda ladder needs at least one intensity");
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        checkPenaltyGuard(intensities[i], lattice.dt());
        if (i > 0 && !(intensities[i] > intensities[i - 1]))
            throw InvalidParameter("lambda ladder must be strictly increasing");
    }

    const ValueField reflected = solveReflected(lattice, spec);
    LadderReport report;
    report.reflectedRoot = reflected.root();

    ValueField previous;
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        ProblemSpec rung = spec;
        rung.penalty = intensities[i];
        ValueField field = solvePenalized(lattice, rung);

        double supGap = 0.0;
        for (std::size_t k = 0; k <= lattice.steps(); ++k) {
            const auto a = field.y.row(k);
            const auto b = reflected.y.row(k);
            for (std::size_t j = 0; j <= k; ++j) supGap = std::max(supGap, std::abs(b[j] - a[j]));
            if (i > 0) {
                const auto prev = previous.y.row(k);
                for (std::size_t j = 0; j <= k; ++j) {
                    const double drop = prev[j] - a[j];
                    if (drop > kLadderTolerance) report.violations.push_back({i - 1, k, j, drop});
                }
            }
        }
        report.entries.push_back({intensities[i], field.root(), report.reflectedRoot - field.root(), supGap});
        previous = std::move(field);
    }
    return report;
}

RegimeValueField solveMultiPenalized(const Lattice& lattice, std::span<const ProblemSpec> regimes,
                                     const SwitchingCosts& costs, double intensity, SolveOptions options) {
    checkPenaltyGuard(intensity, lattice.dt());
    return sweepMulti(lattice, regimes, costs, MultiScheme::Implicit, intensity * lattice.dt(), options);
}

RegimeValueField solveMultiPenalizedArrival(const Lattice& lattice, const ArrivalOverlay& overlay,
                                            std::span<const ProblemSpec> regimes,
                                            const SwitchingCosts& costs, SolveOptions options) {
    checkOverlay(lattice, overlay);
    return sweepMulti(lattice, regimes, costs, MultiScheme::Arrival, overlay.stepProbability(), options);
}

RegimeValueField solveMultiReflected(const Lattice& lattice, std::span<const ProblemSpec> regimes,
                                     const SwitchingCosts& costs, SolveOptions options) {
    return sweepMulti(lattice, regimes, costs, MultiScheme::Reflected, 0.0, options);
}

ValueField solveConstrainedPenalized(const Lattice& lattice, const ProblemSpec& spec, const ConstraintSet& set,
                                     double constraintPenalty, SolveOptions options) {
    checkPenaltyGuard(spec.penalty, lattice.dt());
    checkConstraintGuard(constraintPenalty, lattice.dt());
    const double dt = lattice.dt();
    const double weight = spec.penalty * dt;
    return sweepScalar(lattice, spec, options, identityTransform(), [&](const NodeInputs& in) {
        const double s = spec.obstacle(in.t, in.x);
        const double push = constraintPenalty * distanceToSet(set, in.z) * dt;
        const double y = implicitPenaltyStep(in.expectation + in.rate * dt + push, s, weight);
        return NodeResult{y, weight * std::max(0.0, s - y), push};
    });
}

ValueField solveConstrainedPenalizedArrival(const Lattice& lattice, const ArrivalOverlay& overlay,
                                            const ProblemSpec& spec, const ConstraintSet& set,
                                            double constraintPenalty, SolveOptions options) {
    checkOverlay(lattice, overlay);
    checkConstraintGuard(constraintPenalty, lattice.dt());
    const double dt = lattice.dt();
    return sweepScalar(lattice, spec, options, arrivalTransform(lattice, spec, overlay.stepProbability()),
                       [&](const NodeInputs& in) {
                           const double push = constraintPenalty * distanceToSet(set, in.z) * dt;
                           return NodeResult{in.expectation + in.rate * dt + push,
                                             in.expectation - in.rawExpectation, push};
                       });
}

}  // namespace penbsde
