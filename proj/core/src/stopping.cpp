#include "penbsde/stopping.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "node_tables.hpp"
#include "penbsde/penalized.hpp"

namespace penbsde {
namespace {

using detail::NodeTables;

void checkSolveInputs(const Lattice& lattice, const ArrivalOverlay& overlay, const ValueField* plugIn) {
    detail::checkOverlayMatches(lattice, overlay);
    detail::checkPlugIn(lattice, plugIn);
}

// Exact expected payoff over every (walk, arrival) scenario. `decide(k, j, history)`
// returns whether to stop at step k (arrival known to be present); `history`
// holds the arrival bits of steps 1..k-1 (bit i-1 for step i).
template <class Decide>
double sumOverScenarios(const Lattice& lattice, double p, const NodeTables& tables, Decide decide) {
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const std::size_t walks = std::size_t{1} << K;
    const std::size_t arrivalSteps = K - 1;
    const std::size_t patterns = std::size_t{1} << arrivalSteps;

    std::vector<double> patternWeight(patterns);
    for (std::size_t a = 0; a < patterns; ++a) {
        double w = 1.0;
        for (std::size_t i = 0; i < arrivalSteps; ++i) w *= ((a >> i) & 1U) ? p : 1.0 - p;
        patternWeight[a] = w;
    }

    double total = 0.0;
    const double walkWeight = std::ldexp(1.0, -static_cast<int>(K));
    for (std::size_t walk = 0; walk < walks; ++walk) {
        for (std::size_t a = 0; a < patterns; ++a) {
            if (patternWeight[a] == 0.0) continue;
            double payoff = 0.0;
            std::size_t j = 0;
            bool stopped = false;
            for (std::size_t k = 0; k < K; ++k) {
                if (k > 0 && ((a >> (k - 1)) & 1U)) {
                    const std::size_t history = a & ((std::size_t{1} << (k - 1)) - 1);
                    if (decide(k, j, history)) {
                        payoff += tables.obstacle[k][j];
                        stopped = true;
                        break;
                    }
                }
                payoff += tables.rate[k][j] * dt;
                j += (walk >> k) & 1U;
            }
            if (!stopped) payoff += tables.terminal[j];
            total += walkWeight * patternWeight[a] * payoff;
        }
    }
    return total;
}

struct DecisionSlot {
    std::size_t k;
    std::size_t j;
    std::size_t history;
};

double maximizeOverSlots(const std::vector<DecisionSlot>& slots, const std::function<double(std::size_t)>& evaluate) {
    double best = -kInfinity;
    const std::size_t rules = std::size_t{1} << slots.size();
    for (std::size_t mask = 0; mask < rules; ++mask) best = std::max(best, evaluate(mask));
    return best;
}

}  // namespace

double frozenRate(const Lattice& lattice, const ProblemSpec& spec, const ValueField* plugIn, std::size_t k,
                  std::size_t j) {
    if (plugIn != nullptr) return plugIn->rate(k, j);
    const double rate = spec.driver(lattice.time(k), lattice.level(k, j), 0.0, 0.0);
    if (!std::isfinite(rate)) throw NumericDomainError(k, j, "driver returned a non-finite value");
    return rate;
}

AugmentedValueField poissonStoppingDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                      const ProblemSpec& spec, const ValueField* plugIn, SolveOptions options) {
    checkSolveInputs(lattice, overlay, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();
    AugmentedValueField field(K, options.retainHistory);

    std::vector<double> contNext(K + 1), arrNext(K + 1);
    for (std::size_t j = 0; j <= K; ++j) contNext[j] = arrNext[j] = spec.terminal(lattice.level(K, j));
    field.continuation.storeRow(K, contNext);
    field.arrival.storeRow(K, arrNext);

    std::vector<double> cont, arr, mixed;
    for (std::size_t k = K; k-- > 0;) {
        mixed.resize(k + 2);
        for (std::size_t j = 0; j <= k + 1; ++j)
            mixed[j] = k + 1 == K ? contNext[j] : p * arrNext[j] + (1.0 - p) * contNext[j];
        cont.assign(k + 1, 0.0);
        arr.assign(k + 1, 0.0);
        const double t = lattice.time(k);
        for (std::size_t j = 0; j <= k; ++j) {
            const double rate = frozenRate(lattice, spec, plugIn, k, j);
            cont[j] = rate * dt + conditionalExpectation(mixed, j);
            arr[j] = std::max(spec.obstacle(t, lattice.level(k, j)), cont[j]);
        }
        field.continuation.storeRow(k, cont);
        field.arrival.storeRow(k, arr);
        contNext.swap(cont);
        arrNext.swap(arr);
    }
    return field;
}

IdentityReport compareNodeArrays(const NodeArray& a, const NodeArray& b, double tolerance) {
    if (a.steps() != b.steps()) throw InvalidParameter("compared node arrays have different step counts");
    IdentityReport report;
    report.tolerance = tolerance;
    for (std::size_t k = 0; k <= a.steps(); ++k) {
        if (!a.hasRow(k) || !b.hasRow(k)) continue;
        const auto ra = a.row(k);
        const auto rb = b.row(k);
        for (std::size_t j = 0; j <= k; ++j) {
            const double gap = std::abs(ra[j] - rb[j]) / std::max(1.0, std::abs(rb[j]));
            if (!(gap <= report.maxDiscrepancy)) {
                report.maxDiscrepancy = std::isnan(gap) ? kInfinity : gap;
                report.worstStep = k;
                report.worstNode = j;
            }
        }
    }
    return report;
}

IdentityReport penalizedEqualsStoppingIdentity(const Lattice& lattice, const ArrivalOverlay& overlay,
                                               const ProblemSpec& spec, double tolerance) {
    const ValueField penalized = solvePenalizedArrival(lattice, overlay, spec);
    const AugmentedValueField stopping = poissonStoppingDP(lattice, overlay, spec, &penalized);
    return compareNodeArrays(penalized.y, stopping.continuation, tolerance);
}

double intervalDiscountValue(const std::function<double(double)>& rate, const std::function<double(double)>& obstacle,
                             double terminal, double intensity, double start, double horizon,
                             const std::function<double(double)>& solution) {
    if (!(start < horizon)) throw InvalidParameter("interval discount value needs start < horizon");
    if (!(intensity >= 0.0)) throw InvalidParameter("intensity must be nonnegative");
    const auto integrand = [&](double s) {
        const double reflected = intensity > 0.0 ? intensity * std::max(obstacle(s), solution(s)) : 0.0;
        return std::exp(-intensity * (s - start)) * (rate(s) + reflected);
    };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, start, horizon, 15, 1e-14);
    return std::exp(-intensity * (horizon - start)) * terminal + integral;
}

StoppingRule StoppingRule::never(std::size_t steps) {
    return fromPredicate(steps, [](std::size_t, std::size_t) { return false; });
}

StoppingRule StoppingRule::atEveryArrival(std::size_t steps) {
    return fromPredicate(steps, [](std::size_t, std::size_t) { return true; });
}

StoppingRule StoppingRule::fromPredicate(std::size_t steps,
                                         const std::function<bool(std::size_t, std::size_t)>& stopAt) {
    StoppingRule rule;
    rule.table_.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        rule.table_[k].assign(k + 1, 0);
        if (k == 0 || k == steps) continue;
        for (std::size_t j = 0; j <= k; ++j) rule.table_[k][j] = stopAt(k, j) ? 1 : 0;
    }
    return rule;
}

StoppingRule extractOptimalRule(const AugmentedValueField& field, const Lattice& lattice, const ProblemSpec& spec) {
    if (field.steps() != lattice.steps()) throw InvalidParameter("field and lattice have different step counts");
    return StoppingRule::fromPredicate(lattice.steps(), [&](std::size_t k, std::size_t j) {
        return field.continuation(k, j) <= spec.obstacleAt(lattice, k, j);
    });
}

double MonteCarloEstimate::band(double reference, double sigmas) const noexcept {
    return sigmas * standardError + 1e-12 * std::max(1.0, std::abs(reference));
}

bool MonteCarloEstimate::within(double reference, double sigmas) const noexcept {
    return std::abs(mean - reference) <= band(reference, sigmas);
}

void EstimateAccumulator::add(double sample) noexcept {
    ++count_;
    const double delta = sample - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (sample - mean_);
}

MonteCarloEstimate EstimateAccumulator::estimate() const noexcept {
    MonteCarloEstimate out;
    out.mean = mean_;
    out.paths = count_;
    if (count_ > 1) {
        const double variance = m2_ / static_cast<double>(count_ - 1);
        out.standardError = std::sqrt(variance / static_cast<double>(count_));
    }
    return out;
}

MonteCarloEstimate simulateStoppingRule(const Lattice& lattice, const ArrivalOverlay& overlay,
                                        const ProblemSpec& spec, const StoppingRule& rule, std::size_t paths,
                                        RandomStream& stream, const ValueField* plugIn) {
    if (paths == 0) throw InvalidParameter("path count must be positive");
    checkSolveInputs(lattice, overlay, plugIn);
    if (rule.steps() != lattice.steps()) throw InvalidParameter("rule and lattice have different step counts");
    const NodeTables tables(lattice, spec, plugIn);
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
            payoff += tables.rate[k][j] * dt;
            j += stream.nextU64() >> 63;
        }
        if (!stopped) payoff += tables.terminal[j];
        acc.add(payoff);
    }
    return acc.estimate();
}

double evaluateStoppingRuleExactly(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                   const StoppingRule& rule, const ValueField* plugIn) {
    checkSolveInputs(lattice, overlay, plugIn);
    if (lattice.steps() > 12) throw SizeGuardError("exact rule evaluation is limited to 12 steps");
    if (rule.steps() != lattice.steps()) throw InvalidParameter("rule and lattice have different step counts");
    const NodeTables tables(lattice, spec, plugIn);
    return sumOverScenarios(lattice, overlay.stepProbability(), tables,
                            [&](std::size_t k, std::size_t j, std::size_t) { return rule.stops(k, j, true); });
}

double bruteForceStoppingOracle(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                const ValueField* plugIn) {
    const std::size_t K = lattice.steps();
    if (K > 5) throw SizeGuardError("brute-force stopping oracle is limited to 5 steps, got " + std::to_string(K));
    checkSolveInputs(lattice, overlay, plugIn);
    const NodeTables tables(lattice, spec, plugIn);

    std::vector<DecisionSlot> slots;
    std::vector<std::vector<std::size_t>> slotIndex(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        slotIndex[k].assign(k + 1, 0);
        if (k == 0 || k == K) continue;
        for (std::size_t j = 0; j <= k; ++j) {
            slotIndex[k][j] = slots.size();
            slots.push_back({k, j, 0});
        }
    }
    const double p = overlay.stepProbability();
    return maximizeOverSlots(slots, [&](std::size_t mask) {
        return sumOverScenarios(lattice, p, tables, [&](std::size_t k, std::size_t j, std::size_t) {
            return ((mask >> slotIndex[k][j]) & 1U) != 0;
        });
    });
}

double bruteForceHistoryStoppingOracle(const Lattice& lattice, const ArrivalOverlay& overlay,
                                       const ProblemSpec& spec, const ValueField* plugIn) {
    const std::size_t K = lattice.steps();
    if (K > 3)
        throw SizeGuardError("history-dependent stopping oracle is limited to 3 steps, got " + std::to_string(K));
    checkSolveInputs(lattice, overlay, plugIn);
    const NodeTables tables(lattice, spec, plugIn);

    // Slot per (k, j, arrival history of steps 1..k-1).
    std::vector<DecisionSlot> slots;
    std::vector<std::vector<std::vector<std::size_t>>> slotIndex(K + 1);
    for (std::size_t k = 1; k < K; ++k) {
        const std::size_t histories = std::size_t{1} << (k - 1);
        slotIndex[k].assign(k + 1, std::vector<std::size_t>(histories, 0));
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t h = 0; h < histories; ++h) {
                slotIndex[k][j][h] = slots.size();
                slots.push_back({k, j, h});
            }
    }
    const double p = overlay.stepProbability();
    return maximizeOverSlots(slots, [&](std::size_t mask) {
        return sumOverScenarios(lattice, p, tables, [&](std::size_t k, std::size_t j, std::size_t h) {
            return ((mask >> slotIndex[k][j][h]) & 1U) != 0;
        });
    });
}

AuxiliaryStoppingResult auxiliaryStoppingDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                            const ProblemSpec& spec, const ValueField* plugIn) {
    checkSolveInputs(lattice, overlay, plugIn);
    const std::size_t K = lattice.steps();
    if (K > 400) throw SizeGuardError("auxiliary stopping recursion is limited to 400 steps");
    const NodeTables tables(lattice, spec, plugIn);
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    // C(k,j) = E[ sum_{i=k}^{N-1} f_i dt + yHat(N) 1{N<K} + xi 1{N>=K} ], N the next
    // arrival step after k; yHat = max(S, C). Rows are filled from the horizon down.
    std::vector<std::vector<double>> hat(K + 1), cont(K + 1);
    hat[K] = tables.terminal;
    cont[K] = tables.terminal;
    std::vector<double> alive, moved;
    for (std::size_t k = K; k-- > 0;) {
        hat[k].assign(k + 1, 0.0);
        cont[k].assign(k + 1, 0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            alive.assign(1, 1.0);
            double value = tables.rate[k][j] * dt;
            for (std::size_t i = k + 1; i <= K; ++i) {
                const std::size_t width = i - k + 1;
                moved.assign(width, 0.0);
                for (std::size_t r = 0; r + 1 < width; ++r) {
                    moved[r] += 0.5 * alive[r];
                    moved[r + 1] += 0.5 * alive[r];
                }
                if (i == K) {
                    for (std::size_t r = 0; r < width; ++r) value += moved[r] * tables.terminal[j + r];
                    break;
                }
                for (std::size_t r = 0; r < width; ++r) {
                    value += p * moved[r] * hat[i][j + r];
                    moved[r] *= 1.0 - p;
                    value += moved[r] * tables.rate[i][j + r] * dt;
                }
                alive.swap(moved);
            }
            cont[k][j] = value;
            hat[k][j] = std::max(tables.obstacle[k][j], value);
        }
    }

    AuxiliaryStoppingResult result;
    result.field = AugmentedValueField(K, true);
    for (std::size_t k = 0; k <= K; ++k) {
        result.field.continuation.storeRow(k, cont[k]);
        result.field.arrival.storeRow(k, hat[k]);
    }
    result.root = hat[0][0];
    return result;
}

double transformedSnellValue(const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                             bool allowStopAtStart, const ValueField* plugIn) {
    const std::size_t K = lattice.steps();
    if (K > 12) throw SizeGuardError("transformed Snell check is limited to 12 steps, got " + std::to_string(K));
    checkSolveInputs(lattice, overlay, plugIn);
    const NodeTables tables(lattice, spec, plugIn);
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    // barY = max(barS, E[barY next]) where bar adds the cumulated rate.
    const std::function<double(std::size_t, std::size_t, double, bool)> visit =
        [&](std::size_t k, std::size_t j, double cumulated, bool mayStop) -> double {
        if (k == K) return tables.terminal[j] + cumulated;
        const double accrued = cumulated + tables.rate[k][j] * dt;
        double next = 0.0;
        for (std::size_t up = 0; up < 2; ++up) {
            const std::size_t jn = j + up;
            const double withArrival = p > 0.0 ? visit(k + 1, jn, accrued, true) : 0.0;
            next += 0.5 * (p * withArrival + (1.0 - p) * visit(k + 1, jn, accrued, false));
        }
        if (mayStop) return std::max(tables.obstacle[k][j] + cumulated, next);
        return next;
    };
    return visit(0, 0, 0.0, allowStopAtStart);
}

double stoppedValueMartingaleDefect(const AugmentedValueField& field, const StoppingRule& rule,
                                    const Lattice& lattice, const ArrivalOverlay& overlay, const ProblemSpec& spec,
                                    const ValueField* plugIn) {
    checkSolveInputs(lattice, overlay, plugIn);
    if (field.steps() != lattice.steps() || rule.steps() != lattice.steps())
        throw InvalidParameter("field, rule and lattice must share the step count");
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    // Value on arrival at (k, j) when following the rule.
    const auto stoppedValue = [&](std::size_t k, std::size_t j) {
        if (k == K) return field.continuation(K, j);
        return rule.stops(k, j, true) ? spec.obstacleAt(lattice, k, j) : field.continuation(k, j);
    };

    double defect = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double up = p * stoppedValue(k + 1, j + 1) + (1.0 - p) * field.continuation(k + 1, j + 1);
            const double down = p * stoppedValue(k + 1, j) + (1.0 - p) * field.continuation(k + 1, j);
            const double expected = frozenRate(lattice, spec, plugIn, k, j) * dt + conditionalExpectation(up, down);
            defect = std::max(defect, std::abs(field.continuation(k, j) - expected));
            if (k > 0) defect = std::max(defect, std::abs(field.arrival(k, j) - stoppedValue(k, j)));
        }
    }
    return defect;
}

}  // namespace penbsde
