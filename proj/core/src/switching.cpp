#include "penbsde/switching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "node_tables.hpp"
#include "penbsde/penalized.hpp"

namespace penbsde {

SwitchingCosts::SwitchingCosts(std::vector<std::vector<double>> matrix) : matrix_(std::move(matrix)) {
    if (matrix_.empty()) throw InvalidParameter("switching cost matrix must not be empty");
    for (const auto& row : matrix_)
        if (row.size() != matrix_.size()) throw InvalidParameter("switching cost matrix must be square");
}

SwitchingCosts SwitchingCosts::uniform(std::size_t regimes, double cost) {
    std::vector<std::vector<double>> matrix(regimes, std::vector<double>(regimes, cost));
    for (std::size_t i = 0; i < regimes; ++i) matrix[i][i] = 0.0;
    return SwitchingCosts(std::move(matrix));
}

std::string CostViolation::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Diagonal:
            out << "C(" << i << "," << i << ") = " << margin << " must be 0";
            break;
        case Kind::NonPositive:
            out << "C(" << i << "," << j << ") = " << margin << " must be positive";
            break;
        case Kind::Triangle:
            out << "C(" << i << "," << j << ") + C(" << j << "," << l << ") - C(" << i << "," << l
                << ") = " << margin << " must be positive";
            break;
    }
    return out.str();
}

std::vector<CostViolation> validateSwitchingCosts(const SwitchingCosts& costs) {
    std::vector<CostViolation> violations;
    const std::size_t d = costs.regimes();
    for (std::size_t i = 0; i < d; ++i) {
        if (costs(i, i) != 0.0) violations.push_back({CostViolation::Kind::Diagonal, i, i, 0, costs(i, i)});
        for (std::size_t j = 0; j < d; ++j)
            if (j != i && !(costs(i, j) > 0.0))
                violations.push_back({CostViolation::Kind::NonPositive, i, j, 0, costs(i, j)});
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t l = 0; l < d; ++l) {
                if (i == j || j == l || i == l) continue;
                const double slack = costs(i, j) + costs(j, l) - costs(i, l);
                if (!(slack > 0.0)) violations.push_back({CostViolation::Kind::Triangle, i, j, l, slack});
            }
    return violations;
}

ImpulseResult impulseValue(std::span<const double> values, const SwitchingCosts& costs, std::size_t regime) {
    ImpulseResult best{-kInfinity, ImpulseResult::kNone};
    for (std::size_t l = 0; l < values.size(); ++l) {
        if (l == regime) continue;
        const double candidate = values[l] - costs(regime, l);
        if (best.target == ImpulseResult::kNone || candidate > best.value) best = {candidate, l};
    }
    return best;
}

namespace {

void checkRegimeInputs(const Lattice& lattice, const ArrivalOverlay& overlay, std::span<const ProblemSpec> regimes,
                       const SwitchingCosts& costs, const RegimeValueField* plugIn) {
    detail::checkOverlayMatches(lattice, overlay);
    if (regimes.empty()) throw InvalidParameter("at least one regime is required");
    if (costs.regimes() != regimes.size())
        throw InvalidParameter("switching cost matrix size does not match the regime count");
    if (plugIn != nullptr) {
        if (plugIn->regimeCount() != regimes.size())
            throw InvalidParameter("plug-in field has the wrong number of regimes");
        for (const auto& field : plugIn->regimes) detail::checkPlugIn(lattice, &field);
    }
}

std::vector<detail::NodeTables> regimeTables(const Lattice& lattice, std::span<const ProblemSpec> regimes,
                                             const RegimeValueField* plugIn) {
    std::vector<detail::NodeTables> tables;
    tables.reserve(regimes.size());
    for (std::size_t i = 0; i < regimes.size(); ++i)
        tables.emplace_back(lattice, regimes[i], plugIn != nullptr ? &plugIn->regimes[i] : nullptr);
    return tables;
}

void checkStrategy(const Lattice& lattice, std::span<const ProblemSpec> regimes, const SwitchingStrategy& strategy) {
    if (strategy.steps() != lattice.steps() || strategy.regimes() != regimes.size())
        throw InvalidParameter("strategy does not match the lattice or the regime count");
}

}  // namespace

RegimeAugmentedField poissonSwitchingDP(const Lattice& lattice, const ArrivalOverlay& overlay,
                                        std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                        const RegimeValueField* plugIn) {
    checkRegimeInputs(lattice, overlay, regimes, costs, plugIn);
    const std::size_t K = lattice.steps();
    const std::size_t d = regimes.size();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();
    const auto tables = regimeTables(lattice, regimes, plugIn);

    RegimeAugmentedField field;
    std::vector<std::vector<double>> contNext(d), arrNext(d), cont(d), arr(d);
    for (std::size_t i = 0; i < d; ++i) {
        field.regimes.emplace_back(K, true);
        contNext[i] = arrNext[i] = tables[i].terminal;
        field.regimes[i].continuation.storeRow(K, contNext[i]);
        field.regimes[i].arrival.storeRow(K, arrNext[i]);
    }

    std::vector<double> mixed, atNode(d);
    for (std::size_t k = K; k-- > 0;) {
        for (std::size_t i = 0; i < d; ++i) {
            mixed.resize(k + 2);
            for (std::size_t j = 0; j <= k + 1; ++j)
                mixed[j] = k + 1 == K ? contNext[i][j] : p * arrNext[i][j] + (1.0 - p) * contNext[i][j];
            cont[i].assign(k + 1, 0.0);
            for (std::size_t j = 0; j <= k; ++j)
                cont[i][j] = tables[i].rate[k][j] * dt + conditionalExpectation(mixed, j);
        }
        for (std::size_t i = 0; i < d; ++i) {
            arr[i].assign(k + 1, 0.0);
            for (std::size_t j = 0; j <= k; ++j) {
                for (std::size_t l = 0; l < d; ++l) atNode[l] = cont[l][j];
                arr[i][j] = std::max(cont[i][j], impulseValue(atNode, costs, i).value);
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            field.regimes[i].continuation.storeRow(k, cont[i]);
            field.regimes[i].arrival.storeRow(k, arr[i]);
            contNext[i].swap(cont[i]);
            arrNext[i].swap(arr[i]);
        }
    }
    return field;
}

IdentityReport switchingEqualsPenalizedIdentity(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                                double tolerance) {
    const RegimeValueField penalized = solveMultiPenalizedArrival(lattice, overlay, regimes, costs);
    const RegimeAugmentedField dp = poissonSwitchingDP(lattice, overlay, regimes, costs, &penalized);
    IdentityReport worst;
    worst.tolerance = tolerance;
    for (std::size_t i = 0; i < regimes.size(); ++i) {
        const IdentityReport r =
            compareNodeArrays(penalized.regimes[i].y, dp.regimes[i].continuation, tolerance);
        if (!(r.maxDiscrepancy <= worst.maxDiscrepancy)) worst = r;
    }
    return worst;
}

SwitchingStrategy SwitchingStrategy::neverSwitch(std::size_t steps, std::size_t regimes) {
    return fromFunction(steps, regimes, [](std::size_t, std::size_t, std::size_t i) { return i; });
}

SwitchingStrategy SwitchingStrategy::fromFunction(
    std::size_t steps, std::size_t regimes,
    const std::function<std::size_t(std::size_t, std::size_t, std::size_t)>& decide) {
    if (regimes == 0) throw InvalidParameter("at least one regime is required");
    SwitchingStrategy s;
    s.regimes_ = regimes;
    s.table_.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        s.table_[k].assign(k + 1, std::vector<std::size_t>(regimes, ImpulseResult::kNone));
        if (k == 0 || k == steps) continue;
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t i = 0; i < regimes; ++i) {
                const std::size_t target = decide(k, j, i);
                if (target != i && target != ImpulseResult::kNone) {
                    if (target >= regimes) throw InvalidParameter("switch target out of range");
                    s.table_[k][j][i] = target;
                }
            }
    }
    return s;
}

std::size_t SwitchingStrategy::target(std::size_t k, std::size_t j, std::size_t regime, bool arrival) const {
    if (!arrival) return ImpulseResult::kNone;
    return table_.at(k).at(j).at(regime);
}

SwitchingStrategy extractSwitchingStrategy(const RegimeAugmentedField& field, const SwitchingCosts& costs) {
    if (field.regimeCount() != costs.regimes()) throw InvalidParameter("field and costs disagree on regimes");
    const std::size_t d = field.regimeCount();
    const std::size_t K = field.regimes.front().steps();
    std::vector<double> atNode(d);
    return SwitchingStrategy::fromFunction(K, d, [&](std::size_t k, std::size_t j, std::size_t i) {
        for (std::size_t l = 0; l < d; ++l) atNode[l] = field.regimes[l].continuation(k, j);
        const ImpulseResult impulse = impulseValue(atNode, costs, i);
        if (impulse.target != ImpulseResult::kNone && atNode[i] <= impulse.value) return impulse.target;
        return i;
    });
}

MonteCarloEstimate simulateSwitchingStrategy(const Lattice& lattice, const ArrivalOverlay& overlay,
                                             std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                             const SwitchingStrategy& strategy, std::size_t initialRegime,
                                             std::size_t paths, RandomStream& stream,
                                             const RegimeValueField* plugIn) {
    if (paths == 0) throw InvalidParameter("path count must be positive");
    checkRegimeInputs(lattice, overlay, regimes, costs, plugIn);
    checkStrategy(lattice, regimes, strategy);
    if (initialRegime >= regimes.size()) throw InvalidParameter("initial regime out of range");
    const auto tables = regimeTables(lattice, regimes, plugIn);
    const std::size_t K = lattice.steps();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    EstimateAccumulator acc;
    for (std::size_t n = 0; n < paths; ++n) {
        double payoff = 0.0;
        std::size_t j = 0;
        std::size_t regime = initialRegime;
        for (std::size_t k = 0; k < K; ++k) {
            if (k > 0) {
                const bool arrival = stream.uniform() < p;
                const std::size_t target = strategy.target(k, j, regime, arrival);
                if (target != ImpulseResult::kNone) {
                    payoff -= costs(regime, target);
                    regime = target;
                }
            }
            payoff += tables[regime].rate[k][j] * dt;
            j += stream.nextU64() >> 63;
        }
        payoff += tables[regime].terminal[j];
        acc.add(payoff);
    }
    return acc.estimate();
}

std::vector<double> evaluateSwitchingStrategyExactly(const Lattice& lattice, const ArrivalOverlay& overlay,
                                                     std::span<const ProblemSpec> regimes,
                                                     const SwitchingCosts& costs, const SwitchingStrategy& strategy,
                                                     const RegimeValueField* plugIn) {
    checkRegimeInputs(lattice, overlay, regimes, costs, plugIn);
    checkStrategy(lattice, regimes, strategy);
    const auto tables = regimeTables(lattice, regimes, plugIn);
    const std::size_t K = lattice.steps();
    const std::size_t d = regimes.size();
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();

    std::vector<std::vector<double>> next(d), value(d);
    for (std::size_t i = 0; i < d; ++i) next[i] = tables[i].terminal;
    std::vector<double> mixed;
    for (std::size_t k = K; k-- > 0;) {
        for (std::size_t i = 0; i < d; ++i) {
            mixed.resize(k + 2);
            for (std::size_t j = 0; j <= k + 1; ++j) {
                const std::size_t target = k + 1 < K ? strategy.target(k + 1, j, i, true) : ImpulseResult::kNone;
                const double onArrival =
                    target == ImpulseResult::kNone ? next[i][j] : next[target][j] - costs(i, target);
                mixed[j] = p * onArrival + (1.0 - p) * next[i][j];
            }
            value[i].assign(k + 1, 0.0);
            for (std::size_t j = 0; j <= k; ++j)
                value[i][j] = tables[i].rate[k][j] * dt + conditionalExpectation(mixed, j);
        }
        next.swap(value);
    }
    std::vector<double> roots(d);
    for (std::size_t i = 0; i < d; ++i) roots[i] = next[i][0];
    return roots;
}

std::vector<double> bruteForceSwitchingOracle(const Lattice& lattice, const ArrivalOverlay& overlay,
                                              std::span<const ProblemSpec> regimes, const SwitchingCosts& costs,
                                              const RegimeValueField* plugIn) {
    const std::size_t K = lattice.steps();
    const std::size_t d = regimes.size();
    if (K > 3 || d > 3)
        throw SizeGuardError("brute-force switching oracle is limited to 3 steps and 3 regimes, got " +
                             std::to_string(K) + " steps and " + std::to_string(d) + " regimes");
    checkRegimeInputs(lattice, overlay, regimes, costs, plugIn);
    const auto tables = regimeTables(lattice, regimes, plugIn);
    const double dt = lattice.dt();
    const double p = overlay.stepProbability();
    const std::size_t walks = std::size_t{1} << K;
    const std::size_t patterns = std::size_t{1} << (K - 1);

    std::vector<double> best(d, -kInfinity);
    for (std::size_t start = 0; start < d; ++start) {
        // Decision slots on reachable states: step 1 only in the initial regime.
        std::vector<std::vector<std::vector<std::size_t>>> slot(K);
        std::size_t slots = 0;
        for (std::size_t k = 1; k < K; ++k) {
            slot[k].assign(k + 1, std::vector<std::size_t>(d, ImpulseResult::kNone));
            for (std::size_t j = 0; j <= k; ++j)
                for (std::size_t i = 0; i < d; ++i)
                    if (k > 1 || i == start) slot[k][j][i] = slots++;
        }
        std::vector<std::size_t> choice(slots, 0);
        while (true) {
            double total = 0.0;
            for (std::size_t walk = 0; walk < walks; ++walk) {
                for (std::size_t a = 0; a < patterns; ++a) {
                    double weight = std::ldexp(1.0, -static_cast<int>(K));
                    for (std::size_t s = 1; s < K; ++s) weight *= ((a >> (s - 1)) & 1U) ? p : 1.0 - p;
                    if (weight == 0.0) continue;
                    double payoff = 0.0;
                    std::size_t j = 0;
                    std::size_t regime = start;
                    for (std::size_t k = 0; k < K; ++k) {
                        if (k > 0 && ((a >> (k - 1)) & 1U)) {
                            const std::size_t target = choice[slot[k][j][regime]];
                            if (target != regime) {
                                payoff -= costs(regime, target);
                                regime = target;
                            }
                        }
                        payoff += tables[regime].rate[k][j] * dt;
                        j += (walk >> k) & 1U;
                    }
                    total += weight * (payoff + tables[regime].terminal[j]);
                }
            }
            best[start] = std::max(best[start], total);

            std::size_t pos = 0;
            while (pos < slots && ++choice[pos] == d) choice[pos++] = 0;
            if (pos == slots) break;
        }
    }
    return best;
}

double sameInstantChainGain(const RegimeAugmentedField& field, const SwitchingCosts& costs) {
    if (field.regimeCount() != costs.regimes()) throw InvalidParameter("field and costs disagree on regimes");
    const std::size_t d = field.regimeCount();
    const std::size_t K = field.regimes.front().steps();
    double gain = -kInfinity;
    for (std::size_t k = 1; k < K; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t i = 0; i < d; ++i) {
                const double oneSwitch = field.regimes[i].arrival(k, j);
                for (std::size_t l = 0; l < d; ++l) {
                    if (l == i) continue;
                    for (std::size_t m = 0; m < d; ++m) {
                        if (m == l) continue;
                        const double chained = field.regimes[m].continuation(k, j) - costs(i, l) - costs(l, m);
                        gain = std::max(gain, chained - oneSwitch);
                    }
                }
            }
    return gain;
}

std::size_t countSameInstantRoundTrips(const SwitchingStrategy& strategy) {
    std::size_t count = 0;
    for (std::size_t k = 1; k < strategy.steps(); ++k)
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t i = 0; i < strategy.regimes(); ++i) {
                const std::size_t l = strategy.target(k, j, i, true);
                if (l != ImpulseResult::kNone && strategy.target(k, j, l, true) == i) ++count;
            }
    return count;
}

}  // namespace penbsde
