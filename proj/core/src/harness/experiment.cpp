#include "penbsde/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <thread>

#include "penbsde/constrained.hpp"
#include "penbsde/control.hpp"
#include "penbsde/harness/instances.hpp"
#include "penbsde/penalized.hpp"
#include "penbsde/reference.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/switching.hpp"

namespace penbsde::harness {
namespace {

using Checks = std::vector<CheckResult>;
using Suite = std::function<Checks(const ExperimentConfig&, RandomStream&)>;

CheckResult near(const std::string& name, double value, double reference, const std::string& provenance,
                 double tolerance) {
    return {name, value, reference, provenance, tolerance, std::abs(value - reference) <= tolerance, 0.0};
}

CheckResult atMost(const std::string& name, double value, double limit, const std::string& provenance,
                   double tolerance = 0.0) {
    return {name, value, limit, provenance, tolerance, value <= limit + tolerance, 0.0};
}

CheckResult withinSigmas(const std::string& name, const MonteCarloEstimate& estimate, double reference,
                         const std::string& provenance, double sigmas) {
    return near(name, estimate.mean, reference, provenance, estimate.band(reference, sigmas));
}

double relativeGap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

constexpr double kIntensityChoices[] = {0.5, 1.0, 2.0, 5.0};

struct SmallInstance {
    TimeGrid grid;
    ProblemSpec spec;
    double intensity;
};

SmallInstance smallInstance(RandomStream& stream, std::size_t maxSteps, double horizon) {
    const std::size_t K = 1 + uniformIndex(stream, maxSteps);
    const double intensity = kIntensityChoices[uniformIndex(stream, 4)];
    return {TimeGrid(0.0, horizon, K), randomProblem(stream, true, intensity), intensity};
}

// constant-data ------------------------------------------------------------

Checks constantClosedForm(const ExperimentConfig& c, RandomStream&) {
    const double lambda = c.intensities.front();
    const double T = c.horizon;
    const Lattice lattice(TimeGrid(0.0, T, c.steps));
    const ProblemSpec spec = constantProblem(0.0, 1.0, 0.0, lambda);
    const double reference = -std::expm1(-lambda * T);
    const SolveOptions rootOnly{false};
    const ArrivalOverlay overlay(lattice.grid(), lambda);

    Checks out;
    out.push_back(near("penalized-root", solvePenalized(lattice, spec, rootOnly).root(), reference, "closed-form",
                       c.tolerances.closedForm));
    out.push_back(near("stopping-root", poissonStoppingDP(lattice, overlay, spec, nullptr, rootOnly).root(),
                       reference, "closed-form", c.tolerances.closedForm));
    out.push_back(near("control-root", optimalControlValue(lattice, spec, rootOnly).field.root(), reference,
                       "closed-form", c.tolerances.closedForm));
    const auto solution = [lambda, T](double s) { return -std::expm1(-lambda * (T - s)); };
    out.push_back(near("interval-discount",
                       intervalDiscountValue([](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, lambda,
                                             0.0, T, solution),
                       reference, "closed-form", 1e-10));
    out.push_back(near("ode-root", reference::penalizedOdeRoot(0.0, 1.0, 0.0, lambda, T, 10000), reference,
                       "closed-form", 1e-10));
    return out;
}

Checks constantIdentity(const ExperimentConfig& c, RandomStream&) {
    const Lattice lattice(TimeGrid(0.0, c.horizon, std::min<std::size_t>(c.steps, 256)));
    const ProblemSpec spec = constantProblem(0.0, 1.0, 0.0, c.intensities.front());
    const ArrivalOverlay overlay(lattice.grid(), spec.penalty);
    Checks out;
    out.push_back(atMost("stopping-identity", penalizedEqualsStoppingIdentity(lattice, overlay, spec).maxDiscrepancy,
                         0.0, "identity", c.tolerances.identity));
    const IdentityReport control =
        compareNodeArrays(optimalControlValue(lattice, spec).field.y, solvePenalized(lattice, spec).y);
    out.push_back(atMost("control-identity", control.maxDiscrepancy, 0.0, "identity", c.tolerances.identity));
    return out;
}

Checks constantMonteCarlo(const ExperimentConfig& c, RandomStream& stream) {
    const std::size_t K = std::min<std::size_t>(c.steps, 1000);
    const Lattice lattice(TimeGrid(0.0, c.horizon, K));
    const ProblemSpec spec = constantProblem(0.0, 1.0, 0.0, c.intensities.front());
    const ArrivalOverlay overlay(lattice.grid(), spec.penalty);
    const double p = overlay.stepProbability();
    Checks out;
    const MonteCarloEstimate stop =
        simulateStoppingRule(lattice, overlay, spec, StoppingRule::atEveryArrival(K), c.paths, stream);
    out.push_back(withinSigmas("first-arrival-stop", stop, 1.0 - std::pow(1.0 - p, static_cast<double>(K - 1)),
                               "closed-form", c.tolerances.sigmas));
    const IntensityPolicy full = IntensityPolicy::full(K, spec.penalty);
    const MonteCarloEstimate randomized = simulateRandomizedStopping(lattice, spec, full, c.paths, stream);
    out.push_back(withinSigmas("randomized-stop", randomized, randomizedStoppingPayoff(lattice, spec, full),
                               "forward-summation", c.tolerances.sigmas));
    return out;
}

// random-suite ---------------------------------------------------------------

Checks randomStoppingIdentity(const ExperimentConfig& c, RandomStream& stream) {
    double worst = 0.0;
    for (std::size_t n = 0; n < c.instances; ++n) {
        const SmallInstance in = smallInstance(stream, c.steps, c.horizon);
        const Lattice lattice(in.grid);
        worst = std::max(worst, penalizedEqualsStoppingIdentity(lattice, ArrivalOverlay(in.grid, in.intensity), in.spec)
                                    .maxDiscrepancy);
    }
    return {atMost("stopping-identity", worst, 0.0, "identity", c.tolerances.identity)};
}

Checks randomStoppingOracle(const ExperimentConfig& c, RandomStream& stream) {
    double worst = 0.0;
    for (std::size_t n = 0; n < c.instances; ++n) {
        const SmallInstance in = smallInstance(stream, std::min<std::size_t>(c.steps, 4), c.horizon);
        const Lattice lattice(in.grid);
        const ArrivalOverlay overlay(in.grid, in.intensity);
        const ValueField plugIn = solvePenalizedArrival(lattice, overlay, in.spec);
        const double dp = poissonStoppingDP(lattice, overlay, in.spec, &plugIn).root();
        worst = std::max(worst, relativeGap(bruteForceStoppingOracle(lattice, overlay, in.spec, &plugIn), dp));
    }
    return {atMost("stopping-oracle", worst, 0.0, "enumeration-oracle", c.tolerances.oracle)};
}

Checks randomControl(const ExperimentConfig& c, RandomStream& stream) {
    double identity = 0.0, oracle = 0.0, excess = -kInfinity;
    for (std::size_t n = 0; n < c.instances; ++n) {
        const SmallInstance in = smallInstance(stream, c.steps, c.horizon);
        const Lattice lattice(in.grid);
        const OptimalControl optimal = optimalControlValue(lattice, in.spec);
        identity = std::max(identity,
                            compareNodeArrays(optimal.field.y, solvePenalized(lattice, in.spec).y).maxDiscrepancy);
        const double seed = stream.uniform();
        const IntensityPolicy policy = IntensityPolicy::fromPredicate(
            lattice.steps(), in.intensity, [&](std::size_t k, std::size_t j) {
                return RandomStream(static_cast<std::uint64_t>(seed * 1e15)).substream(k * 64 + j).uniform() < 0.5;
            });
        excess = std::max(excess, controlledLinearBSDE(lattice, in.spec, policy).root() - optimal.field.root());
        if (lattice.steps() <= 3)
            oracle = std::max(oracle, relativeGap(bruteForceControlOracle(lattice, in.spec), optimal.field.root()));
    }
    return {atMost("control-identity", identity, 0.0, "identity", c.tolerances.identity),
            atMost("control-oracle", oracle, 0.0, "enumeration-oracle", c.tolerances.oracle),
            atMost("control-suboptimality", excess, 0.0, "comparison", c.tolerances.policy)};
}

Checks randomSwitchingSuite(const ExperimentConfig& c, RandomStream& stream) {
    double identity = 0.0, oracle = 0.0;
    for (std::size_t n = 0; n < c.instances; ++n) {
        const std::size_t d = 2 + uniformIndex(stream, 2);
        const SmallInstance shape = smallInstance(stream, c.steps, c.horizon);
        const RandomSwitchingInstance in = randomSwitching(stream, d, true);
        const Lattice lattice(shape.grid);
        const ArrivalOverlay overlay(shape.grid, shape.intensity);
        identity = std::max(
            identity, switchingEqualsPenalizedIdentity(lattice, overlay, in.regimes, in.costs).maxDiscrepancy);

        const Lattice tiny(TimeGrid(0.0, c.horizon, std::min<std::size_t>(shape.grid.steps(), 3)));
        const ArrivalOverlay tinyOverlay(tiny.grid(), shape.intensity);
        const RegimeValueField plugIn = solveMultiPenalizedArrival(tiny, tinyOverlay, in.regimes, in.costs);
        const RegimeAugmentedField dp = poissonSwitchingDP(tiny, tinyOverlay, in.regimes, in.costs, &plugIn);
        const std::vector<double> brute = bruteForceSwitchingOracle(tiny, tinyOverlay, in.regimes, in.costs, &plugIn);
        for (std::size_t i = 0; i < d; ++i) oracle = std::max(oracle, relativeGap(brute[i], dp.root(i)));
    }
    return {atMost("switching-identity", identity, 0.0, "identity", c.tolerances.identity),
            atMost("switching-oracle", oracle, 0.0, "enumeration-oracle", c.tolerances.oracle)};
}

Checks randomConstrained(const ExperimentConfig& c, RandomStream& stream) {
    double worst = 0.0;
    for (std::size_t n = 0; n < c.instances; ++n) {
        const SmallInstance in = smallInstance(stream, c.steps, c.horizon);
        const ConstraintSet set = randomConstraintSet(stream);
        const double bound = uniformIn(stream, 0.0, std::min(3.0, 0.9 / std::sqrt(in.grid.dt())));
        const Lattice lattice(in.grid);
        worst = std::max(worst, constrainedEqualsRepresentationIdentity(lattice, ArrivalOverlay(in.grid, in.intensity),
                                                                        in.spec, set, bound)
                                    .maxDiscrepancy);
    }
    return {atMost("constrained-identity", worst, 0.0, "identity", c.tolerances.identity)};
}

Checks randomDuality(const ExperimentConfig& c, RandomStream& stream) {
    double duality = 0.0, algebraic = 0.0;
    for (std::size_t n = 0; n < 1000; ++n) {
        const ConstraintSet set = randomConstraintSet(stream);
        const double bound = uniformIn(stream, 0.0, 5.0);
        const double z = uniformIn(stream, -5.0, 5.0);
        const double samples[] = {uniformIn(stream, -bound, bound), bound, -bound, 0.0};
        duality = std::max(duality, penaltyDualityCheck(set, bound, std::span<const double>(&z, 1), samples));
        algebraic = std::max(algebraic, algebraicResidual(set, bound, z, solveAlgebraicControl(set, bound, z)));
    }
    return {atMost("duality-residual", duality, 0.0, "closed-form", c.tolerances.identity),
            atMost("algebraic-residual", algebraic, 0.0, "closed-form", c.tolerances.identity)};
}

Checks randomLikelihood(const ExperimentConfig& c, RandomStream& stream) {
    double worst = 0.0;
    for (std::size_t n = 0; n < 5; ++n) {
        const std::size_t K = 10;
        const Lattice lattice(TimeGrid(0.0, c.horizon, K));
        const double bound = 0.95 / lattice.sqrtDt();
        const DualControl control = DualControl::fromFunction(
            K, bound, [&](std::size_t, std::size_t) { return uniformIn(stream, -bound, bound); });
        worst = std::max(worst, std::abs(likelihoodExpectation(girsanovWeights(lattice, control)) - 1.0));
    }
    return {atMost("likelihood-mean", worst, 0.0, "exact-enumeration", c.tolerances.identity)};
}

// american-put -----------------------------------------------------------------

reference::AmericanPut putOf(const ExperimentConfig& c) { return {c.spot, c.strike, c.volatility, c.horizon, c.putRate}; }

Checks putBinomial(const ExperimentConfig& c, RandomStream&) {
    const TimeGrid grid(0.0, c.horizon, c.steps);
    const double lattice = solveReflected(Lattice(grid), reference::americanPutProblem(putOf(c), grid), {false}).root();
    const double oracle = reference::americanPutOracle(putOf(c), c.steps);
    return {atMost("reflected-vs-binomial", relativeGap(lattice, oracle), 0.0, "binomial-oracle", c.tolerances.oracle)};
}

Checks putLadder(const ExperimentConfig& c, RandomStream&) {
    const TimeGrid grid(0.0, c.horizon, c.steps);
    const Lattice lattice(grid);
    const LadderReport report = lambdaLadder(lattice, reference::americanPutProblem(putOf(c), grid), c.intensities);
    double worstDrop = 0.0;
    for (const auto& v : report.violations) worstDrop = std::max(worstDrop, v.amount);
    Checks out;
    out.push_back(atMost("ladder-monotone", worstDrop, 0.0, "monotonicity", c.tolerances.ladder));
    double increases = 0.0;
    for (std::size_t i = 1; i < report.entries.size(); ++i)
        if (report.entries[i].supGap > report.entries[i - 1].supGap + 1e-12) increases += 1.0;
    out.push_back(atMost("ladder-gap-increases", increases, 0.0, "monotonicity"));
    const LadderEntry& first = report.entries.front();
    const LadderEntry& last = report.entries.back();
    CheckResult shrink{"ladder-gap-shrinks", last.supGap, first.supGap, "ladder", 0.0,
                       report.entries.size() == 1 || last.supGap < first.supGap, 0.0};
    out.push_back(shrink);
    return out;
}

Checks putControlLimit(const ExperimentConfig& c, RandomStream&) {
    const TimeGrid grid(0.0, c.horizon, c.steps);
    const Lattice lattice(grid);
    const ProblemSpec spec = reference::americanPutProblem(putOf(c), grid);
    const ControlLimitReport control = reflectedControlLimit(lattice, spec, c.intensities);
    const LadderReport ladder = lambdaLadder(lattice, spec, c.intensities);
    double worst = 0.0;
    for (std::size_t i = 0; i < control.entries.size(); ++i)
        worst = std::max(worst, relativeGap(control.entries[i].root, ladder.entries[i].root));
    return {atMost("control-equals-penalized", worst, 0.0, "identity", c.tolerances.identity),
            CheckResult{"control-roots-nondecreasing", control.rootsNondecreasing() ? 1.0 : 0.0, 1.0,
                        "monotonicity", 0.0, control.rootsNondecreasing(), 0.0},
            CheckResult{"control-gaps-nonincreasing", control.gapsNonincreasing() ? 1.0 : 0.0, 1.0,
                        "monotonicity", 0.0, control.gapsNonincreasing(), 0.0}};
}

// switching-2regime ----------------------------------------------------------------

Checks twoRegimeOde(const ExperimentConfig& c, RandomStream&) {
    const RandomSwitchingInstance in = twoRegimeInstance(c.switchingCost);
    const double lambda = c.intensities.front();
    const Lattice lattice(TimeGrid(0.0, c.horizon, c.steps));
    const RegimeAugmentedField dp = poissonSwitchingDP(lattice, ArrivalOverlay(lattice.grid(), lambda), in.regimes, in.costs);
    const std::vector<double> ode =
        reference::switchingOdeRoots({1.0, 0.0}, {0.0, 0.0}, in.costs, lambda, c.horizon, 20000);
    return {near("regime-1-root", dp.root(0), ode[0], "ode-oracle", c.tolerances.ode),
            near("regime-2-root", dp.root(1), ode[1], "ode-oracle", c.tolerances.ode)};
}

Checks twoRegimeIdentity(const ExperimentConfig& c, RandomStream&) {
    const RandomSwitchingInstance in = twoRegimeInstance(c.switchingCost);
    const Lattice lattice(TimeGrid(0.0, c.horizon, c.steps));
    const ArrivalOverlay overlay(lattice.grid(), c.intensities.front());
    const RegimeAugmentedField dp = poissonSwitchingDP(lattice, overlay, in.regimes, in.costs);
    return {atMost("switching-identity",
                   switchingEqualsPenalizedIdentity(lattice, overlay, in.regimes, in.costs).maxDiscrepancy, 0.0,
                   "identity", c.tolerances.identity),
            atMost("chain-gain", sameInstantChainGain(dp, in.costs), 0.0, "triangle-condition"),
            atMost("round-trips", static_cast<double>(countSameInstantRoundTrips(extractSwitchingStrategy(dp, in.costs))),
                   0.0, "triangle-condition")};
}

Checks twoRegimeMonteCarlo(const ExperimentConfig& c, RandomStream& stream) {
    const RandomSwitchingInstance in = twoRegimeInstance(c.switchingCost);
    const Lattice lattice(TimeGrid(0.0, c.horizon, std::min<std::size_t>(c.steps, 1000)));
    const ArrivalOverlay overlay(lattice.grid(), c.intensities.front());
    const RegimeAugmentedField dp = poissonSwitchingDP(lattice, overlay, in.regimes, in.costs);
    const SwitchingStrategy strategy = extractSwitchingStrategy(dp, in.costs);
    const MonteCarloEstimate est =
        simulateSwitchingStrategy(lattice, overlay, in.regimes, in.costs, strategy, 1, c.paths, stream);
    return {withinSigmas("regime-2-strategy", est, dp.root(1), "dynamic-programming", c.tolerances.sigmas)};
}

// constrained-interval ----------------------------------------------------------------

struct ConstrainedCase {
    Lattice lattice;
    ArrivalOverlay overlay;
    ProblemSpec spec;
    ConstraintSet set;
};

ConstrainedCase constrainedCase(const ExperimentConfig& c, std::size_t steps) {
    RandomStream data(c.seed ^ 0x5bd1e995ULL);
    const TimeGrid grid(0.0, c.horizon, steps);
    return {Lattice(grid), ArrivalOverlay(grid, c.intensities.front()), randomProblem(data, true, c.intensities.front()),
            ConstraintSet::interval(c.constraintLower, c.constraintUpper)};
}

Checks constrainedIdentity(const ExperimentConfig& c, RandomStream&) {
    const ConstrainedCase cc = constrainedCase(c, c.steps);
    double worst = 0.0;
    for (const double bound : c.bounds)
        worst = std::max(worst, constrainedEqualsRepresentationIdentity(cc.lattice, cc.overlay, cc.spec, cc.set, bound)
                                    .maxDiscrepancy);
    return {atMost("constrained-identity", worst, 0.0, "identity", c.tolerances.identity)};
}

Checks constrainedDuality(const ExperimentConfig& c, RandomStream& stream) {
    const ConstraintSet set = ConstraintSet::interval(c.constraintLower, c.constraintUpper);
    std::vector<double> zs, nus;
    for (int i = -40; i <= 40; ++i) zs.push_back(0.1 * i);
    double worst = 0.0;
    for (const double bound : c.bounds) {
        nus.clear();
        for (int i = 0; i < 16; ++i) nus.push_back(uniformIn(stream, -bound, bound));
        worst = std::max(worst, penaltyDualityCheck(set, bound, zs, nus));
    }
    return {atMost("duality-residual", worst, 0.0, "closed-form", c.tolerances.identity)};
}

Checks constrainedLikelihood(const ExperimentConfig& c, RandomStream&) {
    const ConstrainedCase cc = constrainedCase(c, std::min<std::size_t>(c.steps, 10));
    double worst = 0.0;
    for (const double bound : c.bounds) {
        const ConstrainedRepresentation rep =
            constrainedRepresentationDP(cc.lattice, cc.overlay, cc.spec, cc.set, bound);
        worst = std::max(worst, std::abs(likelihoodExpectation(girsanovWeights(cc.lattice, rep.control)) - 1.0));
    }
    return {atMost("likelihood-mean", worst, 0.0, "exact-enumeration", c.tolerances.identity)};
}

Checks constrainedMonteCarlo(const ExperimentConfig& c, RandomStream& stream) {
    const ConstrainedCase cc = constrainedCase(c, std::min<std::size_t>(c.steps, 200));
    const double bound = c.bounds.back();
    const ValueField plugIn = solveConstrainedPenalizedArrival(cc.lattice, cc.overlay, cc.spec, cc.set, bound);
    const ConstrainedRepresentation rep =
        constrainedRepresentationDP(cc.lattice, cc.overlay, cc.spec, cc.set, bound, &plugIn);
    const StoppingRule rule = extractOptimalRule(rep.field, cc.lattice, cc.spec);
    const MonteCarloEstimate est =
        simulateDualControl(cc.lattice, cc.overlay, cc.spec, cc.set, rep.control, rule, c.paths, stream, &plugIn);
    return {withinSigmas("dual-policy", est, rep.field.root(), "dynamic-programming", c.tolerances.sigmas)};
}

Checks constrainedLadder(const ExperimentConfig& c, RandomStream&) {
    const ConstrainedCase cc = constrainedCase(c, c.steps);
    const ConstrainedLadderReport report =
        reflectedConstrainedLadder(cc.lattice, cc.spec, cc.set, c.intensities, c.bounds);
    const bool inLambda = report.monotoneInIntensity(c.tolerances.ladder);
    const bool inBound = report.monotoneInBound(c.tolerances.ladder);
    return {CheckResult{"monotone-in-intensity", inLambda ? 1.0 : 0.0, 1.0, "monotonicity", 0.0, inLambda, 0.0},
            CheckResult{"monotone-in-bound", inBound ? 1.0 : 0.0, 1.0, "monotonicity", 0.0, inBound, 0.0}};
}

const std::map<std::string, std::vector<std::pair<std::string, Suite>>>& registry() {
    static const std::map<std::string, std::vector<std::pair<std::string, Suite>>> families = {
        {"constant-data",
         {{"closed-form", constantClosedForm}, {"identity", constantIdentity}, {"monte-carlo", constantMonteCarlo}}},
        {"random-suite",
         {{"stopping-identity", randomStoppingIdentity},
          {"stopping-oracle", randomStoppingOracle},
          {"control", randomControl},
          {"switching", randomSwitchingSuite},
          {"constrained", randomConstrained},
          {"duality", randomDuality},
          {"likelihood", randomLikelihood}}},
        {"american-put", {{"binomial", putBinomial}, {"ladder", putLadder}, {"control-limit", putControlLimit}}},
        {"switching-2regime",
         {{"ode", twoRegimeOde}, {"identity", twoRegimeIdentity}, {"monte-carlo", twoRegimeMonteCarlo}}},
        {"constrained-interval",
         {{"identity", constrainedIdentity},
          {"duality", constrainedDuality},
          {"likelihood", constrainedLikelihood},
          {"monte-carlo", constrainedMonteCarlo},
          {"ladder", constrainedLadder}}},
    };
    return families;
}

}  // namespace

std::vector<std::string> listFamilies() {
    std::vector<std::string> names;
    for (const auto& [name, suites] : registry()) names.push_back(name);
    return names;
}

std::vector<std::string> familySuites(const std::string& family) {
    std::vector<std::string> names;
    const auto it = registry().find(family);
    if (it == registry().end()) return names;
    for (const auto& suite : it->second) names.push_back(suite.first);
    return names;
}

RunReport runExperiment(const ExperimentConfig& config, std::size_t jobs) {
    validateConfig(config);
    const auto& suites = registry().at(config.family);

    struct Task {
        std::size_t index;
        const std::pair<std::string, Suite>* suite;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < suites.size(); ++i) {
        const bool selected = !config.suites || std::find(config.suites->begin(), config.suites->end(),
                                                          suites[i].first) != config.suites->end();
        if (selected) tasks.push_back({i, &suites[i]});
    }

    std::vector<Checks> results(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const Task& task = tasks[t];
            RandomStream stream = RandomStream(config.seed).substream(task.index);
            const auto started = std::chrono::steady_clock::now();
            Checks checks;
            try {
                checks = task.suite->second(config, stream);
            } catch (const std::exception& e) {
                checks = {CheckResult{"error", 0.0, 0.0, e.what(), 0.0, false, 0.0}};
            }
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            for (auto& check : checks) {
                check.name = task.suite->first + "/" + check.name;
                check.seconds = seconds;
            }
            results[t] = std::move(checks);
        }
    };

    const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(tasks.size(), 1));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& thread : pool) thread.join();
    }

    RunReport report;
    report.experiment = config.name;
    report.family = config.family;
    report.seed = config.seed;
    for (auto& checks : results)
        for (auto& check : checks) report.checks.push_back(std::move(check));
    return report;
}

}  // namespace penbsde::harness
