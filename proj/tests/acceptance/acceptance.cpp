// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "penbsde/constrained.hpp"
#include "penbsde/control.hpp"
#include "penbsde/harness/experiment.hpp"
#include "penbsde/harness/instances.hpp"
#include "penbsde/penalized.hpp"
#include "penbsde/reference.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/switching.hpp"

using namespace penbsde;
using namespace penbsde::harness;

namespace {

// Pinned tolerances.
constexpr double kCoarseTol = 5e-3;
constexpr double kFineTol = 1e-3;
constexpr double kExactTol = 1e-12;
constexpr double kLadderTol = 1e-10;
constexpr double kPolicyTol = 1e-10;
constexpr double kOdeTol = 5e-3;
constexpr double kSigmas = 3.0;
constexpr std::size_t kPaths = 100000;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool passed;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

RandomStream streamFor(std::uint64_t criterion) { return RandomStream(kSeed).substream(criterion); }

constexpr double kIntensities[] = {0.5, 1.0, 2.0, 5.0};

struct Instance {
    TimeGrid grid;
    ProblemSpec spec;
    double intensity;
};

Instance randomInstance(RandomStream& stream, std::size_t maxSteps) {
    const std::size_t K = 1 + uniformIndex(stream, maxSteps);
    const double intensity = kIntensities[uniformIndex(stream, 4)];
    return {TimeGrid(0.0, 1.0, K), randomProblem(stream, true, intensity), intensity};
}

Outcome constantClosedForm() {
    const double reference = -std::expm1(-2.0);
    const ProblemSpec spec = constantProblem(0.0, 1.0, 0.0, 2.0);
    double worst[2] = {0.0, 0.0};
    const std::size_t steps[2] = {1000, 10000};
    for (int i = 0; i < 2; ++i) {
        const Lattice lattice(TimeGrid(0.0, 1.0, steps[i]));
        const ArrivalOverlay overlay(lattice.grid(), 2.0);
        const SolveOptions rootOnly{false};
        for (const double root : {solvePenalized(lattice, spec, rootOnly).root(),
                                  poissonStoppingDP(lattice, overlay, spec, nullptr, rootOnly).root(),
                                  optimalControlValue(lattice, spec, rootOnly).field.root()})
            worst[i] = std::max(worst[i], std::abs(root - reference));
    }
    return {worst[0] <= kCoarseTol && worst[1] <= kFineTol,
            fmt("max error %.3e at dt=1e-3 (tol %.0e), %.3e at dt=1e-4", worst[0], kCoarseTol, worst[1])};
}

Outcome stoppingIdentity() {
    RandomStream stream = streamFor(2);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const Instance in = randomInstance(stream, 8);
        worst = std::max(worst, penalizedEqualsStoppingIdentity(Lattice(in.grid), ArrivalOverlay(in.grid, in.intensity),
                                                                in.spec)
                                    .maxDiscrepancy);
    }
    return {worst <= kExactTol, fmt("100 instances, max discrepancy %.3e", worst)};
}

Outcome stoppingOracle() {
    RandomStream stream = streamFor(3);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
        const Instance in = randomInstance(stream, 4);
        const Lattice lattice(in.grid);
        const ArrivalOverlay overlay(in.grid, in.intensity);
        const ValueField plugIn = solvePenalizedArrival(lattice, overlay, in.spec);
        const double dp = poissonStoppingDP(lattice, overlay, in.spec, &plugIn).root();
        worst = std::max(worst, std::abs(bruteForceStoppingOracle(lattice, overlay, in.spec, &plugIn) - dp));
    }
    return {worst <= kExactTol, fmt("50 instances, max |enumeration - DP| %.3e", worst)};
}

reference::AmericanPut putInstance() { return {100.0, 100.0, 0.2, 1.0, 0.05}; }

Outcome putLadder() {
    const TimeGrid grid(0.0, 1.0, 200);
    const std::vector<double> ladder{1, 2, 4, 8, 16, 32, 64};
    const LadderReport report =
        lambdaLadder(Lattice(grid), reference::americanPutProblem(putInstance(), grid), ladder);
    double drop = 0.0;
    for (const auto& v : report.violations) drop = std::max(drop, v.amount);
    const double gap8 = report.entries[3].supGap, gap64 = report.entries[6].supGap;
    return {drop <= kLadderTol && gap64 < gap8,
            fmt("worst drop %.3e, sup gap %.4f at lambda=8, %.4f at lambda=64", drop, gap8, gap64)};
}

Outcome putBinomial() {
    const TimeGrid grid(0.0, 1.0, 200);
    const double lattice = solveReflected(Lattice(grid), reference::americanPutProblem(putInstance(), grid)).root();
    const double oracle = reference::americanPutOracle(putInstance(), 200);
    const double diff = std::abs(lattice - oracle);
    return {diff <= kExactTol, fmt("reflected %.12f, binomial %.12f, diff %.3e", lattice, oracle, diff)};
}

Outcome controlRepresentation() {
    RandomStream stream = streamFor(6);
    double identity = 0.0, oracle = 0.0, excess = -kInfinity;
    std::vector<Instance> instances;
    for (int n = 0; n < 100; ++n) {
        const Instance in = randomInstance(stream, 8);
        const Lattice lattice(in.grid);
        identity = std::max(identity, compareNodeArrays(optimalControlValue(lattice, in.spec).field.y,
                                                        solvePenalized(lattice, in.spec).y)
                                          .maxDiscrepancy);
        instances.push_back(in);
    }
    for (int n = 0; n < 25; ++n) {
        const Instance in = randomInstance(stream, 3);
        const Lattice lattice(in.grid);
        oracle = std::max(oracle, std::abs(bruteForceControlOracle(lattice, in.spec) -
                                           optimalControlValue(lattice, in.spec).field.root()));
    }
    for (int n = 0; n < 200; ++n) {
        const Instance& in = instances[n % instances.size()];
        const Lattice lattice(in.grid);
        const double share = stream.uniform();
        const IntensityPolicy policy = IntensityPolicy::fromPredicate(
            lattice.steps(), in.intensity, [&](std::size_t, std::size_t) { return stream.uniform() < share; });
        excess = std::max(excess, controlledLinearBSDE(lattice, in.spec, policy).root() -
                                      optimalControlValue(lattice, in.spec).field.root());
    }
    return {identity <= kExactTol && oracle <= kExactTol && excess <= kPolicyTol,
            fmt("identity %.3e, enumeration %.3e, worst policy excess %.3e", identity, oracle, excess)};
}

Outcome switchingRepresentation() {
    RandomStream stream = streamFor(7);
    double identity = 0.0, oracle = 0.0;
    for (int n = 0; n < 50; ++n) {
        const std::size_t d = 2 + uniformIndex(stream, 2);
        const Instance shape = randomInstance(stream, 8);
        const RandomSwitchingInstance in = randomSwitching(stream, d, true);
        identity = std::max(identity, switchingEqualsPenalizedIdentity(Lattice(shape.grid),
                                                                       ArrivalOverlay(shape.grid, shape.intensity),
                                                                       in.regimes, in.costs)
                                          .maxDiscrepancy);
    }
    for (int n = 0; n < 25; ++n) {
        const std::size_t d = 2 + uniformIndex(stream, 2);
        const Instance shape = randomInstance(stream, 3);
        const RandomSwitchingInstance in = randomSwitching(stream, d, true);
        const Lattice lattice(shape.grid);
        const ArrivalOverlay overlay(shape.grid, shape.intensity);
        const RegimeValueField plugIn = solveMultiPenalizedArrival(lattice, overlay, in.regimes, in.costs);
        const RegimeAugmentedField dp = poissonSwitchingDP(lattice, overlay, in.regimes, in.costs, &plugIn);
        const auto brute = bruteForceSwitchingOracle(lattice, overlay, in.regimes, in.costs, &plugIn);
        for (std::size_t i = 0; i < d; ++i) oracle = std::max(oracle, std::abs(brute[i] - dp.root(i)));
    }
    const RandomSwitchingInstance two = twoRegimeInstance(0.1);
    const Lattice lattice(TimeGrid(0.0, 1.0, 1000));
    const RegimeAugmentedField dp =
        poissonSwitchingDP(lattice, ArrivalOverlay(lattice.grid(), 2.0), two.regimes, two.costs);
    const auto ode = reference::switchingOdeRoots({1.0, 0.0}, {0.0, 0.0}, two.costs, 2.0, 1.0, 20000);
    const double odeError = std::max(std::abs(dp.root(0) - ode[0]), std::abs(dp.root(1) - ode[1]));
    return {identity <= kExactTol && oracle <= kExactTol && odeError <= kOdeTol,
            fmt("identity %.3e, enumeration %.3e, ODE error %.3e", identity, oracle, odeError)};
}

Outcome constrainedRepresentation() {
    RandomStream stream = streamFor(8);
    double duality = 0.0, algebraic = 0.0, identity = 0.0, likelihood = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const ConstraintSet set = randomConstraintSet(stream);
        const double bound = uniformIn(stream, 0.0, 5.0);
        const double z = uniformIn(stream, -5.0, 5.0);
        const double samples[] = {uniformIn(stream, -bound, bound), bound, -bound, 0.0};
        duality = std::max(duality, penaltyDualityCheck(set, bound, std::span<const double>(&z, 1), samples));
        algebraic = std::max(algebraic, algebraicResidual(set, bound, z, solveAlgebraicControl(set, bound, z)));
    }
    for (int n = 0; n < 50; ++n) {
        const Instance in = randomInstance(stream, 8);
        const ConstraintSet set = randomConstraintSet(stream);
        const double bound = uniformIn(stream, 0.0, std::min(3.0, 0.9 / std::sqrt(in.grid.dt())));
        identity = std::max(identity, constrainedEqualsRepresentationIdentity(
                                          Lattice(in.grid), ArrivalOverlay(in.grid, in.intensity), in.spec, set, bound)
                                          .maxDiscrepancy);
    }
    for (std::size_t K = 1; K <= 10; ++K) {
        const Lattice lattice(TimeGrid(0.0, 1.0, K));
        const double bound = 0.95 / lattice.sqrtDt();
        const DualControl control = DualControl::fromFunction(
            K, bound, [&](std::size_t, std::size_t) { return uniformIn(stream, -bound, bound); });
        likelihood = std::max(likelihood, std::abs(likelihoodExpectation(girsanovWeights(lattice, control)) - 1.0));
    }
    const double worst = std::max({duality, algebraic, identity, likelihood});
    return {worst <= kExactTol,
            fmt("duality/algebraic %.3e, identity %.3e, likelihood %.3e", std::max(duality, algebraic), identity,
                likelihood)};
}

/// Tracks the optimal estimate against its root and every perturbed estimate against root + 3 SE.
struct PolicyTally {
    double worstOptimalZ = 0.0;
    double worstPerturbedExcess = -kInfinity;
    bool passed = true;

    void optimal(const MonteCarloEstimate& est, double root) {
        worstOptimalZ = std::max(worstOptimalZ, std::abs(est.mean - root) / std::max(est.standardError, 1e-16));
        passed = passed && est.within(root, kSigmas);
    }
    void perturbed(const MonteCarloEstimate& est, double root) {
        worstPerturbedExcess = std::max(worstPerturbedExcess, (est.mean - root) / std::max(est.standardError, 1e-16));
        passed = passed && est.atMost(root, kSigmas);
    }
};

Outcome monteCarloPolicies() {
    RandomStream stream = streamFor(9);
    RandomStream data = streamFor(90);
    PolicyTally tally;
    const std::size_t K = 50;
    const TimeGrid grid(0.0, 1.0, K);
    const Lattice lattice(grid);
    const double lambda = 2.0;
    const ArrivalOverlay overlay(grid, lambda);
    const ProblemSpec spec = randomProblem(data, true, lambda);
    const auto flip = [&](std::size_t k, std::size_t j) {
        return RandomStream(kSeed).substream(1000 + k * 64 + j).uniform() < 0.2;
    };

    // Optimal stopping at arrivals.
    const ValueField plugIn = solvePenalizedArrival(lattice, overlay, spec);
    const AugmentedValueField stop = poissonStoppingDP(lattice, overlay, spec, &plugIn);
    const StoppingRule rule = extractOptimalRule(stop, lattice, spec);
    tally.optimal(simulateStoppingRule(lattice, overlay, spec, rule, kPaths, stream, &plugIn), stop.root());
    for (int n = 0; n < 3; ++n) {
        const std::size_t salt = static_cast<std::size_t>(n);
        const StoppingRule bent = StoppingRule::fromPredicate(K, [&](std::size_t k, std::size_t j) {
            const bool s = rule.stops(k, j, true);
            return flip(k + salt * 7, j) ? !s : s;
        });
        tally.perturbed(simulateStoppingRule(lattice, overlay, spec, bent, kPaths, stream, &plugIn), stop.root());
    }

    // Randomized stopping with the optimal intensity.
    const OptimalControl control = optimalControlValue(lattice, spec);
    tally.optimal(simulateRandomizedStopping(lattice, spec, control.policy, kPaths, stream, &control.field),
                  control.field.root());
    for (int n = 0; n < 3; ++n) {
        IntensityPolicy bent = control.policy;
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j <= k; ++j)
                if (flip(k + 100 * (n + 1), j)) bent.setActive(k, j, !bent.active(k, j));
        tally.perturbed(simulateRandomizedStopping(lattice, spec, bent, kPaths, stream, &control.field),
                        control.field.root());
    }

    // Switching strategy.
    const RandomSwitchingInstance sw = randomSwitching(data, 2, true);
    const RegimeValueField swPlugIn = solveMultiPenalizedArrival(lattice, overlay, sw.regimes, sw.costs);
    const RegimeAugmentedField swDp = poissonSwitchingDP(lattice, overlay, sw.regimes, sw.costs, &swPlugIn);
    const SwitchingStrategy strategy = extractSwitchingStrategy(swDp, sw.costs);
    for (std::size_t start = 0; start < 2; ++start)
        tally.optimal(simulateSwitchingStrategy(lattice, overlay, sw.regimes, sw.costs, strategy, start, kPaths,
                                                stream, &swPlugIn),
                      swDp.root(start));
    for (int n = 0; n < 3; ++n) {
        const SwitchingStrategy bent =
            SwitchingStrategy::fromFunction(K, 2, [&](std::size_t k, std::size_t j, std::size_t regime) {
                const std::size_t t = strategy.target(k, j, regime, true);
                const std::size_t chosen = t == ImpulseResult::kNone ? regime : t;
                return flip(k + 300 * (n + 1), j) ? 1 - chosen : chosen;
            });
        tally.perturbed(simulateSwitchingStrategy(lattice, overlay, sw.regimes, sw.costs, bent, 0, kPaths, stream,
                                                  &swPlugIn),
                        swDp.root(0));
    }

    // Dual control with stopping under the constraint.
    const ConstraintSet set = ConstraintSet::interval(-0.3, 0.4);
    const double bound = 1.5;
    const ValueField cPlugIn = solveConstrainedPenalizedArrival(lattice, overlay, spec, set, bound);
    const ConstrainedRepresentation rep = constrainedRepresentationDP(lattice, overlay, spec, set, bound, &cPlugIn);
    const StoppingRule cRule = extractOptimalRule(rep.field, lattice, spec);
    tally.optimal(simulateDualControl(lattice, overlay, spec, set, rep.control, cRule, kPaths, stream, &cPlugIn),
                  rep.field.root());
    for (int n = 0; n < 3; ++n) {
        const DualControl bent = DualControl::fromFunction(K, bound, [&](std::size_t k, std::size_t j) {
            return flip(k + 500 * (n + 1), j) ? -rep.control(k, j) : rep.control(k, j);
        });
        const StoppingRule bentRule = n == 2 ? StoppingRule::never(K) : cRule;
        tally.perturbed(simulateDualControl(lattice, overlay, spec, set, bent, bentRule, kPaths, stream, &cPlugIn),
                        rep.field.root());
    }
    return {tally.passed, fmt("worst optimal |z| %.2f, worst perturbed (est - root)/SE %.2f", tally.worstOptimalZ,
                              tally.worstPerturbedExcess)};
}

ExperimentConfig familyConfig(const std::string& family) {
    ExperimentConfig c;
    c.name = family;
    c.family = family;
    c.seed = 42;
    c.paths = 20000;
    if (family == "constant-data") c.steps = 200;
    if (family == "random-suite") c.instances = 6;
    if (family == "american-put") {
        c.steps = 100;
        c.intensities = {1, 2, 4, 8, 16};
    }
    if (family == "switching-2regime") c.steps = 200;
    if (family == "constrained-interval") {
        c.steps = 32;
        c.intensities = {1, 2, 4};
        c.bounds = {0.5, 1, 2};
    }
    return c;
}

Outcome determinism() {
    std::size_t differing = 0, families = 0;
    for (const std::string& family : listFamilies()) {
        const ExperimentConfig c = familyConfig(family);
        const RunReport a = runExperiment(c, 1);
        const RunReport b = runExperiment(c, 3);
        if (emitJson(a) != emitJson(b) || emitCsv(a) != emitCsv(b)) ++differing;
        ++families;
    }
    return {differing == 0, fmt("%.0f of %.0f families byte-identical across reruns", families - differing, families)};
}

struct Criterion {
    const char* name;
    double budgetSeconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"constant-data closed form", 5, constantClosedForm},
        {"penalized equals Poisson stopping", 5, stoppingIdentity},
        {"stopping enumeration oracle", 30, stoppingOracle},
        {"lambda ladder monotone convergence", 10, putLadder},
        {"American put binomial cross-check", 1, putBinomial},
        {"randomized stopping representation", 60, controlRepresentation},
        {"switching representation", 60, switchingRepresentation},
        {"constrained representation", 30, constrainedRepresentation},
        {"Monte Carlo policy consistency", 120, monteCarloPolicies},
        {"deterministic reports", 300, determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool inBudget = seconds <= criteria[i].budgetSeconds;
        const bool passed = outcome.passed && inBudget;
        if (!passed) ++failures;
        std::printf("%s %2zu %s: %s [%.2fs of %.0fs budget]\n", passed ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    outcome.detail.c_str(), seconds, criteria[i].budgetSeconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
