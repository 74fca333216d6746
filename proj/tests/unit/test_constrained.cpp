#include <gtest/gtest.h>

#include <cmath>

#include "frozen_values.hpp"
#include "penbsde/constrained.hpp"
#include "penbsde/harness/instances.hpp"
#include "penbsde/penalized.hpp"
#include "test_support.hpp"

using namespace penbsde;
using testing_support::unitLattice;

TEST(ConstraintSet, Descriptors) {
    EXPECT_THROW(ConstraintSet::interval(0.5, 1.0), InvalidParameter);
    EXPECT_THROW(ConstraintSet::interval(-1.0, -0.5), InvalidParameter);
    EXPECT_THROW(ConstraintSet::ball(-1.0), InvalidParameter);
    const ConstraintSet ball = ConstraintSet::ball(2.0);
    EXPECT_EQ(ball.lower(), -2.0);
    EXPECT_EQ(ball.upper(), 2.0);
    EXPECT_TRUE(ConstraintSet::singleton().contains(0.0));
    EXPECT_FALSE(ConstraintSet::singleton().contains(1e-300));
    EXPECT_TRUE(ConstraintSet::wholeLine().contains(1e300));
    EXPECT_EQ(ConstraintSet::interval(-1, 2).project(3.0), 2.0);
    EXPECT_EQ(ConstraintSet::interval(-1, 2).project(0.5), 0.5);
}

TEST(DistanceToSet, Examples) {
    EXPECT_EQ(distanceToSet(ConstraintSet::interval(-1, 2), 3.0), 1.0);
    EXPECT_EQ(distanceToSet(ConstraintSet::interval(-1, 2), 0.7), 0.0);
    EXPECT_EQ(distanceToSet(ConstraintSet::singleton(), -4.0), 4.0);
    EXPECT_EQ(distanceToSet(ConstraintSet::ball(1.5), -4.0), 2.5);
    EXPECT_EQ(distanceToSet(ConstraintSet::wholeLine(), -4.0), 0.0);
}

TEST(SupportFunction, Examples) {
    EXPECT_EQ(supportFunction(ConstraintSet::interval(-1, 2), 3.0), 6.0);
    EXPECT_EQ(supportFunction(ConstraintSet::interval(-1, 2), -3.0), 3.0);
    EXPECT_EQ(supportFunction(ConstraintSet::ball(2.0), -1.5), 3.0);
    EXPECT_EQ(supportFunction(ConstraintSet::singleton(), 7.0), 0.0);
    EXPECT_TRUE(std::isinf(supportFunction(ConstraintSet::wholeLine(), 0.1)));
    EXPECT_EQ(supportFunction(ConstraintSet::wholeLine(), 0.0), 0.0);
    EXPECT_FALSE(inBarrierCone(ConstraintSet::wholeLine(), -0.1));
    EXPECT_TRUE(inBarrierCone(ConstraintSet::interval(-1, 2), -0.1));
}

TEST(SupportFunction, HomogeneityAndSubadditivity) {
    RandomStream stream(131);
    for (int n = 0; n < 2000; ++n) {
        const ConstraintSet set = harness::randomConstraintSet(stream);
        const double a = harness::uniformIn(stream, -5, 5), b = harness::uniformIn(stream, -5, 5);
        const double c = harness::uniformIn(stream, 0, 4);
        const double sa = supportFunction(set, a), sb = supportFunction(set, b);
        if (std::isfinite(sa)) {
            ASSERT_NEAR(supportFunction(set, c * a), c * sa, 1e-12 * (1 + std::abs(c * sa)));
        }
        if (std::isfinite(sa) && std::isfinite(sb)) {
            ASSERT_LE(supportFunction(set, a + b), sa + sb + 1e-12);
        }
    }
}

TEST(DistanceToSet, ZeroExactlyInsideAndLipschitz) {
    RandomStream stream(137);
    for (int n = 0; n < 2000; ++n) {
        const ConstraintSet set = harness::randomConstraintSet(stream);
        const double z = harness::uniformIn(stream, -5, 5), w = harness::uniformIn(stream, -5, 5);
        ASSERT_EQ(distanceToSet(set, z) == 0.0, set.contains(z));
        ASSERT_LE(std::abs(distanceToSet(set, z) - distanceToSet(set, w)), std::abs(z - w) + 1e-15);
    }
}

TEST(AlgebraicControl, Examples) {
    const ConstraintSet set = ConstraintSet::interval(-1, 2);
    EXPECT_EQ(solveAlgebraicControl(set, 3.0, 1.0), 0.0);
    EXPECT_EQ(solveAlgebraicControl(set, 3.0, 4.0), 3.0);
    EXPECT_EQ(algebraicResidual(set, 3.0, 4.0, 3.0), 0.0);
    EXPECT_EQ(solveAlgebraicControl(set, 3.0, -2.0), -3.0);
    EXPECT_EQ(algebraicResidual(set, 3.0, -2.0, -3.0), 0.0);
    EXPECT_TRUE(std::isinf(algebraicResidual(ConstraintSet::wholeLine(), 1.0, 2.0, 0.5)));
}

TEST(AlgebraicControl, RandomResidualsAndAdmissibility) {
    RandomStream stream(139);
    std::vector<double> zs(1), nus;
    for (int n = 0; n < 1000; ++n) {
        const ConstraintSet set = harness::randomConstraintSet(stream);
        const double m = harness::uniformIn(stream, 0, 5);
        const double z = harness::uniformIn(stream, -5, 5);
        const double nu = solveAlgebraicControl(set, m, z);
        ASSERT_LE(std::abs(nu), m);
        ASSERT_TRUE(inBarrierCone(set, nu));
        ASSERT_LE(algebraicResidual(set, m, z, nu), 1e-12);
        zs[0] = z;
        nus = {harness::uniformIn(stream, -m, m), m, -m, 0.0};
        ASSERT_LE(penaltyDualityCheck(set, m, zs, nus), 1e-12);
    }
}

TEST(PenaltyDuality, Examples) {
    const ConstraintSet set = ConstraintSet::interval(-1, 2);
    const std::vector<double> inside{0.0, 1.5, -1.0}, outside{4.0};
    const std::vector<double> samples{-3, -1, 0, 1, 3};
    EXPECT_EQ(penaltyDualityCheck(set, 3.0, inside, samples), 0.0);
    EXPECT_EQ(penaltyDualityCheck(set, 3.0, outside, samples), 0.0);
}

TEST(DualControl, Construction) {
    DualControl zero = DualControl::zero(3, 1.0);
    EXPECT_EQ(zero.steps(), 3u);
    EXPECT_EQ(zero(2, 2), 0.0);
    zero.set(1, 1, 0.5);
    EXPECT_EQ(zero(1, 1), 0.5);
    EXPECT_THROW(zero.set(1, 1, 1.5), InvalidParameter);
    EXPECT_THROW(DualControl::fromFunction(2, 1.0, [](std::size_t, std::size_t) { return 2.0; }), InvalidParameter);
    EXPECT_TRUE(zero.admissible(ConstraintSet::interval(-1, 1)));
    EXPECT_FALSE(zero.admissible(ConstraintSet::wholeLine()));
}

TEST(GirsanovWeights, TiltAlgebra) {
    const Lattice lattice = unitLattice(6);
    const TiltedLaw base = girsanovWeights(lattice, DualControl::zero(6, 1.0));
    for (std::uint64_t walk = 0; walk < 64; ++walk) EXPECT_EQ(base.pathLikelihood(walk), 1.0);
    RandomStream stream(149);
    const double bound = 2.0;
    const DualControl control = DualControl::fromFunction(
        6, bound, [&](std::size_t, std::size_t) { return harness::uniformIn(stream, -bound, bound); });
    const TiltedLaw law = girsanovWeights(lattice, control);
    for (std::size_t k = 0; k < 6; ++k)
        for (std::size_t j = 0; j <= k; ++j) {
            const double up = law.upProbability(k, j), down = law.downProbability(k, j);
            EXPECT_GT(up, 0.0);
            EXPECT_LT(up, 1.0);
            EXPECT_EQ(up + down, 1.0);
            EXPECT_NEAR(law.incrementMean(k, j, lattice.sqrtDt()), control(k, j) * lattice.dt(), 1e-15);
        }
    EXPECT_NEAR(likelihoodExpectation(law), 1.0, 1e-12);
}

TEST(GirsanovWeights, LikelihoodMeanOnTenSteps) {
    RandomStream stream(151);
    const Lattice lattice = unitLattice(10);
    for (int n = 0; n < 10; ++n) {
        const double bound = 0.99 / lattice.sqrtDt();
        const DualControl control = DualControl::fromFunction(
            10, bound, [&](std::size_t, std::size_t) { return harness::uniformIn(stream, -bound, bound); });
        ASSERT_NEAR(likelihoodExpectation(girsanovWeights(lattice, control)), 1.0, 1e-12);
    }
}

TEST(GirsanovWeights, GuardNamesNode) {
    const Lattice lattice = unitLattice(4);  // sqrt(dt) = 0.5
    DualControl control = DualControl::zero(4, 5.0);
    control.set(2, 1, 2.0);
    try {
        girsanovWeights(lattice, control);
        FAIL();
    } catch (const InvalidParameter& e) {
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
    EXPECT_THROW(likelihoodExpectation(girsanovWeights(unitLattice(21), DualControl::zero(21, 1.0))), SizeGuardError);
}

TEST(ConstrainedRepresentation, ReducesToStoppingWhenUnconstrained) {
    const Lattice lattice = unitLattice(8);
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    const ProblemSpec spec = testing_support::probeProblem();
    const ValueField plugIn = solvePenalizedArrival(lattice, overlay, spec);
    const AugmentedValueField stopping = poissonStoppingDP(lattice, overlay, spec, &plugIn);
    for (const auto& [set, m] : {std::pair{ConstraintSet::wholeLine(), 1.0}, std::pair{ConstraintSet::singleton(), 0.0}}) {
        const ConstrainedRepresentation rep = constrainedRepresentationDP(lattice, overlay, spec, set, m, &plugIn);
        EXPECT_LE(compareNodeArrays(rep.field.continuation, stopping.continuation).maxDiscrepancy, 1e-14);
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t j = 0; j <= k; ++j) EXPECT_EQ(rep.control(k, j), 0.0);
    }
}

TEST(ConstrainedRepresentation, IdentityOnRandomInstances) {
    RandomStream stream(157);
    static constexpr double kIntensities[] = {0.5, 1.0, 2.0, 5.0};
    for (int n = 0; n < 50; ++n) {
        const Lattice lattice = unitLattice(1 + harness::uniformIndex(stream, 8));
        const double lambda = kIntensities[harness::uniformIndex(stream, 4)];
        const ProblemSpec spec = harness::randomProblem(stream, true, lambda);
        const ConstraintSet set = n % 5 == 0 ? ConstraintSet::singleton() : harness::randomConstraintSet(stream);
        const double m = harness::uniformIn(stream, 0.0, std::min(3.0, 0.9 / lattice.sqrtDt()));
        const IdentityReport report =
            constrainedEqualsRepresentationIdentity(lattice, ArrivalOverlay(lattice.grid(), lambda), spec, set, m);
        ASSERT_TRUE(report.passed()) << report.maxDiscrepancy;
    }
}

TEST(ConstrainedRepresentation, MatchesFrozenRootAndExactPolicyValue) {
    const Lattice lattice = unitLattice(3);
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    const ProblemSpec spec = testing_support::probeProblem();
    const ConstraintSet set = ConstraintSet::interval(-0.2, 0.3);
    const ValueField plugIn = solveConstrainedPenalizedArrival(lattice, overlay, spec, set, 1.5);
    const ConstrainedRepresentation rep = constrainedRepresentationDP(lattice, overlay, spec, set, 1.5, &plugIn);
    EXPECT_NEAR(rep.field.root(), frozen::kProbeConstrainedArrivalRoot, 1e-12);
    const StoppingRule rule = extractOptimalRule(rep.field, lattice, spec);
    EXPECT_NEAR(evaluateDualControlExactly(lattice, overlay, spec, set, rep.control, rule, &plugIn), rep.field.root(),
                1e-12);
    EXPECT_TRUE(rep.control.admissible(set));
    // Any other admissible pair does no better.
    RandomStream stream(163);
    for (int n = 0; n < 50; ++n) {
        const DualControl other = DualControl::fromFunction(
            3, 1.5, [&](std::size_t, std::size_t) { return harness::uniformIn(stream, -1.5, 1.5); });
        const StoppingRule anyRule =
            StoppingRule::fromPredicate(3, [&](std::size_t, std::size_t) { return stream.uniform() < 0.5; });
        ASSERT_LE(evaluateDualControlExactly(lattice, overlay, spec, set, other, anyRule, &plugIn),
                  rep.field.root() + 1e-12);
    }
}

TEST(SimulateDualControl, ExtractedPairAndZeroControl) {
    RandomStream stream(167);
    const Lattice lattice = unitLattice(12);
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    const ProblemSpec spec = testing_support::probeProblem();
    const ConstraintSet set = ConstraintSet::singleton();
    const ValueField plugIn = solveConstrainedPenalizedArrival(lattice, overlay, spec, set, 1.0);
    const ConstrainedRepresentation rep = constrainedRepresentationDP(lattice, overlay, spec, set, 1.0, &plugIn);
    const StoppingRule rule = extractOptimalRule(rep.field, lattice, spec);
    const MonteCarloEstimate est =
        simulateDualControl(lattice, overlay, spec, set, rep.control, rule, 100000, stream, &plugIn);
    EXPECT_TRUE(est.within(rep.field.root())) << est.mean << " vs " << rep.field.root();

    const MonteCarloEstimate idle =
        simulateDualControl(lattice, overlay, spec, set, DualControl::zero(12, 1.0), rule, 100000, stream, &plugIn);
    EXPECT_TRUE(idle.atMost(rep.field.root()));
    // Zero control and no support charge: plain stopping under the base law.
    EXPECT_TRUE(idle.within(evaluateStoppingRuleExactly(lattice, overlay, spec, rule, &plugIn)));
    EXPECT_THROW(simulateDualControl(lattice, overlay, spec, set, rep.control, rule, 0, stream), InvalidParameter);
}

TEST(ReflectedConstrainedLadder, MonotoneTable) {
    const Lattice lattice = unitLattice(32);
    const std::vector<double> lambdas{1, 2, 4, 8}, bounds{0.5, 1, 2};
    const ConstrainedLadderReport report = reflectedConstrainedLadder(
        lattice, testing_support::probeProblem(), ConstraintSet::interval(-0.2, 0.3), lambdas, bounds);
    EXPECT_TRUE(report.monotoneInIntensity());
    EXPECT_TRUE(report.monotoneInBound());
    ASSERT_EQ(report.roots.size(), 4u);
    ASSERT_EQ(report.roots[0].size(), 3u);

    const ConstrainedLadderReport whole = reflectedConstrainedLadder(
        lattice, testing_support::probeProblem(), ConstraintSet::wholeLine(), lambdas, bounds);
    for (const auto& row : whole.roots)
        for (double v : row) EXPECT_EQ(v, row.front());
    ProblemSpec inactive = testing_support::probeProblem();
    inactive.obstacle = constantObstacle(kInactiveObstacle);
    const ConstrainedLadderReport flat =
        reflectedConstrainedLadder(lattice, inactive, ConstraintSet::singleton(), lambdas, bounds);
    for (std::size_t l = 0; l < bounds.size(); ++l)
        for (std::size_t i = 0; i < lambdas.size(); ++i) EXPECT_EQ(flat.roots[i][l], flat.roots[0][l]);
}
