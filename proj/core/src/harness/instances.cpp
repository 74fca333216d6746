#include "penbsde/harness/instances.hpp"

#include <algorithm>
#include <cmath>

namespace penbsde::harness {

double uniformIn(RandomStream& stream, double lo, double hi) { return lo + (hi - lo) * stream.uniform(); }

std::size_t uniformIndex(RandomStream& stream, std::size_t n) {
    const auto i = static_cast<std::size_t>(stream.uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
}

ProblemSpec constantProblem(double rate, double obstacle, double terminal, double intensity) {
    ProblemSpec spec;
    spec.driver = constantDriver(rate);
    spec.obstacle = constantObstacle(obstacle);
    spec.terminal = constantTerminal(terminal);
    spec.penalty = intensity;
    return spec;
}

ProblemSpec randomProblem(RandomStream& stream, bool nonlinear, double intensity) {
    const double a0 = uniformIn(stream, -1.0, 1.0);
    const double a1 = uniformIn(stream, -1.0, 1.0);
    const double a2 = uniformIn(stream, -1.0, 1.0);
    const double a3 = uniformIn(stream, -1.0, 1.0);
    const double kinkA = uniformIn(stream, -0.5, 0.5);
    const double b = nonlinear ? uniformIn(stream, -0.5, 0.5) : 0.0;
    const double c = nonlinear ? uniformIn(stream, -0.5, 0.5) : 0.0;

    const double s0 = uniformIn(stream, -0.5, 1.0);
    const double s1 = uniformIn(stream, -1.0, 1.0);
    const double s2 = uniformIn(stream, -0.5, 0.5);
    const double s3 = uniformIn(stream, -1.0, 1.0);
    const double kinkS = uniformIn(stream, -0.5, 0.5);

    const double v0 = uniformIn(stream, -0.5, 0.5);
    const double v1 = uniformIn(stream, -1.0, 1.0);
    const double v2 = uniformIn(stream, -1.0, 1.0);
    const double kinkV = uniformIn(stream, -0.5, 0.5);

    ProblemSpec spec;
    spec.driver = [=](double t, double x, double y, double z) {
        return a0 + a1 * x + (x > kinkA ? a2 : 0.0) + a3 * t + b * y + c * z;
    };
    spec.obstacle = [=](double t, double x) { return s0 + s1 * x + s2 * t + s3 * std::max(x - kinkS, 0.0); };
    spec.terminal = [=](double x) { return v0 + v1 * x + v2 * std::max(x - kinkV, 0.0); };
    spec.lipschitz = std::max(std::abs(b), std::abs(c));
    spec.penalty = intensity;
    return spec;
}

SwitchingCosts randomValidCosts(RandomStream& stream, std::size_t regimes) {
    const double base = uniformIn(stream, 0.05, 0.5);
    std::vector<std::vector<double>> matrix(regimes, std::vector<double>(regimes, 0.0));
    for (std::size_t i = 0; i < regimes; ++i)
        for (std::size_t j = 0; j < regimes; ++j)
            if (i != j) matrix[i][j] = base + uniformIn(stream, -0.25, 0.25) * base;
    return SwitchingCosts(std::move(matrix));
}

RandomSwitchingInstance randomSwitching(RandomStream& stream, std::size_t regimes, bool nonlinear) {
    std::vector<ProblemSpec> specs;
    for (std::size_t i = 0; i < regimes; ++i) specs.push_back(randomProblem(stream, nonlinear));
    return {std::move(specs), randomValidCosts(stream, regimes)};
}

ConstraintSet randomConstraintSet(RandomStream& stream) {
    switch (uniformIndex(stream, 4)) {
        case 0:
            return ConstraintSet::interval(uniformIn(stream, -1.0, 0.0), uniformIn(stream, 0.0, 1.0));
        case 1:
            return ConstraintSet::ball(uniformIn(stream, 0.0, 1.0));
        case 2:
            return ConstraintSet::singleton();
        default:
            return ConstraintSet::wholeLine();
    }
}

RandomSwitchingInstance twoRegimeInstance(double cost) {
    std::vector<ProblemSpec> specs{constantProblem(1.0, kInactiveObstacle, 0.0, 0.0),
                                   constantProblem(0.0, kInactiveObstacle, 0.0, 0.0)};
    return {std::move(specs), SwitchingCosts::uniform(2, cost)};
}

}  // namespace penbsde::harness
