#pragma once

#include <cmath>
#include <vector>

#include "penbsde/model.hpp"
#include "penbsde/switching_costs.hpp"

namespace testing_support {

/// Small nonlinear instance shared with tests/oracles/oracle.py.
inline penbsde::ProblemSpec probeProblem(double intensity = 2.0) {
    penbsde::ProblemSpec spec;
    spec.driver = [](double t, double x, double y, double z) {
        return 0.3 - 0.2 * y + 0.1 * z + 0.5 * (x > 0.0 ? 1.0 : 0.0) + 0.1 * t;
    };
    spec.obstacle = [](double t, double x) { return 0.4 - 0.3 * x + 0.1 * t; };
    spec.terminal = [](double x) { return std::max(x, 0.0) - 0.1; };
    spec.lipschitz = 0.2;
    spec.penalty = intensity;
    return spec;
}

inline penbsde::ProblemSpec probeSecondRegime() {
    penbsde::ProblemSpec spec;
    spec.driver = [](double, double x, double, double) { return 0.2 - 0.1 * x; };
    spec.obstacle = penbsde::constantObstacle(penbsde::kInactiveObstacle);
    spec.terminal = [](double x) { return 0.1 * x; };
    return spec;
}

inline std::vector<penbsde::ProblemSpec> probeRegimes() {
    std::vector<penbsde::ProblemSpec> regimes{probeProblem(), probeSecondRegime()};
    regimes[0].obstacle = penbsde::constantObstacle(penbsde::kInactiveObstacle);
    return regimes;
}

inline penbsde::SwitchingCosts probeCosts() { return penbsde::SwitchingCosts({{0.0, 0.1}, {0.15, 0.0}}); }

inline penbsde::Lattice unitLattice(std::size_t steps) { return penbsde::Lattice(penbsde::TimeGrid(0.0, 1.0, steps)); }

}  // namespace testing_support
