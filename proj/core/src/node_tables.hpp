#pragma once

// Problem data tabulated on the lattice nodes. Internal to the solvers.

#include <cmath>
#include <vector>

#include "penbsde/model.hpp"
#include "penbsde/value_field.hpp"

namespace penbsde::detail {

struct NodeTables {
    std::vector<std::vector<double>> obstacle;  // S(t_k, x), steps 0..K-1
    std::vector<std::vector<double>> rate;      // frozen driver rate, steps 0..K-1
    std::vector<double> terminal;               // xi on step K

    NodeTables(const Lattice& lattice, const ProblemSpec& spec, const ValueField* plugIn) {
        const std::size_t K = lattice.steps();
        obstacle.resize(K);
        rate.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            obstacle[k].resize(k + 1);
            rate[k].resize(k + 1);
            const double t = lattice.time(k);
            for (std::size_t j = 0; j <= k; ++j) {
                const double x = lattice.level(k, j);
                obstacle[k][j] = spec.obstacle ? spec.obstacle(t, x) : kInactiveObstacle;
                if (plugIn != nullptr) {
                    rate[k][j] = plugIn->rate(k, j);
                } else {
                    rate[k][j] = spec.driver(t, x, 0.0, 0.0);
                    if (!std::isfinite(rate[k][j]))
                        throw NumericDomainError(k, j, "driver returned a non-finite value");
                }
            }
        }
        terminal.resize(K + 1);
        for (std::size_t j = 0; j <= K; ++j) terminal[j] = spec.terminal(lattice.level(K, j));
    }
};

inline void checkPlugIn(const Lattice& lattice, const ValueField* plugIn) {
    if (plugIn == nullptr) return;
    if (plugIn->steps() != lattice.steps())
        throw InvalidParameter("plug-in field and lattice have different step counts");
    for (std::size_t k = 0; k < lattice.steps(); ++k)
        if (!plugIn->rate.hasRow(k)) throw InvalidParameter("plug-in field must retain its full history");
}

inline void checkOverlayMatches(const Lattice& lattice, const ArrivalOverlay& overlay) {
    if (overlay.steps() != lattice.steps())
        throw InvalidParameter("arrival overlay and lattice have different step counts");
    const double p = overlay.stepProbability();
    if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("arrival probability must lie in [0, 1)");
}

}  // namespace penbsde::detail
