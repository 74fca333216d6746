#include "penbsde/model.hpp"

#include <string>

namespace penbsde {

TimeGrid::TimeGrid(double start, double horizon, std::size_t steps)
    : start_(start), horizon_(horizon), steps_(steps), dt_(0.0) {
    if (steps == 0) throw InvalidGrid("time grid needs at least one step");
    if (!(start < horizon) || !std::isfinite(start) || !std::isfinite(horizon))
        throw InvalidGrid("time grid needs a finite start strictly before the horizon");
    dt_ = (horizon - start) / static_cast<double>(steps);
}

Lattice::Lattice(TimeGrid grid, double origin)
    : grid_(grid), origin_(origin), sqrt_dt_(std::sqrt(grid.dt())) {}

std::vector<double> Lattice::marginalWeights(std::size_t k) const {
    std::vector<double> w{1.0};
    for (std::size_t step = 0; step < k; ++step) {
        std::vector<double> next(w.size() + 1, 0.0);
        for (std::size_t j = 0; j < w.size(); ++j) {
            next[j] += kBranchProbability * w[j];
            next[j + 1] += kBranchProbability * w[j];
        }
        w = std::move(next);
    }
    return w;
}

Lattice buildLattice(const TimeGrid& grid) { return Lattice(grid); }

PoissonClock samplePoissonClock(double intensity, double start, double horizon, RandomStream& stream) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw InvalidParameter("Poisson intensity must be finite and nonnegative");
    if (!(start < horizon)) throw InvalidParameter("Poisson clock needs start < horizon");

    PoissonClock clock;
    clock.intensity = intensity;
    clock.start = start;
    clock.horizon = horizon;
    if (intensity == 0.0) return clock;

    double t = start;
    for (;;) {
        double gap = stream.exponential(intensity);
        // A zero gap can only come from rounding at huge t; redraw to keep arrivals strictly increasing.
        while (t + gap <= t) gap = stream.exponential(intensity);
        t += gap;
        if (t >= horizon) {
            clock.firstAfterHorizon = t;
            return clock;
        }
        clock.arrivals.push_back(t);
    }
}

double arrivalStepProbability(double intensity, double dt) {
    if (!(intensity >= 0.0)) throw InvalidParameter("Poisson intensity must be nonnegative");
    if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
    return -std::expm1(-intensity * dt);
}

ArrivalOverlay::ArrivalOverlay(std::size_t steps, double intensity, double probability)
    : steps_(steps), intensity_(intensity), probability_(probability) {}

ArrivalOverlay::ArrivalOverlay(const TimeGrid& grid, double intensity)
    : ArrivalOverlay(grid.steps(), intensity, arrivalStepProbability(intensity, grid.dt())) {
    if (!(probability_ < 1.0))
        throw InvalidParameter("arrival probability per step rounds to 1; refine the grid");
}

ArrivalOverlay ArrivalOverlay::withStepProbability(const TimeGrid& grid, double probability) {
    if (!(probability >= 0.0 && probability < 1.0))
        throw InvalidParameter("arrival probability per step must lie in [0, 1), got " +
                               std::to_string(probability));
    const double intensity = -std::log1p(-probability) / grid.dt();
    return ArrivalOverlay(grid.steps(), intensity, probability);
}

Driver zeroDriver() {
    return [](double, double, double, double) { return 0.0; };
}

Driver constantDriver(double rate) {
    return [rate](double, double, double, double) { return rate; };
}

Obstacle constantObstacle(double level) {
    return [level](double, double) { return level; };
}

Terminal constantTerminal(double value) {
    return [value](double) { return value; };
}

}  // namespace penbsde
