#pragma once

// Discrete probability space shared by every solver: a uniform time grid, the
// recombining Brownian lattice, the Poisson clock (sampled and lattice
// overlay), and the problem data (driver, obstacle, terminal payoff).

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "penbsde/errors.hpp"
#include "penbsde/random_stream.hpp"

namespace penbsde {

class TimeGrid {
public:
    /// Throws InvalidGrid unless start < horizon and steps > 0.
    TimeGrid(double start, double horizon, std::size_t steps);

    double start() const noexcept { return start_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }

    // Computed directly, never by accumulation.
    double time(std::size_t k) const noexcept { return start_ + static_cast<double>(k) * dt_; }

private:
    double start_;
    double horizon_;
    std::size_t steps_;
    double dt_;
};

/// Symmetric random-walk lattice for a one-dimensional Brownian motion.
///
/// Node (k, j), j = 0..k, sits at level origin + (2j - k) sqrt(dt). Its
/// successors are (k+1, j) (down) and (k+1, j+1) (up), each with probability 1/2.
class Lattice {
public:
    explicit Lattice(TimeGrid grid, double origin = 0.0);

    static constexpr double kBranchProbability = 0.5;

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t steps() const noexcept { return grid_.steps(); }
    double dt() const noexcept { return grid_.dt(); }
    double sqrtDt() const noexcept { return sqrt_dt_; }
    double origin() const noexcept { return origin_; }
    double time(std::size_t k) const noexcept { return grid_.time(k); }
    std::size_t nodes(std::size_t k) const noexcept { return k + 1; }

    double level(std::size_t k, std::size_t j) const noexcept {
        return origin_ + (2.0 * static_cast<double>(j) - static_cast<double>(k)) * sqrt_dt_;
    }

    /// Probability of reaching each node of step k from the root.
    std::vector<double> marginalWeights(std::size_t k) const;

private:
    TimeGrid grid_;
    double origin_;
    double sqrt_dt_;
};

Lattice buildLattice(const TimeGrid& grid);

/// One-step expectation from node (k, j) given the values on step k+1.
inline double conditionalExpectation(std::span<const double> next, std::size_t j) noexcept {
    return 0.5 * (next[j + 1] + next[j]);
}

inline double conditionalExpectation(double up, double down) noexcept {
    return 0.5 * (up + down);
}

/// E[v dW] / dt from node (k, j): the discrete integrand against the walk.
inline double martingaleCoefficient(std::span<const double> next, std::size_t j, double dt) noexcept {
    return (next[j + 1] - next[j]) / (2.0 * std::sqrt(dt));
}

inline double martingaleCoefficient(double up, double down, double dt) noexcept {
    return (up - down) / (2.0 * std::sqrt(dt));
}

struct PoissonClock {
    double intensity = 0.0;
    double start = 0.0;
    double horizon = 0.0;
    /// T_1 < ... < T_M, the arrivals strictly before the horizon.
    std::vector<double> arrivals;
    /// T_{M+1}: first arrival at or after the horizon (+inf when intensity is 0).
    double firstAfterHorizon = std::numeric_limits<double>::infinity();

    std::size_t countBeforeHorizon() const noexcept { return arrivals.size(); }
};

/// Exponential inter-arrival sampling from `start`. Throws InvalidParameter on
/// negative intensity or start >= horizon.
PoissonClock samplePoissonClock(double intensity, double start, double horizon, RandomStream& stream);

/// 1 - exp(-intensity dt), computed without cancellation.
double arrivalStepProbability(double intensity, double dt);

/// Poisson clock discretized on the grid: at most one arrival per step, each
/// step's arrival flag independent of the walk and of the other steps.
class ArrivalOverlay {
public:
    ArrivalOverlay(const TimeGrid& grid, double intensity);

    /// Overlay with an explicit per-step probability; throws InvalidParameter
    /// unless 0 <= probability < 1.
    static ArrivalOverlay withStepProbability(const TimeGrid& grid, double probability);

    double intensity() const noexcept { return intensity_; }
    double stepProbability() const noexcept { return probability_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    ArrivalOverlay(std::size_t steps, double intensity, double probability);

    std::size_t steps_;
    double intensity_;
    double probability_;
};

using Driver = std::function<double(double t, double x, double y, double z)>;
using Obstacle = std::function<double(double t, double x)>;
using Terminal = std::function<double(double x)>;

/// Obstacle level used to switch reflection off.
inline constexpr double kInactiveObstacle = -1e9;

/// Data of one penalized / reflected problem.
///
/// The driver may depend on the Brownian level x as well as on (y, z); it must
/// be Lipschitz in (y, z) with constant `lipschitz`.
struct ProblemSpec {
    Driver driver;
    Obstacle obstacle;
    Terminal terminal;
    double lipschitz = 0.0;
    double penalty = 0.0;

    double obstacleAt(const Lattice& lattice, std::size_t k, std::size_t j) const {
        return obstacle(lattice.time(k), lattice.level(k, j));
    }
};

Driver zeroDriver();
Driver constantDriver(double rate);
Obstacle constantObstacle(double level);
Terminal constantTerminal(double value);

}  // namespace penbsde
