#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace penbsde {

struct SolveOptions {
    /// Keep every time step. When false only step 0 is kept, which is what
    /// very fine grids need (a 10^4-step lattice has 5*10^7 nodes).
    bool retainHistory = true;
};

/// Values indexed by lattice node (k, j), j = 0..k, k = 0..steps.
class NodeArray {
public:
    NodeArray() = default;
    NodeArray(std::size_t steps, bool retainHistory);

    std::size_t steps() const noexcept { return rows_.empty() ? 0 : rows_.size() - 1; }
    bool hasRow(std::size_t k) const noexcept { return k < rows_.size() && !rows_[k].empty(); }

    /// Throws std::out_of_range when step k was not retained.
    std::span<const double> row(std::size_t k) const;
    double operator()(std::size_t k, std::size_t j) const { return row(k)[j]; }

    /// Stores the row when the history policy keeps step k; otherwise a no-op.
    void storeRow(std::size_t k, std::span<const double> values);

private:
    bool retain_ = true;
    std::vector<std::vector<double>> rows_;
};

/// Adapted solution of a one-dimensional (penalized, reflected or constrained) scheme.
struct ValueField {
    ValueField() = default;
    ValueField(std::size_t steps, bool retainHistory);

    NodeArray y;
    NodeArray z;
    /// Obstacle push over step k: penalty lambda*(S-Y)^+*dt, or the reflection jump.
    NodeArray obstaclePush;
    /// Constraint push over step k: m*dist(Z)*dt (zero for unconstrained schemes).
    NodeArray constraintPush;
    /// Driver rate actually used at (k, j); the frozen rate process other solvers plug in.
    NodeArray rate;

    std::size_t steps() const noexcept { return y.steps(); }
    double root() const { return y(0, 0); }
};

struct RegimeValueField {
    std::vector<ValueField> regimes;

    std::size_t regimeCount() const noexcept { return regimes.size(); }
    double root(std::size_t regime) const { return regimes.at(regime).root(); }
};

/// Value of the stopping problem at the start of step k, split by whether
/// step k carries a Poisson arrival.
struct AugmentedValueField {
    AugmentedValueField() = default;
    AugmentedValueField(std::size_t steps, bool retainHistory)
        : continuation(steps, retainHistory), arrival(steps, retainHistory) {}

    /// No arrival at step k: stopping is not allowed now.
    NodeArray continuation;
    /// Arrival at step k: max of stopping now and continuing.
    NodeArray arrival;

    std::size_t steps() const noexcept { return continuation.steps(); }
    /// The initial time never allows stopping.
    double root() const { return continuation(0, 0); }
};

}  // namespace penbsde
