#pragma once

// Randomized stopping: a bang-bang stopping intensity r(k, j) in {0, lambda}.
// Over one step the path stops with probability q = r dt / (1 + r dt), paying
// the obstacle, and otherwise accrues the driver rate; this per-step discount
// 1 / (1 + r dt) is what makes the forward payoff equal the implicit backward
// recursion exactly.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "penbsde/model.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/value_field.hpp"

namespace penbsde {

class IntensityPolicy {
public:
    static IntensityPolicy none(std::size_t steps, double intensity);
    static IntensityPolicy full(std::size_t steps, double intensity);
    static IntensityPolicy fromPredicate(std::size_t steps, double intensity,
                                         const std::function<bool(std::size_t, std::size_t)>& active);

    std::size_t steps() const noexcept { return active_.size(); }
    double intensity() const noexcept { return intensity_; }
    bool active(std::size_t k, std::size_t j) const { return active_.at(k).at(j) != 0; }
    /// 0 or lambda.
    double rate(std::size_t k, std::size_t j) const { return active(k, j) ? intensity_ : 0.0; }
    void setActive(std::size_t k, std::size_t j, bool on) { active_.at(k).at(j) = on ? 1 : 0; }

private:
    double intensity_ = 0.0;
    std::vector<std::vector<char>> active_;
};

/// Forward payoff sum_k m_k (q S + (1-q) f dt) + sum m_K xi over the lattice, where
/// the surviving mass m carries the factor 1 / (1 + r dt) per step. Driver rates
/// are frozen: plugIn->rate when given, else f(t, x, 0, 0).
double randomizedStoppingPayoff(const Lattice& lattice, const ProblemSpec& spec, const IntensityPolicy& policy,
                                const ValueField* plugIn = nullptr);

/// Y = (E + f dt + r dt S) / (1 + r dt). Without a plug-in the driver is evaluated at
/// the field's own (E, Z); obstaclePush holds r (S - Y) dt.
ValueField controlledLinearBSDE(const Lattice& lattice, const ProblemSpec& spec, const IntensityPolicy& policy,
                                const ValueField* plugIn = nullptr, SolveOptions options = {});

struct OptimalControl {
    ValueField field;
    /// r* = lambda 1{Y <= S}; left empty (zero steps) when history is not retained.
    IntensityPolicy policy;
};

/// Node-wise maximum over r in {0, lambda} inside the recursion; equals the implicit penalized field.
OptimalControl optimalControlValue(const Lattice& lattice, const ProblemSpec& spec, SolveOptions options = {});

/// Maximum root over every bang-bang node policy. Refuses beyond 4 steps.
double bruteForceControlOracle(const Lattice& lattice, const ProblemSpec& spec);

struct ControlLimitEntry {
    double intensity;
    double root;
    double gap;  // reflected root - root
};

struct ControlLimitReport {
    double reflectedRoot = 0.0;
    std::vector<ControlLimitEntry> entries;

    bool rootsNondecreasing(double tolerance = 1e-10) const;
    bool gapsNonincreasing(double tolerance = 1e-12) const;
};

/// Optimal control roots along an increasing intensity list against the reflected root.
ControlLimitReport reflectedControlLimit(const Lattice& lattice, const ProblemSpec& spec,
                                         std::span<const double> intensities);

/// Monte Carlo of randomized stopping: at each step k < K stop with probability
/// r dt / (1 + r dt) and collect S, else accrue the rate and move on.
MonteCarloEstimate simulateRandomizedStopping(const Lattice& lattice, const ProblemSpec& spec,
                                              const IntensityPolicy& policy, std::size_t paths,
                                              RandomStream& stream, const ValueField* plugIn = nullptr);

}  // namespace penbsde
