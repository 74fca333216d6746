#pragma once

// Independent reference routines used to cross-check the lattice solvers.
// None of them calls into the solvers.

#include <cstddef>
#include <vector>

#include "penbsde/model.hpp"
#include "penbsde/switching_costs.hpp"

namespace penbsde::reference {

/// Put on a geometric price s0 exp(sigma W_t - c t) with the value discounted by
/// 1 - r dt per step. c is chosen so the discounted price is a martingale on the
/// symmetric lattice. With rate 0 early exercise is never optimal.
struct AmericanPut {
    double spot = 100.0;
    double strike = 100.0;
    double volatility = 0.2;
    double horizon = 1.0;
    double rate = 0.0;
};

/// Binomial American put: up/down factors u, d and growth g per step,
/// risk-neutral weight q = (g - d) / (u - d), continuation discounted by 1 / g,
/// exercise allowed at every step.
double binomialAmericanPut(double spot, double strike, double up, double down, std::size_t steps,
                           double growth = 1.0);

/// Per-step growth 1 / (1 - r dt).
double latticeGrowth(const AmericanPut& option, double dt);

/// Up/down factors of the lattice price over one step of length dt.
double latticeUpFactor(const AmericanPut& option, double dt);
double latticeDownFactor(const AmericanPut& option, double dt);

/// Binomial value on the same price tree as americanPutProblem.
double americanPutOracle(const AmericanPut& option, std::size_t steps);

/// f = -r y, obstacle = (K - price)^+, terminal = (K - price(T))^+ on the given grid.
ProblemSpec americanPutProblem(const AmericanPut& option, const TimeGrid& grid);

/// y' = -f - lambda (S - y)^+, y(T) = xi for constant data, integrated backward by RK4.
double penalizedOdeRoot(double rate, double obstacle, double terminal, double intensity, double horizon,
                        std::size_t steps);

/// y_i' = -f_i - lambda (max_{l != i}(y_l - C(i,l)) - y_i)^+, y_i(T) = xi_i, by RK4.
std::vector<double> switchingOdeRoots(const std::vector<double>& rates, const std::vector<double>& terminals,
                                      const SwitchingCosts& costs, double intensity, double horizon,
                                      std::size_t steps);

}  // namespace penbsde::reference
