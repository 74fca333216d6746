#include "penbsde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace penbsde::reference {

double binomialAmericanPut(double spot, double strike, double up, double down, std::size_t steps,
                           double growth) {
    if (!(down > 0.0 && down < growth && growth < up))
        throw InvalidParameter("binomial factors need 0 < d < g < u");
    const double q = (growth - down) / (up - down);
    std::vector<double> value(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double price = spot * std::pow(up, static_cast<double>(i)) *
                             std::pow(down, static_cast<double>(steps - i));
        value[i] = std::max(strike - price, 0.0);
    }
    for (std::size_t n = steps; n-- > 0;) {
        for (std::size_t i = 0; i <= n; ++i) {
            const double price =
                spot * std::pow(up, static_cast<double>(i)) * std::pow(down, static_cast<double>(n - i));
            const double hold = (q * value[i + 1] + (1.0 - q) * value[i]) / growth;
            value[i] = std::max(strike - price, hold);
        }
    }
    return value[0];
}

namespace {

void checkRate(const AmericanPut& option, double dt) {
    if (!(option.rate >= 0.0) || !(option.rate * dt < 1.0))
        throw InvalidParameter("put rate must satisfy 0 <= r dt < 1");
}

double driftPerStep(const AmericanPut& option, double dt) {
    checkRate(option, dt);
    return std::log(std::cosh(option.volatility * std::sqrt(dt))) + std::log1p(-option.rate * dt);
}

}  // namespace

double latticeGrowth(const AmericanPut& option, double dt) {
    checkRate(option, dt);
    return 1.0 / (1.0 - option.rate * dt);
}

double latticeUpFactor(const AmericanPut& option, double dt) {
    return std::exp(option.volatility * std::sqrt(dt) - driftPerStep(option, dt));
}

double latticeDownFactor(const AmericanPut& option, double dt) {
    return std::exp(-option.volatility * std::sqrt(dt) - driftPerStep(option, dt));
}

double americanPutOracle(const AmericanPut& option, std::size_t steps) {
    const double dt = option.horizon / static_cast<double>(steps);
    return binomialAmericanPut(option.spot, option.strike, latticeUpFactor(option, dt),
                               latticeDownFactor(option, dt), steps,
                               latticeGrowth(option, dt));
}

ProblemSpec americanPutProblem(const AmericanPut& option, const TimeGrid& grid) {
    const double dt = grid.dt();
    const double start = grid.start();
    const double drift = driftPerStep(option, dt) / dt;
    const auto price = [option, drift, start](double t, double x) {
        return option.spot * std::exp(option.volatility * x - drift * (t - start));
    };
    const double horizon = grid.horizon();
    ProblemSpec spec;
    const double rate = option.rate;
    if (rate == 0.0)
        spec.driver = zeroDriver();
    else
        spec.driver = [rate](double, double, double y, double) { return -rate * y; };
    spec.obstacle = [option, price](double t, double x) { return std::max(option.strike - price(t, x), 0.0); };
    spec.terminal = [option, price, horizon](double x) {
        return std::max(option.strike - price(horizon, x), 0.0);
    };
    return spec;
}

double penalizedOdeRoot(double rate, double obstacle, double terminal, double intensity, double horizon,
                        std::size_t steps) {
    if (steps == 0) throw InvalidParameter("ODE step count must be positive");
    // In reversed time s = T - t: dy/ds = f + lambda (S - y)^+.
    const auto slope = [&](double y) { return rate + intensity * std::max(0.0, obstacle - y); };
    const double h = horizon / static_cast<double>(steps);
    double y = terminal;
    for (std::size_t n = 0; n < steps; ++n) {
        const double k1 = slope(y);
        const double k2 = slope(y + 0.5 * h * k1);
        const double k3 = slope(y + 0.5 * h * k2);
        const double k4 = slope(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

std::vector<double> switchingOdeRoots(const std::vector<double>& rates, const std::vector<double>& terminals,
                                      const SwitchingCosts& costs, double intensity, double horizon,
                                      std::size_t steps) {
    const std::size_t d = rates.size();
    if (terminals.size() != d || costs.regimes() != d) throw InvalidParameter("regime data sizes disagree");
    if (steps == 0) throw InvalidParameter("ODE step count must be positive");
    const auto slope = [&](const std::vector<double>& y) {
        std::vector<double> out(d);
        for (std::size_t i = 0; i < d; ++i) {
            double target = -std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < d; ++l)
                if (l != i) target = std::max(target, y[l] - costs(i, l));
            out[i] = rates[i] + (d > 1 ? intensity * std::max(0.0, target - y[i]) : 0.0);
        }
        return out;
    };
    const auto shifted = [d](const std::vector<double>& y, const std::vector<double>& k, double h) {
        std::vector<double> out(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = y[i] + h * k[i];
        return out;
    };
    const double h = horizon / static_cast<double>(steps);
    std::vector<double> y = terminals;
    for (std::size_t n = 0; n < steps; ++n) {
        const auto k1 = slope(y);
        const auto k2 = slope(shifted(y, k1, 0.5 * h));
        const auto k3 = slope(shifted(y, k2, 0.5 * h));
        const auto k4 = slope(shifted(y, k3, h));
        for (std::size_t i = 0; i < d; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

}  // namespace penbsde::reference
