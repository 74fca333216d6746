#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace penbsde {

/// Constant-in-time switching cost matrix C(i, j), regimes indexed from 0.
class SwitchingCosts {
public:
    /// Throws InvalidParameter if the matrix is empty or not square.
    explicit SwitchingCosts(std::vector<std::vector<double>> matrix);

    /// Zero diagonal, `cost` everywhere else.
    static SwitchingCosts uniform(std::size_t regimes, double cost);

    std::size_t regimes() const noexcept { return matrix_.size(); }
    double operator()(std::size_t from, std::size_t to) const { return matrix_.at(from).at(to); }

private:
    std::vector<std::vector<double>> matrix_;
};

struct CostViolation {
    enum class Kind { Diagonal, NonPositive, Triangle };

    Kind kind;
    std::size_t i;
    std::size_t j;
    std::size_t l;  // only meaningful for Triangle
    double margin;  // offending value (diagonal entry, cost, or triangle slack)

    std::string describe() const;
};

/// Checks C(i,i) = 0, C(i,j) > 0 for i != j and the strict triangle margin
/// C(i,j) + C(j,l) - C(i,l) > 0 for pairwise distinct i, j, l. Returns every
/// violation in index order; empty means the costs are valid.
std::vector<CostViolation> validateSwitchingCosts(const SwitchingCosts& costs);

struct ImpulseResult {
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    double value;        // -inf when there is no other regime
    std::size_t target;  // argmax, lowest index on ties; kNone with a single regime
};

/// max over j != regime of (values[j] - C(regime, j)).
ImpulseResult impulseValue(std::span<const double> values, const SwitchingCosts& costs, std::size_t regime);

}  // namespace penbsde
