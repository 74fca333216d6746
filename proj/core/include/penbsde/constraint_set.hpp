#pragma once

#include <limits>

namespace penbsde {

/// Closed convex subset of the line containing the origin.
class ConstraintSet {
public:
    enum class Kind { Interval, Ball, Singleton, WholeLine };

    /// [lower, upper]; throws InvalidParameter unless lower <= 0 <= upper.
    static ConstraintSet interval(double lower, double upper);
    /// Centred ball of the given radius (>= 0); on the line this is [-r, r].
    static ConstraintSet ball(double radius);
    static ConstraintSet singleton();
    static ConstraintSet wholeLine();

    Kind kind() const noexcept { return kind_; }
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

    bool contains(double z) const noexcept { return lower_ <= z && z <= upper_; }
    double project(double z) const noexcept;

private:
    ConstraintSet(Kind kind, double lower, double upper) : kind_(kind), lower_(lower), upper_(upper) {}

    Kind kind_;
    double lower_;
    double upper_;
};

/// inf over w in the set of |w - z|.
double distanceToSet(const ConstraintSet& set, double z) noexcept;

/// sup over z in the set of z * nu; +inf outside the barrier cone.
double supportFunction(const ConstraintSet& set, double nu) noexcept;

/// Whether the support function is finite at nu.
bool inBarrierCone(const ConstraintSet& set, double nu) noexcept;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace penbsde
