#pragma once

#include "iqvi/common.hpp"

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace iqvi {

/// Default absolute tolerance for membership tests.
inline constexpr double kMembershipTol = 1e-9;

struct Ball {
    Vector center;
    double radius;
};

struct Box {
    Vector lower;
    Vector upper;
};

/// {x : <normal, x> <= offset}
struct Halfspace {
    Vector normal;
    double offset;
};

/// {x : x_i >= 0, sum x_i = scale}
struct Simplex {
    Eigen::Index dim;
    double scale;
};

/// One-dimensional box, kept distinct so it serializes under its own kind.
struct Interval {
    double lower;
    double upper;
};

enum class SetKind { ball, box, halfspace, simplex, interval };

std::string_view toString(SetKind kind);

/**
 * @brief A member of the closed catalog of nonempty closed convex sets.
 *
 * Values are immutable and validated at construction; every member has an
 * exact Euclidean projection.
 */
class ConvexSet {
public:
    using Variant = std::variant<Ball, Box, Halfspace, Simplex, Interval>;

    static ConvexSet ball(Vector center, double radius);
    static ConvexSet box(Vector lower, Vector upper);
    static ConvexSet halfspace(Vector normal, double offset);
    static ConvexSet simplex(Eigen::Index dim, double scale);
    static ConvexSet interval(double lower, double upper);

    [[nodiscard]] Eigen::Index dim() const;
    [[nodiscard]] SetKind kind() const;
    [[nodiscard]] const Variant& variant() const { return data_; }

    /// Nearest point of the set to `point`.
    [[nodiscard]] Vector project(const Vector& point) const;

    /// True iff the distance from `point` to the set is at most `tol`.
    [[nodiscard]] bool contains(const Vector& point, double tol = kMembershipTol) const;

    [[nodiscard]] double distance(const Vector& point) const;

    /**
     * @brief Deterministic sample of points in the set.
     *
     * At least ceil(count/4) of the points are boundary points obtained by
     * projecting exterior draws; the rest are interior draws. Unbounded sets
     * (halfspaces) are sampled in a unit-scale neighbourhood of the point of
     * the boundary closest to the origin.
     */
    [[nodiscard]] std::vector<Vector> sample(std::uint64_t seed, std::size_t count) const;

private:
    explicit ConvexSet(Variant data) : data_(std::move(data)) {}

    Variant data_;
};

/// Sort-and-threshold projection onto {x >= 0, sum x = scale}. Ties are broken by index.
Vector projectSimplex(const Vector& point, double scale);

}  // namespace iqvi
