#include "iqvi/convex_sets.hpp"

#include "iqvi/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iqvi {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void requireFiniteParam(bool ok, const char* what) {
    if (!ok) throw InputError(what);
}

Vector projectBall(const Ball& b, const Vector& p) {
    const Vector d = p - b.center;
    const double norm = d.norm();
    if (norm <= b.radius) return p;
    return b.center + (b.radius / norm) * d;
}

Vector projectBox(const Vector& lo, const Vector& hi, const Vector& p) {
    return p.cwiseMax(lo).cwiseMin(hi);
}

Vector projectHalfspace(const Halfspace& h, const Vector& p) {
    const double excess = h.normal.dot(p) - h.offset;
    if (excess <= 0.0) return p;
    return p - (excess / h.normal.squaredNorm()) * h.normal;
}

}  // namespace

std::string_view toString(SetKind kind) {
    switch (kind) {
        case SetKind::ball: return "ball";
        case SetKind::box: return "box";
        case SetKind::halfspace: return "halfspace";
        case SetKind::simplex: return "simplex";
        case SetKind::interval: return "interval";
    }
    return "unknown";
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
    requireFiniteParam(center.size() > 0, "ball: empty center");
    requireFiniteParam(center.allFinite(), "ball: non-finite center");
    requireFiniteParam(std::isfinite(radius) && radius > 0.0, "ball: radius must be positive");
    return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
    requireFiniteParam(lower.size() > 0, "box: empty bounds");
    requireSameDim(lower.size(), upper.size(), "box");
    requireFiniteParam(lower.allFinite() && upper.allFinite(), "box: non-finite bounds");
    requireFiniteParam((lower.array() <= upper.array()).all(), "box: lower must not exceed upper");
    return ConvexSet(Box{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
    requireFiniteParam(normal.size() > 0, "halfspace: empty normal");
    requireFiniteParam(normal.allFinite() && std::isfinite(offset), "halfspace: non-finite parameters");
    requireFiniteParam(normal.squaredNorm() > 0.0, "halfspace: normal must be nonzero");
    return ConvexSet(Halfspace{std::move(normal), offset});
}

ConvexSet ConvexSet::simplex(Eigen::Index dim, double scale) {
    requireFiniteParam(dim > 0, "simplex: dimension must be positive");
    requireFiniteParam(std::isfinite(scale) && scale > 0.0, "simplex: scale must be positive");
    return ConvexSet(Simplex{dim, scale});
}

ConvexSet ConvexSet::interval(double lower, double upper) {
    requireFiniteParam(std::isfinite(lower) && std::isfinite(upper), "interval: non-finite bounds");
    requireFiniteParam(lower <= upper, "interval: lower must not exceed upper");
    return ConvexSet(Interval{lower, upper});
}

Eigen::Index ConvexSet::dim() const {
    return std::visit(Overloaded{
                          [](const Ball& b) { return b.center.size(); },
                          [](const Box& b) { return b.lower.size(); },
                          [](const Halfspace& h) { return h.normal.size(); },
                          [](const Simplex& s) { return s.dim; },
                          [](const Interval&) { return Eigen::Index{1}; },
                      },
                      data_);
}

SetKind ConvexSet::kind() const {
    return static_cast<SetKind>(data_.index());
}

Vector ConvexSet::project(const Vector& point) const {
    requireSameDim(dim(), point.size(), "project");
    return std::visit(Overloaded{
                          [&](const Ball& b) { return projectBall(b, point); },
                          [&](const Box& b) { return projectBox(b.lower, b.upper, point); },
                          [&](const Halfspace& h) { return projectHalfspace(h, point); },
                          [&](const Simplex& s) { return projectSimplex(point, s.scale); },
                          [&](const Interval& iv) {
                              Vector out(1);
                              out[0] = std::clamp(point[0], iv.lower, iv.upper);
                              return out;
                          },
                      },
                      data_);
}

double ConvexSet::distance(const Vector& point) const {
    return (point - project(point)).norm();
}

bool ConvexSet::contains(const Vector& point, double tol) const {
    if (tol < 0.0) throw InputError("contains: tolerance must be nonnegative");
    return distance(point) <= tol;
}

std::vector<Vector> ConvexSet::sample(std::uint64_t seed, std::size_t count) const {
    if (count == 0) throw InputError("sample: count must be positive");
    Rng rng(seed);
    const Eigen::Index n = dim();
    const std::size_t boundary = (count + 3) / 4;
    const std::size_t interior = count - boundary;

    std::vector<Vector> out;
    out.reserve(count);

    auto interiorDraw = [&]() -> Vector {
        return std::visit(
            Overloaded{
                [&](const Ball& b) -> Vector {
                    const double r = b.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
                    return b.center + r * rng.direction(n);
                },
                [&](const Box& b) -> Vector {
                    Vector v(n);
                    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(b.lower[i], b.upper[i]);
                    return v;
                },
                [&](const Halfspace& h) -> Vector {
                    const Vector anchor = (h.offset / h.normal.squaredNorm()) * h.normal;
                    Vector v = anchor + rng.normalVector(n);
                    const double excess = h.normal.dot(v) - h.offset;
                    if (excess > 0.0) v -= (2.0 * excess / h.normal.squaredNorm()) * h.normal;
                    return projectHalfspace(h, v);
                },
                [&](const Simplex& s) -> Vector {
                    Vector v(n);
                    for (Eigen::Index i = 0; i < n; ++i) v[i] = -std::log(rng.uniform01());
                    v *= s.scale / v.sum();
                    return projectSimplex(v, s.scale);
                },
                [&](const Interval& iv) -> Vector {
                    Vector v(1);
                    v[0] = rng.uniform(iv.lower, iv.upper);
                    return v;
                },
            },
            data_);
    };

    auto exteriorDraw = [&]() -> Vector {
        return std::visit(
            Overloaded{
                [&](const Ball& b) -> Vector {
                    return b.center + b.radius * (1.5 + rng.uniform01()) * rng.direction(n);
                },
                [&](const Box& b) -> Vector {
                    const Vector width = b.upper - b.lower;
                    Vector v(n);
                    for (Eigen::Index i = 0; i < n; ++i) {
                        v[i] = rng.uniform(b.lower[i] - 0.5 * width[i], b.upper[i] + 0.5 * width[i]);
                    }
                    const auto j = static_cast<Eigen::Index>(rng.uniform01() * static_cast<double>(n));
                    const double push = (width[j] + 1.0) * (0.5 + rng.uniform01());
                    v[j] = rng.uniform01() < 0.5 ? b.lower[j] - push : b.upper[j] + push;
                    return v;
                },
                [&](const Halfspace& h) -> Vector {
                    const double norm = h.normal.norm();
                    const Vector unit = h.normal / norm;
                    const Vector anchor = (h.offset / (norm * norm)) * h.normal;
                    Vector g = rng.normalVector(n);
                    g -= g.dot(unit) * unit;
                    return anchor + g + (0.5 + rng.uniform01()) * unit;
                },
                [&](const Simplex& s) -> Vector {
                    Vector v = rng.normalVector(n) * s.scale;
                    v.array() += s.scale / static_cast<double>(n);
                    return v;
                },
                [&](const Interval& iv) -> Vector {
                    Vector v(1);
                    const double push = (iv.upper - iv.lower + 1.0) * (0.5 + rng.uniform01());
                    v[0] = rng.uniform01() < 0.5 ? iv.lower - push : iv.upper + push;
                    return v;
                },
            },
            data_);
    };

    for (std::size_t i = 0; i < interior; ++i) out.push_back(interiorDraw());
    for (std::size_t i = 0; i < boundary; ++i) out.push_back(project(exteriorDraw()));
    return out;
}

Vector projectSimplex(const Vector& point, double scale) {
    const Eigen::Index n = point.size();
    if (n == 0) throw InputError("projectSimplex: empty point");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return point[a] > point[b]; });

    double cumulative = 0.0;
    double threshold = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumulative += point[order[static_cast<std::size_t>(k)]];
        const double candidate = (cumulative - scale) / static_cast<double>(k + 1);
        if (point[order[static_cast<std::size_t>(k)]] - candidate > 0.0) threshold = candidate;
    }
    return (point.array() - threshold).max(0.0).matrix();
}

}  // namespace iqvi
