#include "iqvi/certification.hpp"

#include "iqvi/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace iqvi {

std::string_view toString(Verdict verdict) {
    switch (verdict) {
        case Verdict::certified: return "certified";
        case Verdict::refuted: return "refuted";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

SolutionCertificate certifySolution(const ProblemInstance& problem, const Vector& x, std::uint64_t seed,
                                    std::size_t samples, double tol) {
    if (samples < 16) throw InputError("certify_solution: at least 16 samples required");
    if (!(tol >= 0.0)) throw InputError("certify_solution: tol must be nonnegative");
    requireSameDim(problem.dim, x.size(), "certify_solution");

    const Vector fx = problem.f(x);
    const double gap = (fx - movingProject(problem.phi, x, fx)).norm();

    std::vector<Vector> points = problem.phi.sample(x, seed, samples);
    // <x, y> is minimized over Phi(x) in the limit of P_{Phi(x)}(f(x) - s x) as s grows.
    for (double s : {problem.alpha, 1.0, 10.0, 100.0, 1000.0}) {
        points.push_back(movingProject(problem.phi, x, fx - s * x));
    }

    double minInner = std::numeric_limits<double>::infinity();
    for (const auto& y : points) minInner = std::min(minInner, x.dot(y - fx));

    Verdict verdict = Verdict::inconclusive;
    if (gap <= tol && minInner >= -tol) {
        verdict = Verdict::certified;
    } else if (gap > 10.0 * tol || minInner < -10.0 * tol) {
        verdict = Verdict::refuted;
    }
    return SolutionCertificate{gap, minInner, points.size(), verdict};
}

namespace {

struct Grid {
    Eigen::Index dim;
    std::vector<long long> counts;
    std::vector<double> steps;
    Vector lower;
    Vector upper;

    [[nodiscard]] double coord(Eigen::Index axis, long long i) const {
        const auto a = static_cast<std::size_t>(axis);
        if (i == counts[a] - 1) return upper[axis];
        return lower[axis] + static_cast<double>(i) * steps[a];
    }
    [[nodiscard]] long long total() const {
        long long t = 1;
        for (auto c : counts) t *= c;
        return t;
    }
    [[nodiscard]] Vector point(long long flat) const {
        Vector p(dim);
        for (Eigen::Index a = 0; a < dim; ++a) {
            const auto c = counts[static_cast<std::size_t>(a)];
            p[a] = coord(a, flat % c);
            flat /= c;
        }
        return p;
    }
};

Grid makeGrid(const ProblemInstance& problem, const Vector& lower, const Vector& upper, double resolution) {
    if (problem.dim > 2) throw InputError("grid_oracle: only n <= 2 is supported");
    requireSameDim(problem.dim, lower.size(), "grid_oracle lower");
    requireSameDim(problem.dim, upper.size(), "grid_oracle upper");
    if (!(resolution > 0.0) || resolution > 1e-2) throw InputError("grid_oracle: resolution must lie in (0, 1e-2]");
    if (!(lower.array() < upper.array()).all()) throw InputError("grid_oracle: empty box");

    Grid g{problem.dim, {}, {}, lower, upper};
    for (Eigen::Index a = 0; a < problem.dim; ++a) {
        const double width = upper[a] - lower[a];
        const auto intervals = std::max<long long>(1, std::llround(std::ceil(width / resolution - 1e-9)));
        g.counts.push_back(intervals + 1);
        g.steps.push_back(width / static_cast<double>(intervals));
    }
    return g;
}

}  // namespace

GridOracleResult gridOracle(const ProblemInstance& problem, const Vector& lower, const Vector& upper,
                            double resolution) {
    const Grid grid = makeGrid(problem, lower, upper, resolution);
    GridOracleResult out{Vector(), std::numeric_limits<double>::infinity(), 0};
    const long long total = grid.total();
    for (long long k = 0; k < total; ++k) {
        const Vector p = grid.point(k);
        const double r = residual(problem, p);
        ++out.evaluations;
        if (r < out.residual_best) {
            out.residual_best = r;
            out.x_best = p;
        }
    }

    // Golden-section refinement per coordinate within one grid cell of the best point.
    constexpr double target = 1e-6;
    const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (Eigen::Index a = 0; a < grid.dim; ++a) {
            const double step = grid.steps[static_cast<std::size_t>(a)];
            double lo = std::max(lower[a], out.x_best[a] - step);
            double hi = std::min(upper[a], out.x_best[a] + step);
            Vector probe = out.x_best;
            auto eval = [&](double v) {
                probe[a] = v;
                ++out.evaluations;
                return residual(problem, probe);
            };
            double c = hi - invPhi * (hi - lo);
            double d = lo + invPhi * (hi - lo);
            double fc = eval(c);
            double fd = eval(d);
            while (hi - lo > target) {
                if (fc <= fd) {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - invPhi * (hi - lo);
                    fc = eval(c);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + invPhi * (hi - lo);
                    fd = eval(d);
                }
            }
            const double mid = 0.5 * (lo + hi);
            const double fm = eval(mid);
            if (fm < out.residual_best) {
                out.residual_best = fm;
                out.x_best[a] = mid;
            }
        }
    }
    return out;
}

std::size_t sublevelComponents(const ProblemInstance& problem, const Vector& lower, const Vector& upper,
                               double resolution, double level) {
    const Grid grid = makeGrid(problem, lower, upper, resolution);
    const long long total = grid.total();
    std::vector<char> inside(static_cast<std::size_t>(total), 0);
    for (long long k = 0; k < total; ++k) inside[static_cast<std::size_t>(k)] = residual(problem, grid.point(k)) <= level;

    std::vector<char> seen(inside.size(), 0);
    std::vector<long long> stack;
    std::size_t components = 0;
    const long long nx = grid.counts[0];
    for (long long k = 0; k < total; ++k) {
        if (!inside[static_cast<std::size_t>(k)] || seen[static_cast<std::size_t>(k)]) continue;
        ++components;
        stack.push_back(k);
        seen[static_cast<std::size_t>(k)] = 1;
        while (!stack.empty()) {
            const long long cur = stack.back();
            stack.pop_back();
            const long long ix = cur % nx;
            const long long iy = cur / nx;
            auto visit = [&](long long next) {
                const auto idx = static_cast<std::size_t>(next);
                if (inside[idx] && !seen[idx]) {
                    seen[idx] = 1;
                    stack.push_back(next);
                }
            };
            if (ix > 0) visit(cur - 1);
            if (ix + 1 < nx) visit(cur + 1);
            if (grid.dim == 2) {
                if (iy > 0) visit(cur - nx);
                if (iy + 1 < grid.counts[1]) visit(cur + nx);
            }
        }
    }
    return components;
}

bool projectionOracle(const ConvexSet& set, const Vector& point, std::uint64_t seed, std::size_t samples) {
    return projectionOracle(set, point, set.project(point), seed, samples);
}

bool projectionOracle(const ConvexSet& set, const Vector& point, const Vector& candidate, std::uint64_t seed,
                      std::size_t samples) {
    if (samples < 100) throw InputError("projection_oracle: at least 100 samples required");
    requireSameDim(set.dim(), point.size(), "projection_oracle point");
    requireSameDim(set.dim(), candidate.size(), "projection_oracle candidate");
    if (!set.contains(candidate, kMembershipTol)) return false;

    const Vector normal = point - candidate;
    const double best = normal.norm();
    for (const auto& y : set.sample(seed, samples)) {
        if (normal.dot(y - candidate) > 1e-9) return false;
        if ((point - y).norm() < best - 1e-12) return false;
    }
    return true;
}

KappaProbe kappaProbe(const MovingSet& phi, std::uint64_t seed, std::size_t triples, double spread) {
    if (triples == 0) throw InputError("kappa_probe: triples must be positive");
    Rng rng(seed);
    const Eigen::Index n = phi.dim();
    KappaProbe out{0.0, 0};
    for (std::size_t k = 0; k < triples; ++k) {
        const Vector x = spread * rng.normalVector(n);
        const Vector y = spread * rng.normalVector(n);
        const Vector z = spread * rng.normalVector(n);
        const double dxy = (x - y).norm();
        if (dxy == 0.0) continue;
        const double ratio = (movingProject(phi, x, z) - movingProject(phi, y, z)).norm() / dxy;
        out.kappa_emp = std::max(out.kappa_emp, ratio);
        ++out.triples_used;
    }
    return out;
}

}  // namespace iqvi
