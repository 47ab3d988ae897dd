#pragma once

#include "iqvi/common.hpp"
#include "iqvi/convex_sets.hpp"
#include "iqvi/problem_model.hpp"

#include <cstdint>
#include <string_view>

namespace iqvi {

enum class Verdict { certified, refuted, inconclusive };

std::string_view toString(Verdict verdict);

/**
 * Sampled check of f(x) in Phi(x) and <x, y - f(x)> >= 0 for y in Phi(x).
 * A "certified" verdict is only as strong as the sample: it means no sampled
 * point refuted the inequality.
 */
struct SolutionCertificate {
    double membership_gap;  ///< distance from f(x) to Phi(x)
    double min_inner;       ///< min over sampled y of <x, y - f(x)>
    std::size_t samples_used;
    Verdict verdict;
};

/// Requires samples >= 16. Boundary witnesses P_{Phi(x)}(f(x) - s x) are added to the random sample.
SolutionCertificate certifySolution(const ProblemInstance& problem, const Vector& x, std::uint64_t seed,
                                    std::size_t samples, double tol);

struct GridOracleResult {
    Vector x_best;
    double residual_best;
    std::size_t evaluations;
};

/**
 * Exhaustive grid minimization of the residual over a box (n <= 2), then
 * coordinate-wise bracketing refinement to 1e-6.
 */
GridOracleResult gridOracle(const ProblemInstance& problem, const Vector& lower, const Vector& upper,
                            double resolution);

/// Connected components (4-neighbour flood fill) of {residual <= level} on the grid.
std::size_t sublevelComponents(const ProblemInstance& problem, const Vector& lower, const Vector& upper,
                               double resolution, double level);

/// Checks z = project(set, point) against sampled points of the set.
bool projectionOracle(const ConvexSet& set, const Vector& point, std::uint64_t seed, std::size_t samples);

/// Same check for a caller-supplied candidate z (membership, variational inequality, no closer sample).
bool projectionOracle(const ConvexSet& set, const Vector& point, const Vector& candidate, std::uint64_t seed,
                      std::size_t samples);

struct KappaProbe {
    double kappa_emp;
    std::size_t triples_used;
};

/// max ||P_{Phi(x)}(z) - P_{Phi(y)}(z)|| / ||x - y|| over random triples; a lower bound on kappa.
KappaProbe kappaProbe(const MovingSet& phi, std::uint64_t seed, std::size_t triples, double spread = 5.0);

}  // namespace iqvi
