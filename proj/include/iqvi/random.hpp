#pragma once

#include "iqvi/common.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace iqvi {

/**
 * @brief Seeded generator with platform-independent output.
 *
 * std::mt19937_64 is fully specified by the standard, but the standard
 * distributions are not; the transforms below are written out so that a
 * fixed seed yields the same doubles with every standard library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on the open interval (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        // Box-Muller, one variate per call.
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Vector normalVector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Vector uniformVector(Eigen::Index n, double lo, double hi) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Uniform direction on the unit sphere.
    Vector direction(Eigen::Index n) {
        for (;;) {
            Vector v = normalVector(n);
            const double norm = v.norm();
            if (norm > 1e-12) return v / norm;
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace iqvi
