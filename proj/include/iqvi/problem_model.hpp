#pragma once

#include "iqvi/common.hpp"
#include "iqvi/convex_sets.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace iqvi {

// ---------------------------------------------------------------------------
// Mappings
// ---------------------------------------------------------------------------

/// x -> M x + q
struct Affine {
    Matrix matrix;
    Vector shift;
};

/// x -> factor * x
struct ScaledIdentity {
    Eigen::Index dim;
    double factor;
};

/// Named scalar functions applied coordinate by coordinate.
enum class ScalarFunction {
    identity,          ///< x
    inv_one_plus_abs,  ///< 1 / (1 + |x|)
    tanh,              ///< tanh(x)
    atan,              ///< atan(x)
    sin,               ///< sin(x)
};

std::string_view toString(ScalarFunction fn);
std::optional<ScalarFunction> scalarFunctionFromString(std::string_view name);

struct Componentwise {
    std::vector<ScalarFunction> functions;
};

/**
 * @brief Single-valued map R^n -> R^n with its Lipschitz constant and,
 * when it exists, its strong monotonicity modulus.
 *
 * Constants are computed exactly from the catalog member at construction.
 * A caller may declare looser constants (larger L, smaller beta); tighter
 * declarations are rejected.
 */
class Mapping {
public:
    using Variant = std::variant<Affine, ScaledIdentity, Componentwise>;

    static Mapping affine(Matrix matrix, Vector shift);
    static Mapping scaledIdentity(Eigen::Index dim, double factor);
    static Mapping componentwise(std::vector<ScalarFunction> functions);

    /// Replaces the computed constants with caller-declared ones after a consistency check.
    [[nodiscard]] Mapping withDeclaredConstants(std::optional<double> lipschitz,
                                                std::optional<double> monotonicity) const;

    [[nodiscard]] Vector operator()(const Vector& x) const;

    [[nodiscard]] Eigen::Index dim() const;
    [[nodiscard]] double lipschitz() const { return lipschitz_; }
    /// Strong monotonicity modulus; empty when the map is not monotone.
    [[nodiscard]] std::optional<double> monotonicity() const { return monotonicity_; }
    [[nodiscard]] const Variant& variant() const { return data_; }

private:
    Mapping(Variant data, double lipschitz, std::optional<double> monotonicity)
        : data_(std::move(data)), lipschitz_(lipschitz), monotonicity_(monotonicity) {}

    Variant data_;
    double lipschitz_;
    std::optional<double> monotonicity_;
};

// ---------------------------------------------------------------------------
// Moving sets Phi(x)
// ---------------------------------------------------------------------------

/// Phi(x) = s(x) + base
struct Translated {
    Mapping shift_map;
    ConvexSet base;
};

/// Phi(x) = base
struct Constant {
    ConvexSet base;
};

/**
 * Expert escape hatch: an arbitrary projection rule (x, z) -> P_{Phi(x)}(z)
 * with a user-declared kappa. Nothing about kappa is verified beyond the
 * sampled probe in certification.
 */
struct DeclaredKappa {
    Eigen::Index dim;
    std::function<Vector(const Vector& x, const Vector& z)> project;
    double kappa;
    /// Optional sampler of Phi(x), needed only for solution certificates.
    std::function<std::vector<Vector>(const Vector& x, std::uint64_t seed, std::size_t count)> sample;
};

class MovingSet {
public:
    using Variant = std::variant<Translated, Constant, DeclaredKappa>;

    static MovingSet translated(Mapping shift_map, ConvexSet base);
    static MovingSet constant(ConvexSet base);
    static MovingSet declaredKappa(DeclaredKappa rule);

    [[nodiscard]] Eigen::Index dim() const;
    /// Contraction constant of x -> P_{Phi(x)}(z); equals the Lipschitz constant of s for translates.
    [[nodiscard]] double kappa() const;
    [[nodiscard]] bool isConstant() const { return std::holds_alternative<Constant>(data_); }
    [[nodiscard]] bool isTranslationModel() const { return !std::holds_alternative<DeclaredKappa>(data_); }
    [[nodiscard]] const Variant& variant() const { return data_; }

    /// Offset s(x); zero for constant sets. Throws for DeclaredKappa.
    [[nodiscard]] Vector shift(const Vector& x) const;

    /// Points of Phi(x).
    [[nodiscard]] std::vector<Vector> sample(const Vector& x, std::uint64_t seed, std::size_t count) const;

private:
    explicit MovingSet(Variant data) : data_(std::move(data)) {}

    Variant data_;
};

/// P_{Phi(x)}(z), via P_{s(x)+Omega}(z) = s(x) + P_Omega(z - s(x)) for translates.
Vector movingProject(const MovingSet& phi, const Vector& x, const Vector& z);

// ---------------------------------------------------------------------------
// Problem instance and gain schedule
// ---------------------------------------------------------------------------

struct ProblemInstance {
    Eigen::Index dim;
    Mapping f;
    MovingSet phi;
    double alpha;

    /// Validates dimensions, alpha > 0 and that f carries a monotonicity modulus.
    static ProblemInstance make(Mapping f, MovingSet phi, double alpha);
};

/// lambda(t) = a + b t^p  (ConstantGain is a = gain, b = 0).
class LambdaSchedule {
public:
    static LambdaSchedule constant(double gain);
    static LambdaSchedule polynomial(double a, double b, double p);

    [[nodiscard]] double operator()(double t) const;
    /// Antiderivative A(t) with A(0) = 0; closed form.
    [[nodiscard]] double integral(double t0, double t1) const;
    /// Largest value on [t0, t1]; the catalog is nondecreasing in t.
    [[nodiscard]] double maxOn(double t0, double t1) const;
    /// Positive lower bound on [0, inf).
    [[nodiscard]] double lowerBound() const { return (*this)(0.0); }
    /// Symbolic: a > 0 makes the integral over [t0, inf) diverge.
    [[nodiscard]] bool integralDiverges() const { return a_ > 0.0; }

    [[nodiscard]] bool isConstant() const { return b_ == 0.0 || p_ == 0.0; }
    [[nodiscard]] double a() const { return a_; }
    [[nodiscard]] double b() const { return b_; }
    [[nodiscard]] double p() const { return p_; }

private:
    LambdaSchedule(double a, double b, double p) : a_(a), b_(b), p_(p) {}
    [[nodiscard]] double antiderivative(double t) const;

    double a_;
    double b_;
    double p_;
};

/// ||f(x) - P_{Phi(x)}(f(x) - alpha x)||; zero exactly at solutions.
double residual(const ProblemInstance& problem, const Vector& x);

/// P_{Phi(x)}(f(x) - alpha x) - f(x), the direction of the network before the gain.
Vector projectionDefect(const ProblemInstance& problem, const Vector& x);

/// S(x, t) = lambda(t) (P_{Phi(x)}(f(x) - alpha x) - f(x))
Vector vectorField(const ProblemInstance& problem, const LambdaSchedule& schedule, const Vector& x, double t);

/// h(x) = x - f(x)/alpha + P_{Phi(x)}(f(x) - alpha x)/alpha
Vector contractionMap(const ProblemInstance& problem, const Vector& x);

}  // namespace iqvi
