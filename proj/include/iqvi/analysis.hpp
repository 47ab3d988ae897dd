#pragma once

#include "iqvi/common.hpp"
#include "iqvi/problem_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iqvi {

/// Constants every theorem-level check is phrased in.
struct ConstantsBundle {
    double L;      ///< Lipschitz constant of f
    double beta;   ///< strong monotonicity modulus of f
    double kappa;  ///< contraction constant of the moving set
    double l;      ///< Lipschitz constant of the translation s (equals kappa for translates)
    double alpha;

    /// Validates finiteness, positivity and L >= beta.
    static ConstantsBundle make(double L, double beta, double kappa, double l, double alpha);
    static ConstantsBundle fromProblem(const ProblemInstance& problem);
};

/// One strict inequality lhs < rhs.
struct ConditionEntry {
    std::string label;
    double lhs;
    double rhs;
    bool satisfied;

    /// rhs - lhs; small positive margins flag numerically fragile verdicts.
    [[nodiscard]] double margin() const { return rhs - lhs; }
};

struct ConditionReport {
    std::string name;
    std::vector<ConditionEntry> entries;
    /// Derived constants in insertion order.
    std::vector<std::pair<std::string, double>> derived;
    std::vector<std::string> warnings;

    /// Conjunction of all entries.
    [[nodiscard]] bool verdict() const;
    [[nodiscard]] std::optional<double> derivedValue(const std::string& key) const;
    [[nodiscard]] const ConditionEntry* entry(const std::string& label) const;
};

/// Margins below this are reported as fragile.
inline constexpr double kFragileMargin = 1e-6;

/**
 * Existence and uniqueness: L^2 - 2 alpha (beta - kappa) < kappa^2, together
 * with the contraction factor theta of h being below one.
 */
ConditionReport checkExistence(const ConstantsBundle& c);

/// Contraction factor (sqrt(L^2 - 2 beta alpha + alpha^2) + kappa) / alpha of h.
double contractionTheta(const ConstantsBundle& c);

/// 1 + 2 kappa - 2 beta + alpha^2 + L^2 - 2 alpha beta
double lambdaCoefficient(const ConstantsBundle& c);

/// Exponential stability of the network; embeds the existence check.
ConditionReport checkStability(const ConstantsBundle& c, const LambdaSchedule& schedule);

/// Convergence of the variable-step discretization for gains in the open interval (A, B).
ConditionReport checkDiscrete(const ConstantsBundle& c, double A, double B);

struct DiscreteConstants {
    double C1;  ///< (2 alpha (beta - l) - (L^2 + l^2)) / alpha
    double C2;  ///< alpha (beta - l)
};
DiscreteConstants discreteConstants(const ConstantsBundle& c);

/// Per-step contraction factor sqrt(1 + lambda^2 C2 - lambda C1).
double qFactor(const ConstantsBundle& c, double lambda_n);

/// Minimizer C1 / (2 C2) of the per-step factor.
double optimalLambda(const ConstantsBundle& c);

/// Open lower endpoint of {alpha : existence condition holds}; empty when beta <= kappa.
std::optional<double> feasibleAlphaLower(double L, double beta, double kappa);

/// Linear rate sqrt(1 - (alpha beta - L^2) / alpha^2) of the fixed-gain projection method.
double heRate(const ConstantsBundle& c);

struct EmpiricalConstants {
    double lipschitz;     ///< max ratio: a lower bound on the true L
    double monotonicity;  ///< min ratio: an upper bound on the true beta
    std::size_t pairs_used;
};

/// Random-pair audit of a mapping's declared constants over a box.
EmpiricalConstants estimateConstants(const Mapping& f, std::uint64_t seed, std::size_t pairs,
                                     const Vector& lower, const Vector& upper);

}  // namespace iqvi
