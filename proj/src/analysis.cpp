#include "iqvi/analysis.hpp"

#include "iqvi/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iqvi {

namespace {

ConditionEntry strictLess(std::string label, double lhs, double rhs) {
    return ConditionEntry{std::move(label), lhs, rhs, lhs < rhs};
}

void flagFragile(ConditionReport& report) {
    for (const auto& e : report.entries) {
        const double m = e.margin();
        if (e.satisfied && m < kFragileMargin) {
            report.warnings.push_back("fragile margin " + std::to_string(m) + " on '" + e.label + "'");
        }
    }
}

void appendExistence(ConditionReport& report, const ConstantsBundle& c) {
    const double lhs = c.L * c.L - 2.0 * c.alpha * (c.beta - c.kappa);
    report.entries.push_back(strictLess("L^2 - 2 alpha (beta - kappa) < kappa^2", lhs, c.kappa * c.kappa));

    const double radicand = c.L * c.L - 2.0 * c.beta * c.alpha + c.alpha * c.alpha;
    if (radicand < 0.0) {
        report.warnings.push_back("constants inconsistent: L^2 - 2 beta alpha + alpha^2 < 0, clamped to 0");
    }
    const double theta = contractionTheta(c);
    report.entries.push_back(strictLess("theta < 1", theta, 1.0));
    report.derived.emplace_back("theta", theta);
}

}  // namespace

ConstantsBundle ConstantsBundle::make(double L, double beta, double kappa, double l, double alpha) {
    for (double v : {L, beta, kappa, l, alpha}) {
        if (!std::isfinite(v)) throw InputError("constants: non-finite value");
    }
    if (L <= 0.0) throw InputError("constants: L must be positive");
    if (beta < 0.0 || kappa < 0.0 || l < 0.0) throw InputError("constants: beta, kappa, l must be nonnegative");
    if (alpha <= 0.0) throw InputError("constants: alpha must be positive");
    if (beta > 0.0 && L < beta) throw InputError("constants: L must be at least beta");
    return ConstantsBundle{L, beta, kappa, l, alpha};
}

ConstantsBundle ConstantsBundle::fromProblem(const ProblemInstance& problem) {
    const double kappa = problem.phi.kappa();
    return make(problem.f.lipschitz(), problem.f.monotonicity().value_or(0.0), kappa, kappa, problem.alpha);
}

bool ConditionReport::verdict() const {
    return std::all_of(entries.begin(), entries.end(), [](const ConditionEntry& e) { return e.satisfied; });
}

std::optional<double> ConditionReport::derivedValue(const std::string& key) const {
    for (const auto& [k, v] : derived) {
        if (k == key) return v;
    }
    return std::nullopt;
}

const ConditionEntry* ConditionReport::entry(const std::string& label) const {
    for (const auto& e : entries) {
        if (e.label == label) return &e;
    }
    return nullptr;
}

double contractionTheta(const ConstantsBundle& c) {
    const double radicand = c.L * c.L - 2.0 * c.beta * c.alpha + c.alpha * c.alpha;
    return (std::sqrt(std::max(radicand, 0.0)) + c.kappa) / c.alpha;
}

double lambdaCoefficient(const ConstantsBundle& c) {
    return 1.0 + 2.0 * c.kappa - 2.0 * c.beta + c.alpha * c.alpha + c.L * c.L - 2.0 * c.alpha * c.beta;
}

ConditionReport checkExistence(const ConstantsBundle& c) {
    ConditionReport report;
    report.name = "existence";
    appendExistence(report, c);
    flagFragile(report);
    return report;
}

ConditionReport checkStability(const ConstantsBundle& c, const LambdaSchedule& schedule) {
    ConditionReport report;
    report.name = "stability";
    const double coefficient = lambdaCoefficient(c);
    report.entries.push_back(
        strictLess("1 + 2 kappa - 2 beta + alpha^2 + L^2 - 2 alpha beta < 0", coefficient, 0.0));
    // Decided from the schedule's closed form: a > 0 makes the integral diverge.
    report.entries.push_back(strictLess("integral of lambda diverges (0 < a)", 0.0,
                                        schedule.integralDiverges() ? schedule.a() : 0.0));
    appendExistence(report, c);

    report.derived.emplace_back("lambda_coefficient", coefficient);
    const double lowerBound = schedule.lowerBound();
    report.derived.emplace_back("lambda_lower_bound", lowerBound);
    if (lowerBound > 0.0) report.derived.emplace_back("zeta", -lowerBound * coefficient);
    flagFragile(report);
    return report;
}

DiscreteConstants discreteConstants(const ConstantsBundle& c) {
    const double gap = c.beta - c.l;
    return DiscreteConstants{(2.0 * c.alpha * gap - (c.L * c.L + c.l * c.l)) / c.alpha, c.alpha * gap};
}

ConditionReport checkDiscrete(const ConstantsBundle& c, double A, double B) {
    if (!std::isfinite(A) || !std::isfinite(B)) throw InputError("check_discrete: non-finite A or B");
    if (A <= 0.0) throw InputError("check_discrete: A must be positive");
    if (A >= B) throw InputError("check_discrete: A must be smaller than B");

    ConditionReport report;
    report.name = "discrete";
    const double gap = c.beta - c.l;
    const double sumSq = c.L * c.L + c.l * c.l;
    constexpr double inf = std::numeric_limits<double>::infinity();

    report.entries.push_back(strictLess("l < beta", c.l, c.beta));
    const double alphaBound = gap > 0.0 ? sumSq / (2.0 * gap) : inf;
    report.entries.push_back(strictLess("(L^2 + l^2) / (2 (beta - l)) < alpha", alphaBound, c.alpha));
    const double ratioBound = gap > 0.0 ? (2.0 * c.alpha * gap - sumSq) / (c.alpha * c.alpha * gap) : -inf;
    report.entries.push_back(strictLess("B^2 / A < (2 alpha (beta - l) - (L^2 + l^2)) / (alpha^2 (beta - l))",
                                        B * B / A, ratioBound));

    const auto [C1, C2] = discreteConstants(c);
    const double r = 1.0 + B * B * C2 - A * C1;
    report.entries.push_back(strictLess("r = 1 + B^2 C2 - A C1 < 1", r, 1.0));

    report.derived.emplace_back("C1", C1);
    report.derived.emplace_back("C2", C2);
    report.derived.emplace_back("r", r);
    report.derived.emplace_back("A", A);
    report.derived.emplace_back("B", B);
    flagFragile(report);
    return report;
}

double qFactor(const ConstantsBundle& c, double lambda_n) {
    if (!std::isfinite(lambda_n) || lambda_n <= 0.0) throw InputError("q_factor: lambda_n must be positive");
    const auto [C1, C2] = discreteConstants(c);
    const double squared = 1.0 + lambda_n * lambda_n * C2 - lambda_n * C1;
    if (squared < 0.0) throw ParameterError("q_factor: negative radicand, constants outside the theorem regime");
    return std::sqrt(squared);
}

double optimalLambda(const ConstantsBundle& c) {
    const auto [C1, C2] = discreteConstants(c);
    if (C1 <= 0.0 || C2 <= 0.0) throw ParameterError("optimal_lambda: C1 and C2 must be positive");
    return C1 / (2.0 * C2);
}

std::optional<double> feasibleAlphaLower(double L, double beta, double kappa) {
    if (!(beta > kappa)) return std::nullopt;
    return std::max(kappa, (L * L - kappa * kappa) / (2.0 * (beta - kappa)));
}

double heRate(const ConstantsBundle& c) {
    if (!(c.beta > 0.0) || !(c.alpha > c.L * c.L / c.beta)) {
        throw ParameterError("he_rate: requires alpha > L^2 / beta");
    }
    return std::sqrt(1.0 - (c.alpha * c.beta - c.L * c.L) / (c.alpha * c.alpha));
}

EmpiricalConstants estimateConstants(const Mapping& f, std::uint64_t seed, std::size_t pairs,
                                     const Vector& lower, const Vector& upper) {
    if (pairs == 0) throw InputError("estimate_constants: pairs must be positive");
    requireSameDim(f.dim(), lower.size(), "estimate_constants lower");
    requireSameDim(f.dim(), upper.size(), "estimate_constants upper");
    if (!(lower.array() <= upper.array()).all()) throw InputError("estimate_constants: invalid box");

    Rng rng(seed);
    const Eigen::Index n = f.dim();
    auto draw = [&] {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lower[i], upper[i]);
        return v;
    };

    EmpiricalConstants out{0.0, std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < pairs; ++k) {
        const Vector x = draw();
        const Vector y = draw();
        const Vector d = x - y;
        const double dd = d.squaredNorm();
        if (dd == 0.0) continue;
        const Vector df = f(x) - f(y);
        out.lipschitz = std::max(out.lipschitz, df.norm() / std::sqrt(dd));
        out.monotonicity = std::min(out.monotonicity, df.dot(d) / dd);
        ++out.pairs_used;
    }
    return out;
}

}  // namespace iqvi
