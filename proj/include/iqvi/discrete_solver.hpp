#pragma once

#include "iqvi/analysis.hpp"
#include "iqvi/common.hpp"
#include "iqvi/problem_model.hpp"
#include "iqvi/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iqvi {

struct ConstantGainSeq {
    double value;
};

struct CyclicGainSeq {
    std::vector<double> values;
};

/// Gains drawn uniformly from the open interval (lower, upper).
struct SeededUniformGainSeq {
    double lower;
    double upper;
    std::uint64_t seed;
};

/// Closed catalog of gain sequences lambda_n; values are recorded in the log.
class LambdaSequence {
public:
    using Variant = std::variant<ConstantGainSeq, CyclicGainSeq, SeededUniformGainSeq>;

    static LambdaSequence constant(double value);
    static LambdaSequence cyclic(std::vector<double> values);
    static LambdaSequence seededUniform(double lower, double upper, std::uint64_t seed);

    [[nodiscard]] const Variant& variant() const { return data_; }

    /// Stateful reader over the sequence.
    class Stream {
    public:
        double next();

    private:
        friend class LambdaSequence;
        explicit Stream(const LambdaSequence& seq);
        Variant data_;
        std::size_t index_ = 0;
        std::optional<Rng> rng_;
    };

    [[nodiscard]] Stream stream() const { return Stream(*this); }

private:
    explicit LambdaSequence(Variant data) : data_(std::move(data)) {}
    Variant data_;
};

struct IterationConfig {
    LambdaSequence lambda_seq = LambdaSequence::constant(0.1);
    /// h_n; the effective gain of a step is lambda_n * step_scale.
    double step_scale = 1.0;
    double tol = 1e-8;
    int max_iter = 10000;

    void validate() const;
};

enum class IterTermination { residual_below_tol, max_iter, numeric_failure };

std::string_view toString(IterTermination reason);

struct IterateEntry {
    int n;
    Vector x;
    double residual;
    std::optional<double> dist_to_solution;
    /// Effective gain used to move from x_n to x_{n+1}; empty on the last entry.
    std::optional<double> lambda_used;
};

struct IterateLog {
    std::string method;
    std::vector<IterateEntry> entries;
    IterTermination termination = IterTermination::max_iter;
    double step_scale = 1.0;
    /// Banach runs: contraction factor and the a-priori bounds theta^k / (1 - theta) ||x_1 - x_0||.
    std::optional<double> theta;
    std::vector<double> a_priori_bounds;
};

/// Numerical failure with the iterates computed so far (the last entry is the last finite state).
class SolverFailure : public NumericError {
public:
    SolverFailure(const std::string& what, IterateLog log) : NumericError(what), log_(std::move(log)) {}
    [[nodiscard]] const IterateLog& log() const { return log_; }

private:
    IterateLog log_;
};

/**
 * x_{n+1} = x_n + lambda_n h_n (P_{Phi(x_n)}(f(x_n) - alpha x_n) - f(x_n)).
 * Stops at residual <= tol (checked from n = 0) or after max_iter steps.
 */
IterateLog iterate(const ProblemInstance& problem, const IterationConfig& cfg, const Vector& x0,
                   const std::optional<Vector>& x_star = std::nullopt);

/**
 * Fixed gain 1/alpha on a constant moving set.
 * @throws InputError for non-constant moving sets, ParameterError when alpha <= L^2 / beta.
 */
IterateLog heIterate(const ProblemInstance& problem, const Vector& x0, double tol, int max_iter,
                     const std::optional<Vector>& x_star = std::nullopt);

/**
 * Fixed-point iteration x_{k+1} = h(x_k) on the contraction map.
 * @throws ParameterError when theta >= 1.
 */
IterateLog banachIterate(const ProblemInstance& problem, const Vector& x0, double tol, int max_iter,
                         const std::optional<Vector>& x_star = std::nullopt);

struct GainInterval {
    double lower;
    double upper;
};

struct StepCheck {
    int n;
    double gain;
    double ratio;                  ///< ||x_{n+1} - x*|| / ||x_n - x*|| (0 when x_n = x*)
    std::optional<double> q;       ///< empty outside the regime
    std::optional<bool> passes;    ///< empty outside the regime
};

struct StepCertificate {
    std::vector<StepCheck> steps;
    bool regime_ok = false;
    std::string regime_note;
    GainInterval interval{0.0, 0.0};
    std::optional<double> r;
    /// ||x_{n+1} - x*|| < r^{n/2} ||x_0 - x*|| + 1e-12 for all n; empty outside the regime.
    std::optional<bool> envelope_holds;
    bool effective_gain = false;   ///< true when step_scale != 1

    /// All per-step checks and the envelope pass; false outside the regime.
    [[nodiscard]] bool allPass() const;
};

inline constexpr double kCertificateSlack = 1e-12;

/**
 * @brief Per-step contraction certificate for a discrete run.
 *
 * With `regime` given, every gain must lie strictly inside it and the
 * interval must pass checkDiscrete. Without it, the interval spanned by the
 * recorded gains is used, with the same conditions evaluated at its
 * endpoints.
 */
StepCertificate perStepCertificate(const IterateLog& log, const Vector& x_star, const ConstantsBundle& c,
                                   const std::optional<GainInterval>& regime = std::nullopt);

}  // namespace iqvi
