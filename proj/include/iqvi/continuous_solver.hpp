#pragma once

#include "iqvi/analysis.hpp"
#include "iqvi/common.hpp"
#include "iqvi/problem_model.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace iqvi {

enum class IntegrationMethod { explicit_euler, rk4 };

std::string_view toString(IntegrationMethod method);

struct IntegratorConfig {
    IntegrationMethod method = IntegrationMethod::rk4;
    double base_step = 1e-3;
    double t0 = 0.0;
    double t_end = 1.0;
    int record_every = 1;
    /// Cap on the dimensionless step lambda(t) h_sub (2L + alpha + kappa).
    double stiffness_cap = 0.5;
    double divergence_radius = 1e6;

    void validate() const;
};

enum class Termination { reached_t_end, residual_below_tol, diverged };

std::string_view toString(Termination reason);

struct TrajectorySample {
    double t;
    Vector x;
    double residual;
    std::optional<double> dist_to_solution;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Termination termination = Termination::reached_t_end;
    std::size_t steps_taken = 0;     ///< sub-steps actually integrated
    double max_substep = 0.0;
};

/**
 * @brief Integrates x' = lambda(t) (P_{Phi(x)}(f(x) - alpha x) - f(x)) from x0 at t0.
 *
 * Each base step of length h is split into m equal sub-steps with
 * lambda_max h/m (2L + alpha + kappa) <= stiffness_cap, where lambda_max is the
 * schedule's maximum over the base step. Samples are recorded every
 * `record_every` base steps plus the final state.
 *
 * `tol` > 0 stops the run as soon as a recorded or stepped state has
 * residual <= tol; `tol` = 0 integrates the full horizon.
 *
 * @throws NumericError when the state becomes non-finite.
 */
Trajectory integrate(const ProblemInstance& problem, const LambdaSchedule& schedule, const Vector& x0,
                     const IntegratorConfig& cfg, double tol, const std::optional<Vector>& x_star = std::nullopt);

/// Lower bound on the distance for envelope checks; samples closer than this are skipped.
inline constexpr double kEnvelopeFloor = 1e-12;
inline constexpr double kEnvelopeEpsilon = 1e-3;

struct EnvelopeSample {
    double t;
    double log_ratio;           ///< log ||x(t) - x*|| - log ||x(t0) - x*||
    double integral;            ///< integral of Lambda over [t0, t]
    bool passes_norm_form;      ///< log_ratio <= integral + eps
    bool passes_squared_form;   ///< 2 log_ratio <= integral + eps  (V = ||x - x*||^2 form)
};

struct EnvelopeReport {
    std::vector<EnvelopeSample> samples;
    std::size_t skipped_below_floor = 0;
    double epsilon = kEnvelopeEpsilon;
    double lambda_coefficient = 0.0;
    bool norm_form_holds = true;
    bool squared_form_holds = true;
    /// Largest log_ratio - integral over checked samples (norm form).
    double worst_norm_excess = -std::numeric_limits<double>::infinity();
};

/**
 * @brief Checks the exponential envelope sample by sample.
 *
 * The norm form is ||x(t) - x*|| <= ||x0 - x*|| exp(int Lambda). The squared
 * form applies the same exponential to V = ||x - x*||^2, which is what
 * V' <= Lambda V integrates to; it is reported alongside.
 *
 * @throws ParameterError when the stability conditions fail.
 */
EnvelopeReport rateEnvelope(const Trajectory& traj, const Vector& x_star, const ConstantsBundle& c,
                            const LambdaSchedule& schedule, double integrator_slack = 0.0);

struct LyapunovPoint {
    double t;
    double V;
    double V_dot;       ///< centered difference, interior samples only
    double bound;       ///< Lambda(t) V
    double tolerance;   ///< truncation allowance of the difference quotient
    bool satisfied;
};

struct LyapunovSeries {
    std::vector<double> t;
    std::vector<double> V;
    std::vector<LyapunovPoint> derivative;  ///< interior samples
    double fraction_satisfied = 1.0;
    /// V_{k+1} < V_k for every k with ||x_k - x*|| above the floor.
    bool strictly_decreasing = true;
};

/// V = ||x - x*||^2 along the trajectory and the check V' <= Lambda(t) V.
LyapunovSeries lyapunovSeries(const Trajectory& traj, const Vector& x_star, const ConstantsBundle& c,
                              const LambdaSchedule& schedule, double floor = kEnvelopeFloor);

}  // namespace iqvi
