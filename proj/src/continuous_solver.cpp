#include "iqvi/continuous_solver.hpp"

#include <algorithm>
#include <cmath>

namespace iqvi {

std::string_view toString(IntegrationMethod method) {
    switch (method) {
        case IntegrationMethod::explicit_euler: return "explicit-euler";
        case IntegrationMethod::rk4: return "rk4";
    }
    return "unknown";
}

std::string_view toString(Termination reason) {
    switch (reason) {
        case Termination::reached_t_end: return "reached_t_end";
        case Termination::residual_below_tol: return "residual_below_tol";
        case Termination::diverged: return "diverged";
    }
    return "unknown";
}

void IntegratorConfig::validate() const {
    if (!(base_step > 0.0) || !std::isfinite(base_step)) throw InputError("integrator: base_step must be positive");
    if (!(t0 >= 0.0) || !std::isfinite(t0)) throw InputError("integrator: t0 must be nonnegative");
    if (!(t_end > t0) || !std::isfinite(t_end)) throw InputError("integrator: t_end must exceed t0");
    if (record_every < 1) throw InputError("integrator: record_every must be positive");
    if (!(stiffness_cap > 0.0 && stiffness_cap <= 1.0)) throw InputError("integrator: stiffness_cap must lie in (0, 1]");
    if (!(divergence_radius > 0.0)) throw InputError("integrator: divergence_radius must be positive");
}

namespace {

double stiffnessScale(const ProblemInstance& problem) {
    // Lipschitz constant of S(., t) per unit gain.
    return 2.0 * problem.f.lipschitz() + problem.alpha + problem.phi.kappa();
}

Vector step(const ProblemInstance& problem, const LambdaSchedule& schedule, IntegrationMethod method,
            const Vector& x, double t, double h) {
    auto S = [&](const Vector& y, double s) { return vectorField(problem, schedule, y, s); };
    if (method == IntegrationMethod::explicit_euler) return x + h * S(x, t);
    const Vector k1 = S(x, t);
    const Vector k2 = S(x + 0.5 * h * k1, t + 0.5 * h);
    const Vector k3 = S(x + 0.5 * h * k2, t + 0.5 * h);
    const Vector k4 = S(x + h * k3, t + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory integrate(const ProblemInstance& problem, const LambdaSchedule& schedule, const Vector& x0,
                     const IntegratorConfig& cfg, double tol, const std::optional<Vector>& x_star) {
    cfg.validate();
    requireSameDim(problem.dim, x0.size(), "integrate x0");
    if (x_star) requireSameDim(problem.dim, x_star->size(), "integrate x_star");
    if (!(tol >= 0.0)) throw InputError("integrate: tol must be nonnegative");
    requireFinite(x0, "integrate x0");

    const double scale = stiffnessScale(problem);
    Trajectory traj;

    auto record = [&](double t, const Vector& x, double res) {
        std::optional<double> dist;
        if (x_star) dist = (x - *x_star).norm();
        traj.samples.push_back(TrajectorySample{t, x, res, dist});
    };

    Vector x = x0;
    double t = cfg.t0;
    double res = residual(problem, x);
    record(t, x, res);
    if (tol > 0.0 && res <= tol) {
        traj.termination = Termination::residual_below_tol;
        return traj;
    }

    const double span = cfg.t_end - cfg.t0;
    const auto baseSteps = static_cast<long long>(std::ceil(span / cfg.base_step - 1e-9));
    for (long long k = 0; k < baseSteps; ++k) {
        const double tNext = (k + 1 == baseSteps) ? cfg.t_end : cfg.t0 + static_cast<double>(k + 1) * cfg.base_step;
        const double width = tNext - t;
        const double gainMax = schedule.maxOn(t, tNext);
        const auto substeps =
            std::max<long long>(1, static_cast<long long>(std::ceil(gainMax * width * scale / cfg.stiffness_cap)));
        const double h = width / static_cast<double>(substeps);
        for (long long i = 0; i < substeps; ++i) {
            const double ts = t + static_cast<double>(i) * h;
            x = step(problem, schedule, cfg.method, x, ts, h);
        }
        if (!x.allFinite()) throw NumericError("integrate: non-finite state at t = " + std::to_string(tNext));
        traj.steps_taken += static_cast<std::size_t>(substeps);
        traj.max_substep = std::max(traj.max_substep, h);
        t = tNext;
        res = residual(problem, x);

        const bool last = (k + 1 == baseSteps);
        if (x.norm() > cfg.divergence_radius) {
            record(t, x, res);
            traj.termination = Termination::diverged;
            return traj;
        }
        if (tol > 0.0 && res <= tol) {
            record(t, x, res);
            traj.termination = Termination::residual_below_tol;
            return traj;
        }
        if (last || (k + 1) % cfg.record_every == 0) record(t, x, res);
    }
    traj.termination = Termination::reached_t_end;
    return traj;
}

EnvelopeReport rateEnvelope(const Trajectory& traj, const Vector& x_star, const ConstantsBundle& c,
                            const LambdaSchedule& schedule, double integrator_slack) {
    if (traj.samples.empty()) throw InputError("rate_envelope: empty trajectory");
    requireSameDim(traj.samples.front().x.size(), x_star.size(), "rate_envelope x_star");
    if (!(integrator_slack >= 0.0)) throw InputError("rate_envelope: slack must be nonnegative");
    const auto stability = checkStability(c, schedule);
    if (!stability.verdict()) throw ParameterError("rate_envelope: stability conditions are not satisfied");

    EnvelopeReport report;
    report.epsilon = kEnvelopeEpsilon + integrator_slack;
    report.lambda_coefficient = lambdaCoefficient(c);

    const double t0 = traj.samples.front().t;
    const double d0 = (traj.samples.front().x - x_star).norm();
    for (const auto& s : traj.samples) {
        const double d = (s.x - x_star).norm();
        if (d <= kEnvelopeFloor || d0 <= kEnvelopeFloor) {
            ++report.skipped_below_floor;
            continue;
        }
        EnvelopeSample e;
        e.t = s.t;
        e.log_ratio = std::log(d) - std::log(d0);
        e.integral = report.lambda_coefficient * schedule.integral(t0, s.t);
        e.passes_norm_form = e.log_ratio <= e.integral + report.epsilon;
        e.passes_squared_form = 2.0 * e.log_ratio <= e.integral + report.epsilon;
        report.norm_form_holds = report.norm_form_holds && e.passes_norm_form;
        report.squared_form_holds = report.squared_form_holds && e.passes_squared_form;
        report.worst_norm_excess = std::max(report.worst_norm_excess, e.log_ratio - e.integral);
        report.samples.push_back(e);
    }
    return report;
}

LyapunovSeries lyapunovSeries(const Trajectory& traj, const Vector& x_star, const ConstantsBundle& c,
                              const LambdaSchedule& schedule, double floor) {
    const auto& s = traj.samples;
    if (s.size() < 3) throw InputError("lyapunov_series: at least 3 samples required");
    requireSameDim(s.front().x.size(), x_star.size(), "lyapunov_series x_star");
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i].t > s[i - 1].t)) throw InputError("lyapunov_series: sample times must be strictly increasing");
    }

    LyapunovSeries out;
    for (const auto& sample : s) {
        out.t.push_back(sample.t);
        out.V.push_back((sample.x - x_star).squaredNorm());
    }

    const double coefficient = lambdaCoefficient(c);
    const double scale = 2.0 * c.L + c.alpha + c.kappa;
    const double floorV = floor * floor;
    std::size_t checked = 0;
    std::size_t passed = 0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double h1 = out.t[i] - out.t[i - 1];
        const double h2 = out.t[i + 1] - out.t[i];
        const double vdot = -h2 / (h1 * (h1 + h2)) * out.V[i - 1] + (h2 - h1) / (h1 * h2) * out.V[i] +
                            h1 / (h2 * (h1 + h2)) * out.V[i + 1];
        const double gain = schedule(out.t[i]);
        // |V'''| <= (2 lambda (2L + alpha + kappa))^3 max V along an exponentially contracting flow.
        const double rate = 2.0 * schedule.maxOn(out.t[i - 1], out.t[i + 1]) * scale;
        const double vmax = std::max({out.V[i - 1], out.V[i], out.V[i + 1]});
        const double tolerance = h1 * h2 / 6.0 * rate * rate * rate * vmax;
        LyapunovPoint p{out.t[i], out.V[i], vdot, coefficient * gain * out.V[i], tolerance, false};
        p.satisfied = p.V_dot <= p.bound + p.tolerance;
        if (out.V[i] > floorV) {
            ++checked;
            if (p.satisfied) ++passed;
        }
        out.derivative.push_back(p);
    }
    out.fraction_satisfied = checked == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(checked);

    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (out.V[i] > floorV && !(out.V[i + 1] < out.V[i])) out.strictly_decreasing = false;
    }
    return out;
}

}  // namespace iqvi
