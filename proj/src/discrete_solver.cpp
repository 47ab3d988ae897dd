#include "iqvi/discrete_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iqvi {

LambdaSequence LambdaSequence::constant(double value) {
    if (!std::isfinite(value) || value <= 0.0) throw InputError("lambda_seq constant: value must be positive");
    return LambdaSequence(ConstantGainSeq{value});
}

LambdaSequence LambdaSequence::cyclic(std::vector<double> values) {
    if (values.empty()) throw InputError("lambda_seq cyclic: no values");
    for (double v : values) {
        if (!std::isfinite(v) || v <= 0.0) throw InputError("lambda_seq cyclic: values must be positive");
    }
    return LambdaSequence(CyclicGainSeq{std::move(values)});
}

LambdaSequence LambdaSequence::seededUniform(double lower, double upper, std::uint64_t seed) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower <= 0.0 || lower >= upper) {
        throw InputError("lambda_seq seeded_uniform: requires 0 < lower < upper");
    }
    return LambdaSequence(SeededUniformGainSeq{lower, upper, seed});
}

LambdaSequence::Stream::Stream(const LambdaSequence& seq) : data_(seq.data_) {
    if (const auto* u = std::get_if<SeededUniformGainSeq>(&data_)) rng_.emplace(u->seed);
}

double LambdaSequence::Stream::next() {
    const auto& data = data_;
    if (const auto* c = std::get_if<ConstantGainSeq>(&data)) return c->value;
    if (const auto* cy = std::get_if<CyclicGainSeq>(&data)) return cy->values[index_++ % cy->values.size()];
    const auto& u = std::get<SeededUniformGainSeq>(data);
    return rng_->uniform(u.lower, u.upper);
}

void IterationConfig::validate() const {
    if (!std::isfinite(step_scale) || step_scale <= 0.0) throw InputError("iteration: step_scale must be positive");
    if (!(tol >= 0.0)) throw InputError("iteration: tol must be nonnegative");
    if (max_iter < 1) throw InputError("iteration: max_iter must be positive");
}

std::string_view toString(IterTermination reason) {
    switch (reason) {
        case IterTermination::residual_below_tol: return "residual_below_tol";
        case IterTermination::max_iter: return "max_iter";
        case IterTermination::numeric_failure: return "numeric_failure";
    }
    return "unknown";
}

namespace {

template <class Step>
IterateLog runIteration(const ProblemInstance& problem, const Vector& x0, double tol, int max_iter,
                        const std::optional<Vector>& x_star, IterateLog log, Step&& step) {
    requireSameDim(problem.dim, x0.size(), "iterate x0");
    if (x_star) requireSameDim(problem.dim, x_star->size(), "iterate x_star");
    requireFinite(x0, "iterate x0");

    auto push = [&](int n, const Vector& x, double res) {
        std::optional<double> dist;
        if (x_star) dist = (x - *x_star).norm();
        log.entries.push_back(IterateEntry{n, x, res, dist, std::nullopt});
    };

    Vector x = x0;
    push(0, x, residual(problem, x));
    for (int n = 0;; ++n) {
        if (log.entries.back().residual <= tol) {
            log.termination = IterTermination::residual_below_tol;
            return log;
        }
        if (n >= max_iter) {
            log.termination = IterTermination::max_iter;
            return log;
        }
        double gain = 0.0;
        Vector next = step(x, gain);
        double res = std::numeric_limits<double>::quiet_NaN();
        if (next.allFinite()) {
            try {
                res = residual(problem, next);
            } catch (const NumericError&) {
            }
        }
        if (!std::isfinite(res)) {
            log.termination = IterTermination::numeric_failure;
            throw SolverFailure("iterate: non-finite state at n = " + std::to_string(n + 1), std::move(log));
        }
        log.entries.back().lambda_used = gain;
        x = std::move(next);
        push(n + 1, x, res);
    }
}

}  // namespace

IterateLog iterate(const ProblemInstance& problem, const IterationConfig& cfg, const Vector& x0,
                   const std::optional<Vector>& x_star) {
    cfg.validate();
    IterateLog log;
    log.method = "variable_step";
    log.step_scale = cfg.step_scale;
    auto gains = cfg.lambda_seq.stream();
    return runIteration(problem, x0, cfg.tol, cfg.max_iter, x_star, std::move(log),
                        [&](const Vector& x, double& gain) {
                            gain = gains.next() * cfg.step_scale;
                            return Vector(x + gain * projectionDefect(problem, x));
                        });
}

IterateLog heIterate(const ProblemInstance& problem, const Vector& x0, double tol, int max_iter,
                     const std::optional<Vector>& x_star) {
    if (!problem.phi.isConstant()) throw InputError("he_iterate: moving set must be constant");
    if (!(tol >= 0.0) || max_iter < 1) throw InputError("he_iterate: invalid tol or max_iter");
    const double beta = problem.f.monotonicity().value_or(0.0);
    const double L = problem.f.lipschitz();
    if (!(beta > 0.0) || !(problem.alpha > L * L / beta)) throw ParameterError("he_iterate: requires alpha > L^2 / beta");

    IterateLog log;
    log.method = "he";
    const double gain = 1.0 / problem.alpha;
    return runIteration(problem, x0, tol, max_iter, x_star, std::move(log), [&](const Vector& x, double& used) {
        used = gain;
        return Vector(x + gain * projectionDefect(problem, x));
    });
}

IterateLog banachIterate(const ProblemInstance& problem, const Vector& x0, double tol, int max_iter,
                         const std::optional<Vector>& x_star) {
    if (!(tol >= 0.0) || max_iter < 1) throw InputError("banach_iterate: invalid tol or max_iter");
    const auto c = ConstantsBundle::fromProblem(problem);
    const double theta = contractionTheta(c);
    if (!(theta < 1.0)) throw ParameterError("banach_iterate: contraction factor theta >= 1");

    IterateLog log;
    log.method = "banach";
    log.theta = theta;
    log = runIteration(problem, x0, tol, max_iter, x_star, std::move(log), [&](const Vector& x, double& used) {
        used = 1.0 / problem.alpha;
        return contractionMap(problem, x);
    });
    if (log.entries.size() >= 2) {
        const double firstStep = (log.entries[1].x - log.entries[0].x).norm();
        for (std::size_t k = 0; k < log.entries.size(); ++k) {
            log.a_priori_bounds.push_back(std::pow(theta, static_cast<double>(k)) / (1.0 - theta) * firstStep);
        }
    }
    return log;
}

bool StepCertificate::allPass() const {
    if (!regime_ok || !envelope_holds.value_or(false)) return false;
    return std::all_of(steps.begin(), steps.end(), [](const StepCheck& s) { return s.passes.value_or(false); });
}

StepCertificate perStepCertificate(const IterateLog& log, const Vector& x_star, const ConstantsBundle& c,
                                   const std::optional<GainInterval>& regime) {
    if (log.entries.empty()) throw InputError("per_step_certificate: empty log");
    requireSameDim(log.entries.front().x.size(), x_star.size(), "per_step_certificate x_star");
    for (std::size_t i = 0; i + 1 < log.entries.size(); ++i) {
        if (!log.entries[i].lambda_used) throw InputError("per_step_certificate: missing gain record");
    }

    StepCertificate cert;
    cert.effective_gain = log.step_scale != 1.0;

    std::vector<double> gains;
    for (std::size_t i = 0; i + 1 < log.entries.size(); ++i) gains.push_back(*log.entries[i].lambda_used);

    if (regime) {
        cert.interval = *regime;
    } else if (!gains.empty()) {
        cert.interval = {*std::min_element(gains.begin(), gains.end()), *std::max_element(gains.begin(), gains.end())};
    }

    cert.regime_ok = true;
    if (gains.empty()) {
        cert.regime_note = "no steps taken";
    } else if (regime) {
        const bool inside = std::all_of(gains.begin(), gains.end(),
                                        [&](double g) { return g > regime->lower && g < regime->upper; });
        if (!inside) {
            cert.regime_ok = false;
            cert.regime_note = "gain outside the declared open interval";
        } else if (!(regime->lower > 0.0 && regime->lower < regime->upper) ||
                   !checkDiscrete(c, regime->lower, regime->upper).verdict()) {
            cert.regime_ok = false;
            cert.regime_note = "declared interval fails the discrete convergence conditions";
        }
    } else {
        // Closure of the observed gains; a constant sequence gives A = B.
        const double A = cert.interval.lower;
        const double B = cert.interval.upper;
        const double gap = c.beta - c.l;
        const double sumSq = c.L * c.L + c.l * c.l;
        const bool ok = gap > 0.0 && c.alpha > sumSq / (2.0 * gap) &&
                        B * B / A < (2.0 * c.alpha * gap - sumSq) / (c.alpha * c.alpha * gap);
        if (!ok) {
            cert.regime_ok = false;
            cert.regime_note = "observed gains fail the discrete convergence conditions";
        }
    }

    if (cert.regime_ok && !gains.empty()) {
        const auto [C1, C2] = discreteConstants(c);
        cert.r = 1.0 + cert.interval.upper * cert.interval.upper * C2 - cert.interval.lower * C1;
    }
    if (cert.effective_gain && cert.regime_note.empty()) cert.regime_note = "checks apply to the effective gain lambda_n h_n";

    const double d0 = (log.entries.front().x - x_star).norm();
    bool envelope = true;
    for (std::size_t i = 0; i + 1 < log.entries.size(); ++i) {
        const double dn = (log.entries[i].x - x_star).norm();
        const double dn1 = (log.entries[i + 1].x - x_star).norm();
        StepCheck s{static_cast<int>(i), gains[i], dn > 0.0 ? dn1 / dn : 0.0, std::nullopt, std::nullopt};
        if (cert.regime_ok) {
            try {
                s.q = qFactor(c, gains[i]);
                s.passes = dn1 <= *s.q * dn + kCertificateSlack;
            } catch (const Error&) {
                s.passes = false;
            }
            const double bound = std::pow(*cert.r, static_cast<double>(i) / 2.0) * d0 + kCertificateSlack;
            envelope = envelope && dn1 < bound;
        }
        cert.steps.push_back(s);
    }
    if (cert.regime_ok) cert.envelope_holds = envelope;
    return cert;
}

}  // namespace iqvi
