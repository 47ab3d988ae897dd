#include "iqvi/cli/runner.hpp"

#include "iqvi/analysis.hpp"
#include "iqvi/certification.hpp"
#include "iqvi/cli/export.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>

namespace iqvi::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Collects every artifact in memory; flush() is the only place that touches the disk.
class ArtifactWriter {
public:
    void add(const std::string& path, std::string content) {
        std::lock_guard<std::mutex> lock(mutex_);
        files_[path] = std::move(content);
    }

    std::vector<std::string> flush(const std::string& dir, const json& header) {
        std::lock_guard<std::mutex> lock(mutex_);
        json listing = json::array();
        std::vector<std::string> paths;
        for (const auto& [path, content] : files_) {
            write(dir, path, content);
            listing.push_back({{"path", path}, {"bytes", content.size()}, {"sha256", sha256Hex(content)}});
            paths.push_back(path);
        }
        json manifest = header;
        manifest["files"] = listing;
        write(dir, "manifest.json", manifest.dump(2) + "\n");
        return paths;
    }

private:
    static void write(const std::string& dir, const std::string& rel, const std::string& content) {
        const fs::path path = fs::path(dir) / rel;
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }

    std::mutex mutex_;
    std::map<std::string, std::string> files_;
};

std::string dumpJson(const json& j) { return j.dump(2) + "\n"; }

struct Exec {
    const RunSpec& spec;
    std::string prefix;
    ArtifactWriter& writer;
    std::vector<std::string>& messages;
    int exit_code = kExitOk;

    void raise(int code, const std::string& message) {
        exit_code = std::max(exit_code, code);
        messages.push_back(prefix + message);
    }
    void emit(const std::string& name, std::string content) { writer.add(prefix + name, std::move(content)); }
};

std::optional<Vector> knownSolution(const SolverSpec& s) {
    if (s.x_star) return toVector(*s.x_star);
    if (s.expect) return toVector(s.expect->solution);
    return std::nullopt;
}

/// Check against the spec's expect block; returns the JSON fragment.
json compareExpect(Exec& ex, const Vector& final_x, const std::string& run) {
    const auto& e = *ex.spec.solver.expect;
    const double d = (final_x - toVector(e.solution)).norm();
    const bool met = d <= e.max_final_distance;
    if (!met) ex.raise(kExitNumeric, run + ": final distance " + formatFull(d) + " exceeds expectation");
    return {{"distance", d}, {"max_final_distance", e.max_final_distance}, {"met", met}};
}

void emitPlotFile(Exec& ex, const std::vector<PlotRun>& runs, const std::string& title, const std::string& x_label) {
    if (!ex.spec.output.svg || runs.empty()) return;
    PlotOptions opt;
    opt.title = title;
    opt.x_label = x_label;
    opt.residual_log_scale = ex.spec.output.plot == PlotKind::residual;
    ex.emit("plot.svg", emitPlot(runs, opt));
}

GainInterval deriveRegime(const ConstantsBundle& c) {
    double center = 1.0 / c.alpha;
    try {
        center = optimalLambda(c);
    } catch (const Error&) {
    }
    GainInterval last{0.5 * center, 1.5 * center};
    for (double w = 0.5 * center; w > 1e-6 * center; w *= 0.5) {
        last = {center - w, center + w};
        try {
            if (checkDiscrete(c, last.lower, last.upper).verdict()) return last;
        } catch (const Error&) {
        }
    }
    return last;
}

json constantsJson(const ConstantsBundle& c) {
    json j = {{"L", c.L}, {"beta", c.beta}, {"kappa", c.kappa}, {"l", c.l}, {"alpha", c.alpha}};
    const auto lower = feasibleAlphaLower(c.L, c.beta, c.kappa);
    j["feasible_alpha_lower"] = lower ? json(*lower) : json(nullptr);
    try {
        j["optimal_lambda"] = optimalLambda(c);
    } catch (const Error&) {
        j["optimal_lambda"] = nullptr;
    }
    try {
        j["he_rate"] = heRate(c);
    } catch (const Error&) {
        j["he_rate"] = nullptr;
    }
    return j;
}

void runCheck(Exec& ex, const ProblemInstance& problem) {
    const ConstantsBundle c = ConstantsBundle::fromProblem(problem);
    const auto& s = ex.spec.solver;
    const LambdaSchedule schedule = s.schedule ? buildSchedule(*s.schedule) : LambdaSchedule::constant(1.0);
    const GainInterval regime = s.regime ? *s.regime : deriveRegime(c);

    const ConditionReport existence = checkExistence(c);
    const ConditionReport stability = checkStability(c, schedule);
    const ConditionReport discrete = checkDiscrete(c, regime.lower, regime.upper);

    json d = toJson(discrete);
    d["interval"] = {{"lower", regime.lower}, {"upper", regime.upper}, {"source", s.regime ? "spec" : "derived"}};
    json st = toJson(stability);
    st["schedule_source"] = s.schedule ? "spec" : "default constant gain 1";

    if (ex.spec.output.json) {
        ex.emit("existence.json", dumpJson(toJson(existence)));
        ex.emit("stability.json", dumpJson(st));
        ex.emit("discrete.json", dumpJson(d));
        ex.emit("constants.json", dumpJson(constantsJson(c)));
    }
    for (const auto* r : {&existence, &stability, &discrete}) {
        if (!r->verdict()) ex.raise(kExitRegime, r->name + ": conditions not satisfied");
    }
}

void runOde(Exec& ex, const ProblemInstance& problem) {
    const auto& s = ex.spec.solver;
    const ConstantsBundle c = ConstantsBundle::fromProblem(problem);
    const LambdaSchedule schedule = buildSchedule(*s.schedule);
    const ConditionReport stability = checkStability(c, schedule);
    if (!stability.verdict()) ex.raise(kExitRegime, "stability conditions fail; integrating anyway");
    const auto xs = knownSolution(s);

    json runs = json::array();
    std::vector<PlotRun> plots;
    for (std::size_t k = 0; k < s.x0.size(); ++k) {
        const std::string name = "run_" + std::to_string(k + 1);
        json r = {{"run", name}, {"x0", s.x0[k]}};
        Trajectory traj;
        try {
            traj = integrate(problem, schedule, toVector(s.x0[k]), s.integrator, s.tol, xs);
        } catch (const NumericError& e) {
            ex.raise(kExitNumeric, name + ": " + e.what());
            r["error"] = e.what();
            runs.push_back(r);
            continue;
        }
        if (ex.spec.output.csv) ex.emit(name + ".csv", trajectoryCsv(traj));
        r.update(summaryJson(traj));
        if (traj.termination == Termination::diverged) ex.raise(kExitNumeric, name + ": diverged");
        if (xs) {
            if (stability.verdict()) r["envelope"] = toJson(rateEnvelope(traj, *xs, c, schedule));
            if (traj.samples.size() >= 3) r["lyapunov"] = toJson(lyapunovSeries(traj, *xs, c, schedule));
        }
        if (s.expect) r["expect"] = compareExpect(ex, traj.samples.back().x, name);
        plots.push_back(plotRun(name, traj));
        runs.push_back(r);
    }
    emitPlotFile(ex, plots, "solve-ode", "t");
    if (ex.spec.output.json) {
        ex.emit("summary.json", dumpJson({{"mode", "solve-ode"},
                                          {"method", std::string(toString(s.integrator.method))},
                                          {"stability", toJson(stability)},
                                          {"runs", runs}}));
    }
}

/// Shared tail for the discrete solvers: CSV, summary, convergence and expectation.
json finishLog(Exec& ex, const IterateLog& log, const std::string& name, std::vector<PlotRun>& plots) {
    if (ex.spec.output.csv) ex.emit(name + ".csv", iterateCsv(log));
    json r = summaryJson(log);
    r["run"] = name;
    if (log.termination != IterTermination::residual_below_tol) {
        ex.raise(kExitNumeric, name + ": stopped by " + std::string(toString(log.termination)));
    }
    if (ex.spec.solver.expect && !log.entries.empty()) r["expect"] = compareExpect(ex, log.entries.back().x, name);
    plots.push_back(plotRun(name, log));
    return r;
}

double maxStepRatio(const IterateLog& log, const Vector& xs) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < log.entries.size(); ++i) {
        const double dn = (log.entries[i].x - xs).norm();
        if (dn > kEnvelopeFloor) worst = std::max(worst, (log.entries[i + 1].x - xs).norm() / dn);
    }
    return worst;
}

void runDiscrete(Exec& ex, const ProblemInstance& problem) {
    const auto& s = ex.spec.solver;
    const ConstantsBundle c = ConstantsBundle::fromProblem(problem);
    const auto xs = knownSolution(s);

    json runs = json::array();
    std::vector<PlotRun> plots;
    for (std::size_t k = 0; k < s.x0.size(); ++k) {
        const std::string name = "run_" + std::to_string(k + 1);
        const Vector x0 = toVector(s.x0[k]);
        IterateLog log;
        try {
            switch (s.mode) {
                case Mode::solve_iter: {
                    IterationConfig cfg;
                    cfg.lambda_seq = buildLambdaSequence(*s.lambda_seq);
                    cfg.step_scale = s.step_scale;
                    cfg.tol = s.tol;
                    cfg.max_iter = s.max_iter;
                    log = iterate(problem, cfg, x0, xs);
                    break;
                }
                case Mode::solve_banach: log = banachIterate(problem, x0, s.tol, s.max_iter, xs); break;
                default: log = heIterate(problem, x0, s.tol, s.max_iter, xs); break;
            }
        } catch (const SolverFailure& e) {
            ex.raise(kExitNumeric, name + ": " + e.what());
            json r = finishLog(ex, e.log(), name, plots);
            r["error"] = e.what();
            runs.push_back(r);
            continue;
        }
        json r = finishLog(ex, log, name, plots);
        r["x0"] = s.x0[k];

        if (s.mode == Mode::solve_iter) {
            if (xs) {
                const StepCertificate cert = perStepCertificate(log, *xs, c, s.regime);
                r["certificate"] = toJson(cert);
                if (!cert.regime_ok) ex.raise(kExitRegime, name + ": " + cert.regime_note);
            } else if (s.regime) {
                bool inside = true;
                for (const auto& e : log.entries) {
                    if (e.lambda_used) inside = inside && *e.lambda_used > s.regime->lower && *e.lambda_used < s.regime->upper;
                }
                const ConditionReport rep = checkDiscrete(c, s.regime->lower, s.regime->upper);
                r["regime"] = {{"gains_inside", inside}, {"report", toJson(rep)}};
                if (!inside || !rep.verdict()) ex.raise(kExitRegime, name + ": gains outside the verified interval");
            }
        } else if (xs) {
            r["max_step_ratio"] = maxStepRatio(log, *xs);
            r["rate_bound"] = s.mode == Mode::solve_banach ? contractionTheta(c) : heRate(c);
        }
        runs.push_back(r);
    }
    const std::string mode(toString(s.mode));
    emitPlotFile(ex, plots, mode, "n");
    if (ex.spec.output.json) ex.emit("summary.json", dumpJson({{"mode", mode}, {"runs", runs}}));
}

void runCertify(Exec& ex, const ProblemInstance& problem) {
    const auto& s = ex.spec.solver;
    json points = json::array();
    for (const auto& x : s.x0) {
        const SolutionCertificate cert = certifySolution(problem, toVector(x), s.seed, s.samples, s.tol);
        json j = toJson(cert);
        j["x"] = x;
        points.push_back(j);
    }
    if (ex.spec.output.json) ex.emit("certificate.json", dumpJson({{"mode", "certify"}, {"points", points}}));
}

RunSpec applySeed(RunSpec spec, const RunOptions& options) {
    if (options.seed) {
        spec.solver.seed = *options.seed;
        if (spec.solver.lambda_seq && spec.solver.lambda_seq->kind == LambdaSeqSpec::Kind::seeded_uniform) {
            spec.solver.lambda_seq->seed = *options.seed;
        }
    }
    return spec;
}

void execute(Exec& ex);

void runReproduce(Exec& ex, const RunOptions& options) {
    json results = json::array();
    for (const auto& name : bundledSpecNames()) {
        const std::string stem = name.substr(0, name.find('.'));
        const RunSpec sub = applySeed(parseSpec(bundledSpec(name)), options);
        Exec inner{sub, ex.prefix + stem + "/", ex.writer, ex.messages};
        execute(inner);
        ex.exit_code = std::max(ex.exit_code, inner.exit_code);
        results.push_back({{"spec", name}, {"exit_code", inner.exit_code}, {"matches_expectation", inner.exit_code == kExitOk}});
    }
    if (ex.spec.output.json) ex.emit("reproduce.json", dumpJson({{"mode", "reproduce"}, {"results", results}}));
}

void execute(Exec& ex) {
    try {
        const ProblemInstance problem = buildProblem(*ex.spec.problem);
        switch (ex.spec.solver.mode) {
            case Mode::check: runCheck(ex, problem); break;
            case Mode::solve_ode: runOde(ex, problem); break;
            case Mode::solve_iter:
            case Mode::solve_banach:
            case Mode::solve_he: runDiscrete(ex, problem); break;
            case Mode::certify: runCertify(ex, problem); break;
            case Mode::reproduce: break;
        }
    } catch (const ParameterError& e) {
        ex.raise(kExitRegime, e.what());
    } catch (const InputError& e) {
        ex.raise(kExitValidation, e.what());
    } catch (const Error& e) {
        ex.raise(kExitNumeric, e.what());
    }
}

json manifestHeader(std::string_view mode, int exit_code, const std::vector<std::string>& messages) {
    return {{"mode", std::string(mode)}, {"exit_code", exit_code}, {"errors", messages}};
}

}  // namespace

std::string resolveOutputDir(const std::optional<std::string>& cli, const std::optional<std::string>& spec_dir) {
    if (cli) return *cli;
    if (spec_dir) return *spec_dir;
    if (const char* env = std::getenv("IQVI_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "iqvi_out";
}

RunResult run(const RunSpec& input, const RunOptions& options) {
    const RunSpec spec = applySeed(input, options);
    RunResult result;
    result.out_dir = resolveOutputDir(options.out_dir, spec.output.directory);

    ArtifactWriter writer;
    Exec ex{spec, "", writer, result.messages};
    if (spec.solver.mode == Mode::reproduce) {
        try {
            runReproduce(ex, options);
        } catch (const InputError& e) {
            ex.raise(kExitValidation, e.what());
        }
    } else {
        execute(ex);
    }
    result.exit_code = ex.exit_code;
    result.files = writer.flush(result.out_dir, manifestHeader(toString(spec.solver.mode), ex.exit_code, result.messages));
    result.summary = manifestHeader(toString(spec.solver.mode), ex.exit_code, result.messages);
    return result;
}

RunResult reportInvalid(const std::vector<std::string>& errors, std::string_view mode, const RunOptions& options) {
    RunResult result;
    result.exit_code = kExitValidation;
    result.messages = errors;
    result.out_dir = resolveOutputDir(options.out_dir, std::nullopt);
    ArtifactWriter writer;
    writer.flush(result.out_dir, manifestHeader(mode, kExitValidation, errors));
    result.summary = manifestHeader(mode, kExitValidation, errors);
    return result;
}

}  // namespace iqvi::cli
