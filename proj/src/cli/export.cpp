#include "iqvi/cli/export.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace iqvi::cli {

using nlohmann::json;

std::string formatFull(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string fixed2(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::string tickLabel(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(value) < 1e-300 ? 0.0 : value);
    return buf;
}

std::string escapeXml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

json vec(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::string trajectoryCsv(const Trajectory& traj) {
    std::ostringstream out;
    const bool dist = !traj.samples.empty() && traj.samples.front().dist_to_solution.has_value();
    const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().x.size();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << (i + 1);
    out << ",residual";
    if (dist) out << ",dist";
    out << "\n";
    for (const auto& s : traj.samples) {
        out << formatFull(s.t);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << formatFull(s.x[i]);
        out << ',' << formatFull(s.residual);
        if (dist) out << ',' << formatFull(s.dist_to_solution.value_or(std::nan("")));
        out << "\n";
    }
    return out.str();
}

std::string iterateCsv(const IterateLog& log) {
    std::ostringstream out;
    const bool dist = !log.entries.empty() && log.entries.front().dist_to_solution.has_value();
    const Eigen::Index n = log.entries.empty() ? 0 : log.entries.front().x.size();
    out << "n";
    for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << (i + 1);
    out << ",residual,lambda";
    if (dist) out << ",dist";
    out << "\n";
    for (const auto& e : log.entries) {
        out << e.n;
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << formatFull(e.x[i]);
        out << ',' << formatFull(e.residual) << ',';
        if (e.lambda_used) out << formatFull(*e.lambda_used);
        if (dist) out << ',' << formatFull(e.dist_to_solution.value_or(std::nan("")));
        out << "\n";
    }
    return out.str();
}

json toJson(const ConditionReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"label", e.label}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"satisfied", e.satisfied}});
    }
    json derived = json::object();
    for (const auto& [k, v] : report.derived) derived[k] = v;
    json out = {{"name", report.name}, {"entries", entries}, {"derived", derived}, {"verdict", report.verdict()}};
    if (!report.warnings.empty()) out["warnings"] = report.warnings;
    return out;
}

json toJson(const SolutionCertificate& cert) {
    return {{"membership_gap", cert.membership_gap},
            {"min_inner", cert.min_inner},
            {"samples_used", cert.samples_used},
            {"verdict", std::string(toString(cert.verdict))}};
}

json toJson(const StepCertificate& cert) {
    json steps = json::array();
    for (const auto& s : cert.steps) {
        json j = {{"n", s.n}, {"gain", s.gain}, {"ratio", s.ratio}};
        if (s.q) j["q"] = *s.q;
        if (s.passes) j["passes"] = *s.passes;
        steps.push_back(j);
    }
    json out = {{"regime_ok", cert.regime_ok},
                {"interval", {{"lower", cert.interval.lower}, {"upper", cert.interval.upper}}},
                {"effective_gain", cert.effective_gain},
                {"steps", steps},
                {"all_pass", cert.allPass()}};
    if (!cert.regime_note.empty()) out["note"] = cert.regime_note;
    if (cert.r) out["r"] = *cert.r;
    if (cert.envelope_holds) out["envelope_holds"] = *cert.envelope_holds;
    return out;
}

json toJson(const EnvelopeReport& report) {
    std::size_t normFails = 0;
    std::size_t squaredFails = 0;
    for (const auto& s : report.samples) {
        normFails += s.passes_norm_form ? 0 : 1;
        squaredFails += s.passes_squared_form ? 0 : 1;
    }
    return {{"lambda_coefficient", report.lambda_coefficient},
            {"epsilon", report.epsilon},
            {"samples_checked", report.samples.size()},
            {"skipped_below_floor", report.skipped_below_floor},
            {"norm_form_holds", report.norm_form_holds},
            {"norm_form_failures", normFails},
            {"squared_form_holds", report.squared_form_holds},
            {"squared_form_failures", squaredFails},
            {"worst_norm_excess", report.worst_norm_excess},
            {"slack_note", "epsilon includes an integrator-consistency allowance"}};
}

json toJson(const LyapunovSeries& series) {
    return {{"samples", series.V.size()},
            {"fraction_satisfied", series.fraction_satisfied},
            {"strictly_decreasing", series.strictly_decreasing},
            {"V_initial", series.V.front()},
            {"V_final", series.V.back()}};
}

json summaryJson(const IterateLog& log) {
    json out = {{"method", log.method},
                {"iterations", log.entries.empty() ? 0 : log.entries.back().n},
                {"final_residual", log.entries.empty() ? 0.0 : log.entries.back().residual},
                {"termination", std::string(toString(log.termination))}};
    if (!log.entries.empty()) out["final_x"] = vec(log.entries.back().x);
    if (log.theta) out["theta"] = *log.theta;
    if (!log.a_priori_bounds.empty()) out["a_priori_bound_final"] = log.a_priori_bounds.back();
    return out;
}

json summaryJson(const Trajectory& traj) {
    const auto& last = traj.samples.back();
    json out = {{"samples", traj.samples.size()},
                {"t_final", last.t},
                {"final_x", vec(last.x)},
                {"final_residual", last.residual},
                {"termination", std::string(toString(traj.termination))},
                {"substeps", traj.steps_taken},
                {"max_substep", traj.max_substep}};
    if (last.dist_to_solution) out["final_distance"] = *last.dist_to_solution;
    return out;
}

std::string sha256Hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

PlotRun plotRun(const std::string& label, const Trajectory& traj) {
    PlotRun run{label, {}, {}, {}};
    for (const auto& s : traj.samples) {
        run.abscissa.push_back(s.t);
        run.states.push_back(s.x);
        run.residuals.push_back(s.residual);
    }
    return run;
}

PlotRun plotRun(const std::string& label, const IterateLog& log) {
    PlotRun run{label, {}, {}, {}};
    for (const auto& e : log.entries) {
        run.abscissa.push_back(static_cast<double>(e.n));
        run.states.push_back(e.x);
        run.residuals.push_back(e.residual);
    }
    return run;
}

std::string emitPlot(const std::vector<PlotRun>& runs, const PlotOptions& options) {
    if (runs.empty()) throw InputError("emit_plot: no runs");
    const Eigen::Index dim = runs.front().states.empty() ? 0 : runs.front().states.front().size();
    for (const auto& r : runs) {
        if (r.abscissa.empty()) throw InputError("emit_plot: empty run '" + r.label + "'");
        if (r.states.size() != r.abscissa.size() || r.residuals.size() != r.abscissa.size()) {
            throw InputError("emit_plot: inconsistent run '" + r.label + "'");
        }
        for (const auto& s : r.states) {
            if (s.size() != dim) throw InputError("emit_plot: inconsistent dimension");
        }
    }

    // Each series is a list of (x, y) points.
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Series> series;
    for (const auto& r : runs) {
        if (options.residual_log_scale) {
            Series s{r.label + " residual", {}};
            for (std::size_t k = 0; k < r.abscissa.size(); ++k) {
                if (r.residuals[k] > 0.0) s.points.emplace_back(r.abscissa[k], std::log10(r.residuals[k]));
            }
            series.push_back(std::move(s));
        } else {
            for (Eigen::Index i = 0; i < dim; ++i) {
                Series s{r.label + " x_" + std::to_string(i + 1), {}};
                for (std::size_t k = 0; k < r.abscissa.size(); ++k) s.points.emplace_back(r.abscissa[k], r.states[k][i]);
                series.push_back(std::move(s));
            }
        }
    }

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }

    const double left = 80, right = 180, top = 40, bottom = 50;
    const double w = options.width, h = options.height;
    const double pw = w - left - right, ph = h - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"16\">" << escapeXml(options.title) << "</text>\n";
    }

    constexpr int ticks = 10;
    svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (int k = 0; k <= ticks; ++k) {
        const double gx = left + pw * k / ticks;
        const double gy = top + ph * k / ticks;
        svg << "<line x1=\"" << fixed2(gx) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(gx) << "\" y2=\""
            << fixed2(top + ph) << "\"/>\n";
        svg << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(gy) << "\" x2=\"" << fixed2(left + pw)
            << "\" y2=\"" << fixed2(gy) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << fixed2(left) << "\" y=\"" << fixed2(top) << "\" width=\"" << fixed2(pw) << "\" height=\""
        << fixed2(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int k = 0; k <= ticks; ++k) {
        const double xv = xmin + (xmax - xmin) * k / ticks;
        const double yv = ymin + (ymax - ymin) * k / ticks;
        svg << "<text x=\"" << fixed2(sx(xv)) << "\" y=\"" << fixed2(top + ph + 16)
            << "\" text-anchor=\"middle\">" << tickLabel(xv) << "</text>\n";
        const std::string ylabel = options.residual_log_scale ? "1e" + tickLabel(yv) : tickLabel(yv);
        svg << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(sy(yv) + 4) << "\" text-anchor=\"end\">"
            << ylabel << "</text>\n";
    }
    svg << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(h - 10) << "\" text-anchor=\"middle\">"
        << escapeXml(options.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << fixed2(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fixed2(top + ph / 2) << ")\">" << (options.residual_log_scale ? "residual (log10)" : "state") << "</text>\n";
    svg << "</g>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % 10];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[i].points.size(); ++k) {
            if (k) svg << ' ';
            svg << fixed2(sx(series[i].points[k].first)) << ',' << fixed2(sy(series[i].points[k].second));
        }
        svg << "\"/>\n";
        const double ly = top + 12 + 14.0 * static_cast<double>(i);
        svg << "<line x1=\"" << fixed2(left + pw + 10) << "\" y1=\"" << fixed2(ly) << "\" x2=\"" << fixed2(left + pw + 30)
            << "\" y2=\"" << fixed2(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fixed2(left + pw + 34) << "\" y=\"" << fixed2(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escapeXml(series[i].name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace iqvi::cli
