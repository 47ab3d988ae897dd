#pragma once

#include "iqvi/analysis.hpp"
#include "iqvi/certification.hpp"
#include "iqvi/continuous_solver.hpp"
#include "iqvi/discrete_solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace iqvi::cli {

/// Shortest-exact-enough decimal: 17 significant digits.
std::string formatFull(double value);

/// Header t,x_1,...,x_n,residual[,dist]; one row per sample.
std::string trajectoryCsv(const Trajectory& traj);

/// Header n,x_1,...,x_n,residual,lambda[,dist]; lambda is empty on the last row.
std::string iterateCsv(const IterateLog& log);

nlohmann::json toJson(const ConditionReport& report);
nlohmann::json toJson(const SolutionCertificate& cert);
nlohmann::json toJson(const StepCertificate& cert);
nlohmann::json toJson(const EnvelopeReport& report);
nlohmann::json toJson(const LyapunovSeries& series);

/// {iterations, final_residual, termination}
nlohmann::json summaryJson(const IterateLog& log);
nlohmann::json summaryJson(const Trajectory& traj);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256Hex(const std::string& bytes);

// ---------------------------------------------------------------------------
// SVG line charts
// ---------------------------------------------------------------------------

struct PlotRun {
    std::string label;
    std::vector<double> abscissa;
    std::vector<Vector> states;
    std::vector<double> residuals;
};

PlotRun plotRun(const std::string& label, const Trajectory& traj);
PlotRun plotRun(const std::string& label, const IterateLog& log);

struct PlotOptions {
    std::string title;
    std::string x_label = "t";
    /// Plot log10(residual) instead of the state coordinates.
    bool residual_log_scale = false;
    int width = 800;
    int height = 500;
};

/**
 * Deterministic SVG: one polyline per coordinate per run (or one residual
 * polyline per run on a log10 axis), min-max autoscaled axes with a fixed
 * 10-interval grid. No external assets, no timestamps.
 *
 * @throws InputError on an empty run list, empty runs, or mixed dimensions.
 */
std::string emitPlot(const std::vector<PlotRun>& runs, const PlotOptions& options);

}  // namespace iqvi::cli
