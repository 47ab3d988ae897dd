#pragma once

#include "iqvi/continuous_solver.hpp"
#include "iqvi/convex_sets.hpp"
#include "iqvi/discrete_solver.hpp"
#include "iqvi/problem_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace iqvi::cli {

enum class Mode { check, solve_ode, solve_iter, solve_banach, solve_he, certify, reproduce };

std::string_view toString(Mode mode);
std::optional<Mode> modeFromString(std::string_view name);

struct AffineSpec {
    std::vector<std::vector<double>> matrix;
    std::vector<double> shift;
};
struct ScaledIdentitySpec {
    double factor;
};
struct ComponentwiseSpec {
    std::vector<std::string> functions;
};

struct MappingSpec {
    std::variant<AffineSpec, ScaledIdentitySpec, ComponentwiseSpec> kind;
    std::optional<double> lipschitz;
    std::optional<double> monotonicity;
};

struct MovingSetSpec {
    std::optional<MappingSpec> shift_map;  ///< empty for a constant set
    ConvexSet base;
};

struct ProblemSpec {
    int dim;
    MappingSpec mapping;
    MovingSetSpec moving_set;
    double alpha;
};

struct ScheduleSpec {
    bool polynomial = false;
    double gain = 1.0;  ///< constant schedules
    double a = 1.0, b = 0.0, p = 0.0;
};

struct LambdaSeqSpec {
    enum class Kind { constant, cyclic, seeded_uniform } kind = Kind::constant;
    double value = 0.1;
    std::vector<double> values;
    double lower = 0.0, upper = 0.0;
    std::uint64_t seed = 0;
};

struct ExpectSpec {
    std::vector<double> solution;
    double max_final_distance;
};

struct SolverSpec {
    Mode mode = Mode::check;
    std::optional<ScheduleSpec> schedule;
    IntegratorConfig integrator;
    std::optional<LambdaSeqSpec> lambda_seq;
    double step_scale = 1.0;
    std::optional<GainInterval> regime;
    std::vector<std::vector<double>> x0;
    std::optional<std::vector<double>> x_star;
    double tol = 1e-8;
    int max_iter = 10000;
    std::uint64_t seed = 1;
    std::size_t samples = 256;
    std::optional<ExpectSpec> expect;
};

enum class PlotKind { coordinates, residual };

struct OutputSpec {
    std::optional<std::string> directory;
    bool csv = true;
    bool json = true;
    bool svg = true;
    PlotKind plot = PlotKind::coordinates;
};

/// One spec file = one reproducible run.
struct RunSpec {
    std::optional<ProblemSpec> problem;  ///< required by every mode except reproduce
    SolverSpec solver;
    OutputSpec output;
};

/// Schema violation; `errors` holds one "<json-pointer>: message" per offending path.
class SpecError : public InputError {
public:
    explicit SpecError(std::vector<std::string> errors);
    [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// Parses and fully validates a JSON run specification.
/// @throws SpecError on malformed JSON (with location) or schema violations.
RunSpec parseSpec(std::string_view text);
RunSpec parseSpec(const nlohmann::json& document);

/// Canonical JSON form; parseSpec(toJson(s)) reproduces s.
nlohmann::json toJson(const RunSpec& spec);
nlohmann::json toJson(const ConvexSet& set);

ProblemInstance buildProblem(const ProblemSpec& spec);
Mapping buildMapping(const MappingSpec& spec, int dim);
LambdaSchedule buildSchedule(const ScheduleSpec& spec);
LambdaSequence buildLambdaSequence(const LambdaSeqSpec& spec);

Vector toVector(const std::vector<double>& values);

}  // namespace iqvi::cli
