#include "iqvi/cli/run_spec.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace iqvi::cli {

using nlohmann::json;

namespace {

const std::pair<Mode, std::string_view> kModes[] = {
    {Mode::check, "check"},         {Mode::solve_ode, "solve-ode"}, {Mode::solve_iter, "solve-iter"},
    {Mode::solve_banach, "solve-banach"}, {Mode::solve_he, "solve-he"}, {Mode::certify, "certify"},
    {Mode::reproduce, "reproduce"},
};

std::string joinErrors(const std::vector<std::string>& errors) {
    std::string out = "invalid run spec:";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
}

/// Accumulates schema errors keyed by JSON pointer.
class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& message) {
        errors.push_back((path.empty() ? "/" : path) + ": " + message);
    }

    bool object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [key, value] : j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(path + "/" + key, "unknown key");
            }
        }
        return true;
    }

    const json* field(const json& obj, const std::string& key, const std::string& path, bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "/" + key, "required");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& path, bool required) {
        const json* v = field(obj, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(path + "/" + key, "expected a number");
            return std::nullopt;
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) {
            fail(path + "/" + key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<long long> integer(const json& obj, const std::string& key, const std::string& path, bool required) {
        const json* v = field(obj, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number_integer()) {
            fail(path + "/" + key, "expected an integer");
            return std::nullopt;
        }
        return v->get<long long>();
    }

    std::optional<std::uint64_t> seed(const json& obj, const std::string& key, const std::string& path) {
        const json* v = field(obj, key, path, false);
        if (!v) return std::nullopt;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
            fail(path + "/" + key, "expected a nonnegative integer");
            return std::nullopt;
        }
        return v->get<std::uint64_t>();
    }

    std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path, bool required) {
        const json* v = field(obj, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(path + "/" + key, "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
        if (!v.is_array()) {
            fail(path, "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                fail(path + "/" + std::to_string(i), "expected a finite number");
                return std::nullopt;
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::optional<std::vector<double>> numbers(const json& obj, const std::string& key, const std::string& path,
                                               bool required) {
        const json* v = field(obj, key, path, required);
        if (!v) return std::nullopt;
        return numbers(*v, path + "/" + key);
    }

    template <class F>
    auto guarded(const std::string& path, F&& build) -> std::optional<decltype(build())> {
        try {
            return build();
        } catch (const InputError& e) {
            fail(path, e.what());
        }
        return std::nullopt;
    }
};

std::optional<ConvexSet> readSet(Reader& r, const json& j, const std::string& path) {
    if (!j.is_object()) {
        r.fail(path, "expected an object");
        return std::nullopt;
    }
    const auto kind = r.string(j, "kind", path, true);
    if (!kind) return std::nullopt;
    if (*kind == "ball") {
        if (!r.object(j, path, {"kind", "center", "radius"})) return std::nullopt;
        auto center = r.numbers(j, "center", path, true);
        auto radius = r.number(j, "radius", path, true);
        if (!center || !radius) return std::nullopt;
        return r.guarded(path, [&] { return ConvexSet::ball(toVector(*center), *radius); });
    }
    if (*kind == "box") {
        if (!r.object(j, path, {"kind", "lower", "upper"})) return std::nullopt;
        auto lo = r.numbers(j, "lower", path, true);
        auto hi = r.numbers(j, "upper", path, true);
        if (!lo || !hi) return std::nullopt;
        return r.guarded(path, [&] { return ConvexSet::box(toVector(*lo), toVector(*hi)); });
    }
    if (*kind == "halfspace") {
        if (!r.object(j, path, {"kind", "normal", "offset"})) return std::nullopt;
        auto normal = r.numbers(j, "normal", path, true);
        auto offset = r.number(j, "offset", path, true);
        if (!normal || !offset) return std::nullopt;
        return r.guarded(path, [&] { return ConvexSet::halfspace(toVector(*normal), *offset); });
    }
    if (*kind == "simplex") {
        if (!r.object(j, path, {"kind", "dim", "scale"})) return std::nullopt;
        auto dim = r.integer(j, "dim", path, true);
        auto scale = r.number(j, "scale", path, true);
        if (!dim || !scale) return std::nullopt;
        return r.guarded(path, [&] { return ConvexSet::simplex(static_cast<Eigen::Index>(*dim), *scale); });
    }
    if (*kind == "interval") {
        if (!r.object(j, path, {"kind", "lower", "upper"})) return std::nullopt;
        auto lo = r.number(j, "lower", path, true);
        auto hi = r.number(j, "upper", path, true);
        if (!lo || !hi) return std::nullopt;
        return r.guarded(path, [&] { return ConvexSet::interval(*lo, *hi); });
    }
    r.fail(path + "/kind", "unknown set kind '" + *kind + "'");
    return std::nullopt;
}

std::optional<MappingSpec> readMapping(Reader& r, const json& j, const std::string& path, int dim) {
    if (!j.is_object()) {
        r.fail(path, "expected an object");
        return std::nullopt;
    }
    const auto kind = r.string(j, "kind", path, true);
    if (!kind) return std::nullopt;
    MappingSpec spec{ScaledIdentitySpec{1.0}, std::nullopt, std::nullopt};
    bool ok = true;
    if (*kind == "scaled_identity") {
        ok = r.object(j, path, {"kind", "factor", "lipschitz", "monotonicity"});
        auto factor = r.number(j, "factor", path, true);
        if (!factor) return std::nullopt;
        spec.kind = ScaledIdentitySpec{*factor};
    } else if (*kind == "affine") {
        ok = r.object(j, path, {"kind", "matrix", "shift", "lipschitz", "monotonicity"});
        const json* m = r.field(j, "matrix", path, true);
        if (!m) return std::nullopt;
        AffineSpec a;
        if (!m->is_array() || m->size() != static_cast<std::size_t>(dim)) {
            r.fail(path + "/matrix", "expected " + std::to_string(dim) + " rows");
            return std::nullopt;
        }
        for (std::size_t i = 0; i < m->size(); ++i) {
            auto row = r.numbers((*m)[i], path + "/matrix/" + std::to_string(i));
            if (!row) return std::nullopt;
            if (row->size() != static_cast<std::size_t>(dim)) {
                r.fail(path + "/matrix/" + std::to_string(i), "expected " + std::to_string(dim) + " columns");
                return std::nullopt;
            }
            a.matrix.push_back(*row);
        }
        auto shift = r.numbers(j, "shift", path, false);
        a.shift = shift ? *shift : std::vector<double>(static_cast<std::size_t>(dim), 0.0);
        if (a.shift.size() != static_cast<std::size_t>(dim)) {
            r.fail(path + "/shift", "expected " + std::to_string(dim) + " entries");
            return std::nullopt;
        }
        spec.kind = std::move(a);
    } else if (*kind == "componentwise") {
        ok = r.object(j, path, {"kind", "functions", "lipschitz", "monotonicity"});
        const json* fns = r.field(j, "functions", path, true);
        if (!fns) return std::nullopt;
        ComponentwiseSpec c;
        if (fns->is_string()) {
            c.functions.assign(static_cast<std::size_t>(dim), fns->get<std::string>());
        } else if (fns->is_array()) {
            for (const auto& f : *fns) {
                if (!f.is_string()) {
                    r.fail(path + "/functions", "expected strings");
                    return std::nullopt;
                }
                c.functions.push_back(f.get<std::string>());
            }
        } else {
            r.fail(path + "/functions", "expected a name or an array of names");
            return std::nullopt;
        }
        for (std::size_t i = 0; i < c.functions.size(); ++i) {
            if (!scalarFunctionFromString(c.functions[i])) {
                r.fail(path + "/functions/" + std::to_string(i), "unknown function '" + c.functions[i] + "'");
                ok = false;
            }
        }
        if (c.functions.size() != static_cast<std::size_t>(dim)) {
            r.fail(path + "/functions", "expected " + std::to_string(dim) + " functions");
            ok = false;
        }
        spec.kind = std::move(c);
    } else {
        r.fail(path + "/kind", "unknown mapping kind '" + *kind + "'");
        return std::nullopt;
    }
    spec.lipschitz = r.number(j, "lipschitz", path, false);
    spec.monotonicity = r.number(j, "monotonicity", path, false);
    if (!ok) return std::nullopt;
    return spec;
}

std::optional<ProblemSpec> readProblem(Reader& r, const json& j, const std::string& path) {
    if (!r.object(j, path, {"dim", "mapping", "moving_set", "alpha"})) return std::nullopt;
    const auto dim = r.integer(j, "dim", path, true);
    const auto alpha = r.number(j, "alpha", path, true);
    if (dim && *dim <= 0) r.fail(path + "/dim", "must be positive");
    if (alpha && *alpha <= 0.0) r.fail(path + "/alpha", "must be positive");
    if (!dim || *dim <= 0) return std::nullopt;
    const int n = static_cast<int>(*dim);

    std::optional<MappingSpec> mapping;
    if (const json* m = r.field(j, "mapping", path, true)) mapping = readMapping(r, *m, path + "/mapping", n);

    std::optional<MovingSetSpec> moving;
    if (const json* ms = r.field(j, "moving_set", path, true)) {
        const std::string mpath = path + "/moving_set";
        const auto kind = ms->is_object() ? r.string(*ms, "kind", mpath, true) : std::nullopt;
        if (!ms->is_object()) r.fail(mpath, "expected an object");
        if (kind && *kind == "translated") {
            r.object(*ms, mpath, {"kind", "shift_map", "base"});
            std::optional<MappingSpec> shift;
            if (const json* s = r.field(*ms, "shift_map", mpath, true)) shift = readMapping(r, *s, mpath + "/shift_map", n);
            std::optional<ConvexSet> base;
            if (const json* b = r.field(*ms, "base", mpath, true)) base = readSet(r, *b, mpath + "/base");
            if (shift && base) moving = MovingSetSpec{shift, *base};
        } else if (kind && *kind == "constant") {
            r.object(*ms, mpath, {"kind", "base"});
            std::optional<ConvexSet> base;
            if (const json* b = r.field(*ms, "base", mpath, true)) base = readSet(r, *b, mpath + "/base");
            if (base) moving = MovingSetSpec{std::nullopt, *base};
        } else if (kind) {
            r.fail(mpath + "/kind", "unknown moving set kind '" + *kind + "'");
        }
        if (moving && moving->base.dim() != n) {
            r.fail(mpath + "/base", "dimension " + std::to_string(moving->base.dim()) + " does not match dim");
            moving.reset();
        }
    }
    if (!mapping || !moving || !alpha || *alpha <= 0.0) return std::nullopt;

    ProblemSpec spec{n, *mapping, *moving, *alpha};
    // Constant consistency and the monotonicity requirement on f surface here.
    if (!r.guarded(path, [&] { return buildProblem(spec).dim; })) return std::nullopt;
    return spec;
}

std::optional<ScheduleSpec> readSchedule(Reader& r, const json& j, const std::string& path) {
    if (!j.is_object()) {
        r.fail(path, "expected an object");
        return std::nullopt;
    }
    const auto kind = r.string(j, "kind", path, true);
    if (!kind) return std::nullopt;
    ScheduleSpec s;
    if (*kind == "constant") {
        r.object(j, path, {"kind", "gain"});
        auto gain = r.number(j, "gain", path, true);
        if (!gain) return std::nullopt;
        s.gain = *gain;
    } else if (*kind == "polynomial") {
        r.object(j, path, {"kind", "a", "b", "p"});
        auto a = r.number(j, "a", path, true);
        auto b = r.number(j, "b", path, true);
        auto p = r.number(j, "p", path, true);
        if (!a || !b || !p) return std::nullopt;
        s.polynomial = true;
        s.a = *a;
        s.b = *b;
        s.p = *p;
    } else {
        r.fail(path + "/kind", "unknown schedule kind '" + *kind + "'");
        return std::nullopt;
    }
    if (!r.guarded(path, [&] { return buildSchedule(s).a(); })) return std::nullopt;
    return s;
}

std::optional<LambdaSeqSpec> readLambdaSeq(Reader& r, const json& j, const std::string& path) {
    if (!j.is_object()) {
        r.fail(path, "expected an object");
        return std::nullopt;
    }
    const auto kind = r.string(j, "kind", path, true);
    if (!kind) return std::nullopt;
    LambdaSeqSpec s;
    if (*kind == "constant") {
        r.object(j, path, {"kind", "value"});
        auto v = r.number(j, "value", path, true);
        if (!v) return std::nullopt;
        s.kind = LambdaSeqSpec::Kind::constant;
        s.value = *v;
    } else if (*kind == "cyclic") {
        r.object(j, path, {"kind", "values"});
        auto v = r.numbers(j, "values", path, true);
        if (!v) return std::nullopt;
        s.kind = LambdaSeqSpec::Kind::cyclic;
        s.values = *v;
    } else if (*kind == "seeded_uniform") {
        r.object(j, path, {"kind", "lower", "upper", "seed"});
        auto lo = r.number(j, "lower", path, true);
        auto hi = r.number(j, "upper", path, true);
        auto seed = r.seed(j, "seed", path);
        if (!lo || !hi) return std::nullopt;
        s.kind = LambdaSeqSpec::Kind::seeded_uniform;
        s.lower = *lo;
        s.upper = *hi;
        s.seed = seed.value_or(0);
    } else {
        r.fail(path + "/kind", "unknown lambda_seq kind '" + *kind + "'");
        return std::nullopt;
    }
    if (!r.guarded(path, [&] { return buildLambdaSequence(s).variant().index(); })) return std::nullopt;
    return s;
}

void readIntegrator(Reader& r, const json& j, const std::string& path, IntegratorConfig& cfg) {
    if (!r.object(j, path, {"method", "base_step", "t0", "t_end", "record_every", "stiffness_cap", "divergence_radius"})) {
        return;
    }
    if (auto m = r.string(j, "method", path, false)) {
        if (*m == "rk4") {
            cfg.method = IntegrationMethod::rk4;
        } else if (*m == "explicit-euler") {
            cfg.method = IntegrationMethod::explicit_euler;
        } else {
            r.fail(path + "/method", "unknown method '" + *m + "'");
        }
    }
    if (auto v = r.number(j, "base_step", path, false)) cfg.base_step = *v;
    if (auto v = r.number(j, "t0", path, false)) cfg.t0 = *v;
    if (auto v = r.number(j, "t_end", path, false)) cfg.t_end = *v;
    if (auto v = r.integer(j, "record_every", path, false)) cfg.record_every = static_cast<int>(*v);
    if (auto v = r.number(j, "stiffness_cap", path, false)) cfg.stiffness_cap = *v;
    if (auto v = r.number(j, "divergence_radius", path, false)) cfg.divergence_radius = *v;
    r.guarded(path, [&] {
        cfg.validate();
        return true;
    });
}

void readSolver(Reader& r, const json& j, const std::string& path, SolverSpec& s, std::optional<int> dim) {
    if (!r.object(j, path,
                  {"mode", "schedule", "integrator", "lambda_seq", "step_scale", "regime", "x0", "x_star", "tol",
                   "max_iter", "seed", "samples", "expect"})) {
        return;
    }
    if (auto m = r.string(j, "mode", path, true)) {
        if (auto mode = modeFromString(*m)) {
            s.mode = *mode;
        } else {
            r.fail(path + "/mode", "unknown solver mode '" + *m + "'");
        }
    }
    if (const json* v = r.field(j, "schedule", path, false)) s.schedule = readSchedule(r, *v, path + "/schedule");
    if (const json* v = r.field(j, "integrator", path, false)) readIntegrator(r, *v, path + "/integrator", s.integrator);
    if (const json* v = r.field(j, "lambda_seq", path, false)) s.lambda_seq = readLambdaSeq(r, *v, path + "/lambda_seq");
    if (auto v = r.number(j, "step_scale", path, false)) {
        if (*v <= 0.0) r.fail(path + "/step_scale", "must be positive");
        s.step_scale = *v;
    }
    if (const json* v = r.field(j, "regime", path, false)) {
        const std::string rp = path + "/regime";
        if (r.object(*v, rp, {"lower", "upper"})) {
            auto lo = r.number(*v, "lower", rp, true);
            auto hi = r.number(*v, "upper", rp, true);
            if (lo && hi) {
                if (!(*lo > 0.0 && *lo < *hi)) r.fail(rp, "requires 0 < lower < upper");
                s.regime = GainInterval{*lo, *hi};
            }
        }
    }
    auto checkDim = [&](const std::vector<double>& v, const std::string& p) {
        if (dim && v.size() != static_cast<std::size_t>(*dim)) {
            r.fail(p, "expected " + std::to_string(*dim) + " entries");
        }
    };
    if (const json* v = r.field(j, "x0", path, false)) {
        if (!v->is_array()) {
            r.fail(path + "/x0", "expected an array of points");
        } else {
            for (std::size_t i = 0; i < v->size(); ++i) {
                const std::string p = path + "/x0/" + std::to_string(i);
                if (auto pt = r.numbers((*v)[i], p)) {
                    checkDim(*pt, p);
                    s.x0.push_back(*pt);
                }
            }
        }
    }
    if (auto v = r.numbers(j, "x_star", path, false)) {
        checkDim(*v, path + "/x_star");
        s.x_star = *v;
    }
    if (auto v = r.number(j, "tol", path, false)) {
        if (*v < 0.0) r.fail(path + "/tol", "must be nonnegative");
        s.tol = *v;
    }
    if (auto v = r.integer(j, "max_iter", path, false)) {
        if (*v < 1) r.fail(path + "/max_iter", "must be positive");
        s.max_iter = static_cast<int>(*v);
    }
    if (auto v = r.seed(j, "seed", path)) s.seed = *v;
    if (auto v = r.integer(j, "samples", path, false)) {
        if (*v < 16) r.fail(path + "/samples", "must be at least 16");
        s.samples = static_cast<std::size_t>(std::max<long long>(*v, 0));
    }
    if (const json* v = r.field(j, "expect", path, false)) {
        const std::string ep = path + "/expect";
        if (r.object(*v, ep, {"solution", "max_final_distance"})) {
            auto sol = r.numbers(*v, "solution", ep, true);
            auto dist = r.number(*v, "max_final_distance", ep, true);
            if (sol && dist) {
                checkDim(*sol, ep + "/solution");
                s.expect = ExpectSpec{*sol, *dist};
            }
        }
    }

    const bool needsPoints = s.mode != Mode::check && s.mode != Mode::reproduce;
    if (needsPoints && s.x0.empty()) r.fail(path + "/x0", "at least one point required for " + std::string(toString(s.mode)));
    if (s.mode == Mode::solve_ode && !s.schedule) r.fail(path + "/schedule", "required for solve-ode");
    if (s.mode == Mode::solve_iter && !s.lambda_seq) r.fail(path + "/lambda_seq", "required for solve-iter");
}

void readOutput(Reader& r, const json& j, const std::string& path, OutputSpec& o) {
    if (!r.object(j, path, {"directory", "formats", "plot"})) return;
    o.directory = r.string(j, "directory", path, false);
    if (const json* f = r.field(j, "formats", path, false)) {
        if (!f->is_array()) {
            r.fail(path + "/formats", "expected an array");
        } else {
            o.csv = o.json = o.svg = false;
            for (std::size_t i = 0; i < f->size(); ++i) {
                const auto name = (*f)[i].is_string() ? (*f)[i].get<std::string>() : std::string();
                if (name == "csv") {
                    o.csv = true;
                } else if (name == "json") {
                    o.json = true;
                } else if (name == "svg") {
                    o.svg = true;
                } else {
                    r.fail(path + "/formats/" + std::to_string(i), "expected one of csv, json, svg");
                }
            }
        }
    }
    if (auto p = r.string(j, "plot", path, false)) {
        if (*p == "coordinates") {
            o.plot = PlotKind::coordinates;
        } else if (*p == "residual") {
            o.plot = PlotKind::residual;
        } else {
            r.fail(path + "/plot", "expected coordinates or residual");
        }
    }
}

json mappingJson(const MappingSpec& m) {
    json j;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, AffineSpec>) {
                j["kind"] = "affine";
                j["matrix"] = k.matrix;
                j["shift"] = k.shift;
            } else if constexpr (std::is_same_v<T, ScaledIdentitySpec>) {
                j["kind"] = "scaled_identity";
                j["factor"] = k.factor;
            } else {
                j["kind"] = "componentwise";
                j["functions"] = k.functions;
            }
        },
        m.kind);
    if (m.lipschitz) j["lipschitz"] = *m.lipschitz;
    if (m.monotonicity) j["monotonicity"] = *m.monotonicity;
    return j;
}

std::vector<double> toStd(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string_view toString(Mode mode) {
    for (const auto& [m, name] : kModes) {
        if (m == mode) return name;
    }
    return "unknown";
}

std::optional<Mode> modeFromString(std::string_view name) {
    for (const auto& [m, n] : kModes) {
        if (n == name) return m;
    }
    return std::nullopt;
}

SpecError::SpecError(std::vector<std::string> errors) : InputError(joinErrors(errors)), errors_(std::move(errors)) {}

RunSpec parseSpec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SpecError({"parse error at byte " + std::to_string(e.byte) + ": " + e.what()});
    }
    return parseSpec(doc);
}

RunSpec parseSpec(const json& doc) {
    Reader r;
    RunSpec spec;
    if (!r.object(doc, "", {"problem", "solver", "output"})) throw SpecError(r.errors);

    std::optional<int> dim;
    if (const json* p = r.field(doc, "problem", "", false)) {
        spec.problem = readProblem(r, *p, "/problem");
        if (spec.problem) {
            dim = spec.problem->dim;
        } else if (p->is_object() && p->contains("dim") && (*p)["dim"].is_number_integer()) {
            dim = (*p)["dim"].get<int>();
        }
    }
    if (const json* s = r.field(doc, "solver", "", true)) readSolver(r, *s, "/solver", spec.solver, dim);
    if (const json* o = r.field(doc, "output", "", false)) readOutput(r, *o, "/output", spec.output);

    if (!spec.problem && !doc.contains("problem") && spec.solver.mode != Mode::reproduce) {
        r.fail("/problem", "required for mode " + std::string(toString(spec.solver.mode)));
    }
    if (!r.errors.empty()) throw SpecError(r.errors);
    return spec;
}

json toJson(const ConvexSet& set) {
    json j;
    j["kind"] = std::string(toString(set.kind()));
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ball>) {
                j["center"] = toStd(s.center);
                j["radius"] = s.radius;
            } else if constexpr (std::is_same_v<T, Box>) {
                j["lower"] = toStd(s.lower);
                j["upper"] = toStd(s.upper);
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                j["normal"] = toStd(s.normal);
                j["offset"] = s.offset;
            } else if constexpr (std::is_same_v<T, Simplex>) {
                j["dim"] = s.dim;
                j["scale"] = s.scale;
            } else {
                j["lower"] = s.lower;
                j["upper"] = s.upper;
            }
        },
        set.variant());
    return j;
}

json toJson(const RunSpec& spec) {
    json j;
    if (spec.problem) {
        const auto& p = *spec.problem;
        json ms;
        if (p.moving_set.shift_map) {
            ms["kind"] = "translated";
            ms["shift_map"] = mappingJson(*p.moving_set.shift_map);
        } else {
            ms["kind"] = "constant";
        }
        ms["base"] = toJson(p.moving_set.base);
        j["problem"] = {{"dim", p.dim}, {"mapping", mappingJson(p.mapping)}, {"moving_set", ms}, {"alpha", p.alpha}};
    }

    const auto& s = spec.solver;
    json sj;
    sj["mode"] = std::string(toString(s.mode));
    if (s.schedule) {
        if (s.schedule->polynomial) {
            sj["schedule"] = {{"kind", "polynomial"}, {"a", s.schedule->a}, {"b", s.schedule->b}, {"p", s.schedule->p}};
        } else {
            sj["schedule"] = {{"kind", "constant"}, {"gain", s.schedule->gain}};
        }
    }
    sj["integrator"] = {{"method", std::string(toString(s.integrator.method))},
                        {"base_step", s.integrator.base_step},
                        {"t0", s.integrator.t0},
                        {"t_end", s.integrator.t_end},
                        {"record_every", s.integrator.record_every},
                        {"stiffness_cap", s.integrator.stiffness_cap},
                        {"divergence_radius", s.integrator.divergence_radius}};
    if (s.lambda_seq) {
        const auto& l = *s.lambda_seq;
        switch (l.kind) {
            case LambdaSeqSpec::Kind::constant: sj["lambda_seq"] = {{"kind", "constant"}, {"value", l.value}}; break;
            case LambdaSeqSpec::Kind::cyclic: sj["lambda_seq"] = {{"kind", "cyclic"}, {"values", l.values}}; break;
            case LambdaSeqSpec::Kind::seeded_uniform:
                sj["lambda_seq"] = {{"kind", "seeded_uniform"}, {"lower", l.lower}, {"upper", l.upper}, {"seed", l.seed}};
                break;
        }
    }
    sj["step_scale"] = s.step_scale;
    if (s.regime) sj["regime"] = {{"lower", s.regime->lower}, {"upper", s.regime->upper}};
    sj["x0"] = s.x0;
    if (s.x_star) sj["x_star"] = *s.x_star;
    sj["tol"] = s.tol;
    sj["max_iter"] = s.max_iter;
    sj["seed"] = s.seed;
    sj["samples"] = s.samples;
    if (s.expect) sj["expect"] = {{"solution", s.expect->solution}, {"max_final_distance", s.expect->max_final_distance}};
    j["solver"] = sj;

    json oj;
    if (spec.output.directory) oj["directory"] = *spec.output.directory;
    json formats = json::array();
    if (spec.output.csv) formats.push_back("csv");
    if (spec.output.json) formats.push_back("json");
    if (spec.output.svg) formats.push_back("svg");
    oj["formats"] = formats;
    oj["plot"] = spec.output.plot == PlotKind::coordinates ? "coordinates" : "residual";
    j["output"] = oj;
    return j;
}

Vector toVector(const std::vector<double>& values) {
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Mapping buildMapping(const MappingSpec& spec, int dim) {
    Mapping m = std::visit(
        [&](const auto& k) -> Mapping {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, AffineSpec>) {
                Matrix matrix(dim, dim);
                for (int i = 0; i < dim; ++i) {
                    for (int c = 0; c < dim; ++c) matrix(i, c) = k.matrix.at(i).at(c);
                }
                return Mapping::affine(matrix, toVector(k.shift));
            } else if constexpr (std::is_same_v<T, ScaledIdentitySpec>) {
                return Mapping::scaledIdentity(dim, k.factor);
            } else {
                std::vector<ScalarFunction> fns;
                for (const auto& name : k.functions) {
                    auto fn = scalarFunctionFromString(name);
                    if (!fn) throw InputError("unknown function '" + name + "'");
                    fns.push_back(*fn);
                }
                return Mapping::componentwise(std::move(fns));
            }
        },
        spec.kind);
    if (spec.lipschitz || spec.monotonicity) m = m.withDeclaredConstants(spec.lipschitz, spec.monotonicity);
    return m;
}

ProblemInstance buildProblem(const ProblemSpec& spec) {
    Mapping f = buildMapping(spec.mapping, spec.dim);
    MovingSet phi = spec.moving_set.shift_map
                        ? MovingSet::translated(buildMapping(*spec.moving_set.shift_map, spec.dim), spec.moving_set.base)
                        : MovingSet::constant(spec.moving_set.base);
    return ProblemInstance::make(std::move(f), std::move(phi), spec.alpha);
}

LambdaSchedule buildSchedule(const ScheduleSpec& spec) {
    return spec.polynomial ? LambdaSchedule::polynomial(spec.a, spec.b, spec.p) : LambdaSchedule::constant(spec.gain);
}

LambdaSequence buildLambdaSequence(const LambdaSeqSpec& spec) {
    switch (spec.kind) {
        case LambdaSeqSpec::Kind::constant: return LambdaSequence::constant(spec.value);
        case LambdaSeqSpec::Kind::cyclic: return LambdaSequence::cyclic(spec.values);
        case LambdaSeqSpec::Kind::seeded_uniform: return LambdaSequence::seededUniform(spec.lower, spec.upper, spec.seed);
    }
    throw InputError("unknown lambda sequence kind");
}

}  // namespace iqvi::cli
