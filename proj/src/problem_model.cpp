#include "iqvi/problem_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iqvi {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct ScalarConstants {
    double lipschitz;
    std::optional<double> monotonicity;
};

ScalarConstants constantsOf(ScalarFunction fn) {
    switch (fn) {
        case ScalarFunction::identity: return {1.0, 1.0};
        // |1/(1+|x|) - 1/(1+|y|)| <= ||x| - |y|| <= |x - y|; decreasing on x > 0.
        case ScalarFunction::inv_one_plus_abs: return {1.0, std::nullopt};
        case ScalarFunction::tanh: return {1.0, 0.0};
        case ScalarFunction::atan: return {1.0, 0.0};
        case ScalarFunction::sin: return {1.0, std::nullopt};
    }
    return {1.0, std::nullopt};
}

double applyScalar(ScalarFunction fn, double x) {
    switch (fn) {
        case ScalarFunction::identity: return x;
        case ScalarFunction::inv_one_plus_abs: return 1.0 / (1.0 + std::abs(x));
        case ScalarFunction::tanh: return std::tanh(x);
        case ScalarFunction::atan: return std::atan(x);
        case ScalarFunction::sin: return std::sin(x);
    }
    return x;
}

constexpr double kConstantSlack = 1e-12;

}  // namespace

std::string_view toString(ScalarFunction fn) {
    switch (fn) {
        case ScalarFunction::identity: return "identity";
        case ScalarFunction::inv_one_plus_abs: return "inv_one_plus_abs";
        case ScalarFunction::tanh: return "tanh";
        case ScalarFunction::atan: return "atan";
        case ScalarFunction::sin: return "sin";
    }
    return "unknown";
}

std::optional<ScalarFunction> scalarFunctionFromString(std::string_view name) {
    for (auto fn : {ScalarFunction::identity, ScalarFunction::inv_one_plus_abs, ScalarFunction::tanh,
                    ScalarFunction::atan, ScalarFunction::sin}) {
        if (toString(fn) == name) return fn;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

Mapping Mapping::affine(Matrix matrix, Vector shift) {
    if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) {
        throw InputError("affine: matrix must be square and nonempty");
    }
    requireSameDim(matrix.rows(), shift.size(), "affine shift");
    if (!matrix.allFinite() || !shift.allFinite()) throw InputError("affine: non-finite parameters");

    // Spectral norm from the largest eigenvalue of M^T M.
    const Eigen::SelfAdjointEigenSolver<Matrix> gram(matrix.transpose() * matrix, Eigen::EigenvaluesOnly);
    const double lipschitz = std::sqrt(std::max(gram.eigenvalues().maxCoeff(), 0.0));

    const Matrix sym = 0.5 * (matrix + matrix.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> symEig(sym, Eigen::EigenvaluesOnly);
    double beta = symEig.eigenvalues().minCoeff();
    std::optional<double> monotonicity;
    if (beta > -kConstantSlack * std::max(1.0, lipschitz)) monotonicity = std::max(beta, 0.0);

    return Mapping(Affine{std::move(matrix), std::move(shift)}, lipschitz, monotonicity);
}

Mapping Mapping::scaledIdentity(Eigen::Index dim, double factor) {
    if (dim <= 0) throw InputError("scaled_identity: dimension must be positive");
    if (!std::isfinite(factor)) throw InputError("scaled_identity: non-finite factor");
    std::optional<double> monotonicity;
    if (factor >= 0.0) monotonicity = factor;
    return Mapping(ScaledIdentity{dim, factor}, std::abs(factor), monotonicity);
}

Mapping Mapping::componentwise(std::vector<ScalarFunction> functions) {
    if (functions.empty()) throw InputError("componentwise: no functions");
    double lipschitz = 0.0;
    std::optional<double> monotonicity = std::numeric_limits<double>::infinity();
    for (auto fn : functions) {
        const auto c = constantsOf(fn);
        lipschitz = std::max(lipschitz, c.lipschitz);
        if (monotonicity && c.monotonicity) {
            monotonicity = std::min(*monotonicity, *c.monotonicity);
        } else {
            monotonicity.reset();
        }
    }
    return Mapping(Componentwise{std::move(functions)}, lipschitz, monotonicity);
}

Mapping Mapping::withDeclaredConstants(std::optional<double> lipschitz,
                                       std::optional<double> monotonicity) const {
    Mapping out = *this;
    if (lipschitz) {
        if (!std::isfinite(*lipschitz) || *lipschitz < lipschitz_ - kConstantSlack * std::max(1.0, lipschitz_)) {
            throw InputError("declared Lipschitz constant is smaller than the exact value " +
                             std::to_string(lipschitz_));
        }
        out.lipschitz_ = *lipschitz;
    }
    if (monotonicity) {
        if (!monotonicity_) throw InputError("declared monotonicity modulus for a non-monotone map");
        if (!std::isfinite(*monotonicity) || *monotonicity < 0.0 ||
            *monotonicity > *monotonicity_ + kConstantSlack * std::max(1.0, *monotonicity_)) {
            throw InputError("declared monotonicity modulus exceeds the exact value " +
                             std::to_string(*monotonicity_));
        }
        out.monotonicity_ = *monotonicity;
    }
    return out;
}

Vector Mapping::operator()(const Vector& x) const {
    requireSameDim(dim(), x.size(), "mapping");
    return std::visit(Overloaded{
                          [&](const Affine& a) -> Vector { return a.matrix * x + a.shift; },
                          [&](const ScaledIdentity& s) -> Vector { return s.factor * x; },
                          [&](const Componentwise& c) -> Vector {
                              Vector out(x.size());
                              for (Eigen::Index i = 0; i < x.size(); ++i) {
                                  out[i] = applyScalar(c.functions[static_cast<std::size_t>(i)], x[i]);
                              }
                              return out;
                          },
                      },
                      data_);
}

Eigen::Index Mapping::dim() const {
    return std::visit(Overloaded{
                          [](const Affine& a) { return a.matrix.rows(); },
                          [](const ScaledIdentity& s) { return s.dim; },
                          [](const Componentwise& c) { return static_cast<Eigen::Index>(c.functions.size()); },
                      },
                      data_);
}

// ---------------------------------------------------------------------------

MovingSet MovingSet::translated(Mapping shift_map, ConvexSet base) {
    requireSameDim(base.dim(), shift_map.dim(), "translated moving set");
    return MovingSet(Translated{std::move(shift_map), std::move(base)});
}

MovingSet MovingSet::constant(ConvexSet base) {
    return MovingSet(Constant{std::move(base)});
}

MovingSet MovingSet::declaredKappa(DeclaredKappa rule) {
    if (rule.dim <= 0) throw InputError("declared_kappa: dimension must be positive");
    if (!rule.project) throw InputError("declared_kappa: missing projection rule");
    if (!std::isfinite(rule.kappa) || rule.kappa < 0.0) throw InputError("declared_kappa: kappa must be nonnegative");
    return MovingSet(std::move(rule));
}

Eigen::Index MovingSet::dim() const {
    return std::visit(Overloaded{
                          [](const Translated& t) { return t.base.dim(); },
                          [](const Constant& c) { return c.base.dim(); },
                          [](const DeclaredKappa& d) { return d.dim; },
                      },
                      data_);
}

double MovingSet::kappa() const {
    return std::visit(Overloaded{
                          [](const Translated& t) { return t.shift_map.lipschitz(); },
                          [](const Constant&) { return 0.0; },
                          [](const DeclaredKappa& d) { return d.kappa; },
                      },
                      data_);
}

Vector MovingSet::shift(const Vector& x) const {
    return std::visit(Overloaded{
                          [&](const Translated& t) -> Vector { return t.shift_map(x); },
                          [&](const Constant& c) -> Vector {
                              requireSameDim(c.base.dim(), x.size(), "moving set");
                              return Vector::Zero(x.size());
                          },
                          [&](const DeclaredKappa&) -> Vector {
                              throw InputError("declared_kappa moving set has no translation");
                          },
                      },
                      data_);
}

std::vector<Vector> MovingSet::sample(const Vector& x, std::uint64_t seed, std::size_t count) const {
    requireSameDim(dim(), x.size(), "moving set sample");
    return std::visit(Overloaded{
                          [&](const Translated& t) {
                              auto pts = t.base.sample(seed, count);
                              const Vector s = t.shift_map(x);
                              for (auto& p : pts) p += s;
                              return pts;
                          },
                          [&](const Constant& c) { return c.base.sample(seed, count); },
                          [&](const DeclaredKappa& d) {
                              if (!d.sample) throw InputError("declared_kappa moving set has no sampler");
                              return d.sample(x, seed, count);
                          },
                      },
                      data_);
}

Vector movingProject(const MovingSet& phi, const Vector& x, const Vector& z) {
    requireSameDim(phi.dim(), x.size(), "moving_project x");
    requireSameDim(phi.dim(), z.size(), "moving_project z");
    return std::visit(Overloaded{
                          [&](const Translated& t) -> Vector {
                              const Vector s = t.shift_map(x);
                              return s + t.base.project(z - s);
                          },
                          [&](const Constant& c) -> Vector { return c.base.project(z); },
                          [&](const DeclaredKappa& d) -> Vector { return d.project(x, z); },
                      },
                      phi.variant());
}

// ---------------------------------------------------------------------------

ProblemInstance ProblemInstance::make(Mapping f, MovingSet phi, double alpha) {
    requireSameDim(f.dim(), phi.dim(), "problem");
    if (!std::isfinite(alpha) || alpha <= 0.0) throw InputError("problem: alpha must be positive");
    if (!f.monotonicity()) throw InputError("problem: f must be monotone (declared modulus required)");
    const Eigen::Index n = f.dim();
    return ProblemInstance{n, std::move(f), std::move(phi), alpha};
}

LambdaSchedule LambdaSchedule::constant(double gain) {
    if (!std::isfinite(gain) || gain <= 0.0) throw InputError("constant schedule: gain must be positive");
    return LambdaSchedule(gain, 0.0, 0.0);
}

LambdaSchedule LambdaSchedule::polynomial(double a, double b, double p) {
    if (!std::isfinite(a) || a <= 0.0) throw InputError("polynomial schedule: a must be positive");
    if (!std::isfinite(b) || b < 0.0) throw InputError("polynomial schedule: b must be nonnegative");
    if (!std::isfinite(p) || p < 0.0) throw InputError("polynomial schedule: p must be nonnegative");
    return LambdaSchedule(a, b, p);
}

double LambdaSchedule::operator()(double t) const {
    if (b_ == 0.0) return a_;
    return a_ + b_ * std::pow(t, p_);
}

double LambdaSchedule::antiderivative(double t) const {
    if (b_ == 0.0) return a_ * t;
    return a_ * t + b_ * std::pow(t, p_ + 1.0) / (p_ + 1.0);
}

double LambdaSchedule::integral(double t0, double t1) const {
    return antiderivative(t1) - antiderivative(t0);
}

double LambdaSchedule::maxOn(double t0, double t1) const {
    return (*this)(std::max(t0, t1));
}

// ---------------------------------------------------------------------------

Vector projectionDefect(const ProblemInstance& problem, const Vector& x) {
    requireSameDim(problem.dim, x.size(), "problem");
    const Vector fx = problem.f(x);
    const Vector p = movingProject(problem.phi, x, fx - problem.alpha * x);
    Vector out = p - fx;
    requireFinite(out, "projection defect");
    return out;
}

double residual(const ProblemInstance& problem, const Vector& x) {
    return projectionDefect(problem, x).norm();
}

Vector vectorField(const ProblemInstance& problem, const LambdaSchedule& schedule, const Vector& x, double t) {
    if (!(t >= 0.0)) throw InputError("vector_field: t must be nonnegative");
    return schedule(t) * projectionDefect(problem, x);
}

Vector contractionMap(const ProblemInstance& problem, const Vector& x) {
    return x + projectionDefect(problem, x) / problem.alpha;
}

}  // namespace iqvi
