#include "caso/problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "caso/errors.hpp"

namespace caso {

namespace {

void require_dims(bool ok, const std::string& what) {
    if (!ok) throw DimensionMismatch(what);
}

void require_finite(std::span<const double> v, const std::string& what) {
    if (!all_finite(v)) throw InvalidArgument(what + " must be finite");
}

double ipow(double u, unsigned m) {
    double result = 1.0;
    double base = u;
    while (m) {
        if (m & 1u) result *= base;
        m >>= 1u;
        if (m) base *= base;
    }
    return result;
}

// Shape checks shared by the two optimization classes.
void validate_constraints(std::size_t n, const DenseMatrix& a, const Vector& b, const DenseMatrix& d,
                          const Vector& e) {
    require_dims(a.rows() == b.size(), "A rows must match length of b");
    require_dims(d.rows() == e.size(), "D rows must match length of e");
    require_dims(a.rows() == 0 || a.cols() == n, "A columns must match variable count");
    require_dims(d.rows() == 0 || d.cols() == n, "D columns must match variable count");
    require_finite(a.data(), "A");
    require_finite(b, "b");
    require_finite(d.data(), "D");
    require_finite(e, "e");
}

}  // namespace

void LinearSystem::validate() const {
    require_dims(a.square(), "linear system: A must be square");
    require_dims(a.rows() == b.size(), "linear system: A and b disagree");
    require_finite(a.data(), "A");
    require_finite(b, "b");
}

double LinearProgram::objective(std::span<const double> x) const { return dot(c, x); }

void LinearProgram::validate() const {
    if (c.empty()) throw InvalidArgument("linear program needs at least one variable");
    require_finite(c, "c");
    validate_constraints(c.size(), a, b, d, e);
}

double AffineForm::evaluate(std::span<const double> x) const {
    double s = constant;
    for (const auto& [i, v] : coeffs) {
        require_dims(i < x.size(), "affine form references a variable beyond the point");
        s += v * x[i];
    }
    return s;
}

double BaseFunction::value(double u) const {
    switch (kind) {
        case FunctionKind::Power: return ipow(u, exponent);
        case FunctionKind::Sin: return std::sin(u);
        case FunctionKind::Cos: return std::cos(u);
        case FunctionKind::Exp: return std::exp(u);
        case FunctionKind::Log10:
            if (!(u > 0.0)) throw DomainError("lg of a nonpositive argument");
            return std::log10(u);
        case FunctionKind::Ln:
            if (!(u > 0.0)) throw DomainError("ln of a nonpositive argument");
            return std::log(u);
        case FunctionKind::Reciprocal:
            if (u == 0.0) throw DomainError("reciprocal of zero");
            return 1.0 / u;
    }
    throw InvalidArgument("unknown base function");
}

double BaseFunction::derivative(double u) const {
    switch (kind) {
        case FunctionKind::Power: return exponent * ipow(u, exponent - 1);
        case FunctionKind::Sin: return std::cos(u);
        case FunctionKind::Cos: return -std::sin(u);
        case FunctionKind::Exp: return std::exp(u);
        case FunctionKind::Log10:
            if (!(u > 0.0)) throw DomainError("lg of a nonpositive argument");
            return 1.0 / (u * std::numbers::ln10);
        case FunctionKind::Ln:
            if (!(u > 0.0)) throw DomainError("ln of a nonpositive argument");
            return 1.0 / u;
        case FunctionKind::Reciprocal:
            if (u == 0.0) throw DomainError("reciprocal of zero");
            return -1.0 / (u * u);
    }
    throw InvalidArgument("unknown base function");
}

std::string BaseFunction::name() const {
    switch (kind) {
        case FunctionKind::Power: return "pow";
        case FunctionKind::Sin: return "sin";
        case FunctionKind::Cos: return "cos";
        case FunctionKind::Exp: return "exp";
        case FunctionKind::Log10: return "lg";
        case FunctionKind::Ln: return "ln";
        case FunctionKind::Reciprocal: return "recip";
    }
    return "unknown";
}

BaseFunction BaseFunction::parse(const std::string& name, unsigned exponent) {
    if (name == "pow") {
        if (exponent < 1) throw InvalidArgument("power exponent must be at least 1");
        return power(exponent);
    }
    if (name == "sin") return of(FunctionKind::Sin);
    if (name == "cos") return of(FunctionKind::Cos);
    if (name == "exp") return of(FunctionKind::Exp);
    if (name == "lg") return of(FunctionKind::Log10);
    if (name == "ln") return of(FunctionKind::Ln);
    if (name == "recip") return of(FunctionKind::Reciprocal);
    throw InvalidArgument("unknown base function '" + name + "'");
}

void NonlinearSystem::validate() const {
    if (n == 0) throw InvalidArgument("nonlinear system needs at least one variable");
    require_dims(equations.size() == n, "nonlinear system must be square (one equation per variable)");
    auto check_form = [&](const AffineForm& f) {
        if (!std::isfinite(f.constant)) throw InvalidArgument("affine constant must be finite");
        for (const auto& [i, v] : f.coeffs) {
            require_dims(i < n, "variable index out of range");
            if (!std::isfinite(v)) throw InvalidArgument("affine coefficient must be finite");
        }
    };
    for (const auto& eq : equations) {
        for (const auto& t : eq) {
            if (!std::isfinite(t.coefficient)) throw InvalidArgument("term coefficient must be finite");
            if (t.fn.kind == FunctionKind::Power && t.fn.exponent < 1)
                throw InvalidArgument("power exponent must be at least 1");
            check_form(t.argument);
            for (const auto& c : t.cofactors) check_form(c);
        }
    }
}

std::size_t NonlinearSystem::term_count() const {
    std::size_t total = 0;
    for (const auto& eq : equations) total += eq.size();
    return total;
}

double ConvexQuadraticProgram::objective(std::span<const double> x) const {
    const Vector qx = multiply(q, x);
    return 0.5 * dot(x, qx) + dot(c, x);
}

void ConvexQuadraticProgram::validate() const {
    const std::size_t n = c.size();
    if (n == 0) throw InvalidArgument("quadratic program needs at least one variable");
    require_dims(q.rows() == n && q.cols() == n, "Q must be n×n");
    require_finite(q.data(), "Q");
    require_finite(c, "c");
    validate_constraints(n, a, b, d, e);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(q(i, j) - q(j, i)) > 1e-10)
                throw InvalidArgument("Q must be symmetric");
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = q(i, j);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, q.max_abs()))
        throw InvalidArgument("Q must be positive semidefinite");
}

ProblemClass problem_class(const Problem& p) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LinearSystem>) return ProblemClass::LinearSystem;
            else if constexpr (std::is_same_v<T, LinearProgram>) return ProblemClass::LinearProgram;
            else if constexpr (std::is_same_v<T, NonlinearSystem>) return ProblemClass::Nonlinear;
            else return ProblemClass::ConvexQuadratic;
        },
        p);
}

std::string class_name(ProblemClass c) {
    switch (c) {
        case ProblemClass::LinearSystem: return "linear_system";
        case ProblemClass::LinearProgram: return "lp";
        case ProblemClass::Nonlinear: return "nonlinear";
        case ProblemClass::ConvexQuadratic: return "cqp";
    }
    return "unknown";
}

ProblemClass parse_class_name(const std::string& name) {
    if (name == "linear_system") return ProblemClass::LinearSystem;
    if (name == "lp") return ProblemClass::LinearProgram;
    if (name == "nonlinear") return ProblemClass::Nonlinear;
    if (name == "cqp") return ProblemClass::ConvexQuadratic;
    throw InvalidArgument("unknown problem class '" + name + "'");
}

std::size_t num_vars(const Problem& p) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LinearSystem>) return v.dimension();
            else if constexpr (std::is_same_v<T, NonlinearSystem>) return v.n;
            else return v.num_vars();
        },
        p);
}

void validate(const Problem& p) {
    std::visit([](const auto& v) { v.validate(); }, p);
}

double constraint_violation(const DenseMatrix& a, const Vector& b, const DenseMatrix& d,
                            const Vector& e, std::span<const double> x) {
    double worst = 0.0;
    if (a.rows() > 0) {
        const Vector ax = multiply(a, x);
        for (std::size_t i = 0; i < ax.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
    }
    if (d.rows() > 0) {
        const Vector dx = multiply(d, x);
        for (std::size_t i = 0; i < dx.size(); ++i) worst = std::max(worst, e[i] - dx[i]);
    }
    return worst;
}

double eval_term(const Term& term, std::span<const double> point) {
    double v = term.coefficient * term.fn.value(term.argument.evaluate(point));
    for (const auto& c : term.cofactors) v *= c.evaluate(point);
    return v;
}

Vector eval_system(const NonlinearSystem& f, std::span<const double> point) {
    Vector out(f.equations.size(), 0.0);
    for (std::size_t i = 0; i < f.equations.size(); ++i)
        for (const auto& t : f.equations[i]) out[i] += eval_term(t, point);
    return out;
}

DenseMatrix jacobian(const NonlinearSystem& f, std::span<const double> point) {
    DenseMatrix jac(f.equations.size(), f.n);
    std::vector<double> cof;
    for (std::size_t i = 0; i < f.equations.size(); ++i) {
        for (const auto& t : f.equations[i]) {
            const double u = t.argument.evaluate(point);
            const double fu = t.fn.value(u);
            const double dfu = t.fn.derivative(u);
            cof.resize(t.cofactors.size());
            double prod = 1.0;
            for (std::size_t k = 0; k < cof.size(); ++k) {
                cof[k] = t.cofactors[k].evaluate(point);
                prod *= cof[k];
            }
            // Chain rule through the argument.
            for (const auto& [j, a] : t.argument.coeffs) jac(i, j) += t.coefficient * dfu * a * prod;
            // Product rule through each cofactor.
            for (std::size_t k = 0; k < cof.size(); ++k) {
                double others = 1.0;
                for (std::size_t l = 0; l < cof.size(); ++l)
                    if (l != k) others *= cof[l];
                for (const auto& [j, a] : t.cofactors[k].coeffs)
                    jac(i, j) += t.coefficient * fu * a * others;
            }
        }
    }
    return jac;
}

NonlinearSystem encode_as_terms(const LinearSystem& sys) {
    sys.validate();
    NonlinearSystem f;
    f.n = sys.dimension();
    f.equations.resize(f.n);
    for (std::size_t i = 0; i < f.n; ++i) {
        for (std::size_t j = 0; j < f.n; ++j) {
            if (sys.a(i, j) == 0.0) continue;
            Term t;
            t.coefficient = sys.a(i, j);
            t.fn = BaseFunction::power(1);
            t.argument.coeffs[j] = 1.0;
            f.equations[i].push_back(t);
        }
        Term rhs;
        rhs.coefficient = -sys.b[i];
        rhs.fn = BaseFunction::power(1);
        rhs.argument.constant = 1.0;
        f.equations[i].push_back(rhs);
    }
    return f;
}

}  // namespace caso
