#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "caso/matcore.hpp"

namespace caso {

/// A·x = b with A square.
struct LinearSystem {
    DenseMatrix a;
    Vector b;

    std::size_t dimension() const { return b.size(); }
    void validate() const;
    bool operator==(const LinearSystem&) const = default;
};

/// minimize cᵀx subject to A·x = b, D·x >= e, x free.
struct LinearProgram {
    Vector c;
    DenseMatrix a;  // m × n
    Vector b;
    DenseMatrix d;  // s × n
    Vector e;

    std::size_t num_vars() const { return c.size(); }
    std::size_t num_equalities() const { return b.size(); }
    std::size_t num_inequalities() const { return e.size(); }
    double objective(std::span<const double> x) const;
    void validate() const;
    bool operator==(const LinearProgram&) const = default;
};

/// Σ coeffs[i]·x_i + constant, indices sparse.
struct AffineForm {
    std::map<std::size_t, double> coeffs;
    double constant = 0.0;

    double evaluate(std::span<const double> x) const;
    bool operator==(const AffineForm&) const = default;
};

enum class FunctionKind { Power, Sin, Cos, Exp, Log10, Ln, Reciprocal };

struct BaseFunction {
    FunctionKind kind = FunctionKind::Power;
    unsigned exponent = 1;  // Power only

    static BaseFunction power(unsigned m) { return {FunctionKind::Power, m}; }
    static BaseFunction of(FunctionKind k) { return {k, 1}; }

    bool polynomial() const { return kind == FunctionKind::Power; }
    /// Throws DomainError outside the function's domain.
    double value(double u) const;
    double derivative(double u) const;
    std::string name() const;
    static BaseFunction parse(const std::string& name, unsigned exponent);

    bool operator==(const BaseFunction&) const = default;
};

/// coefficient · f(argument(x)) · Π cofactors_k(x)
struct Term {
    double coefficient = 1.0;
    BaseFunction fn;
    AffineForm argument;
    std::vector<AffineForm> cofactors;

    bool operator==(const Term&) const = default;
};

/// Each equation is a sum of terms with an implicit "= 0" right side.
using Equation = std::vector<Term>;

struct NonlinearSystem {
    std::size_t n = 0;
    std::vector<Equation> equations;

    void validate() const;
    std::size_t term_count() const;
    bool operator==(const NonlinearSystem&) const = default;
};

/// minimize ½xᵀQx + cᵀx subject to A·x = b, D·x >= e, Q symmetric PSD.
struct ConvexQuadraticProgram {
    DenseMatrix q;
    Vector c;
    DenseMatrix a;
    Vector b;
    DenseMatrix d;
    Vector e;

    std::size_t num_vars() const { return c.size(); }
    double objective(std::span<const double> x) const;
    /// Includes the symmetry (1e-10) and positive-semidefiniteness checks.
    void validate() const;
    bool operator==(const ConvexQuadraticProgram&) const = default;
};

using Problem = std::variant<LinearSystem, LinearProgram, NonlinearSystem, ConvexQuadraticProgram>;

enum class ProblemClass { LinearSystem, LinearProgram, Nonlinear, ConvexQuadratic };

ProblemClass problem_class(const Problem& p);
/// File spelling: linear_system, lp, nonlinear, cqp.
std::string class_name(ProblemClass c);
ProblemClass parse_class_name(const std::string& name);
std::size_t num_vars(const Problem& p);
void validate(const Problem& p);

/// Maximum |residual| of A·x = b and D·x >= e at x (0 when satisfied).
double constraint_violation(const DenseMatrix& a, const Vector& b, const DenseMatrix& d,
                            const Vector& e, std::span<const double> x);

double eval_term(const Term& term, std::span<const double> point);
Vector eval_system(const NonlinearSystem& f, std::span<const double> point);
DenseMatrix jacobian(const NonlinearSystem& f, std::span<const double> point);

/// A·x - b written as terms: one Power(1) term per nonzero plus a constant.
NonlinearSystem encode_as_terms(const LinearSystem& sys);

}  // namespace caso
