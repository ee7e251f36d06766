#include "caso/transform.hpp"

#include <bit>
#include <cmath>

#include "caso/errors.hpp"

namespace caso {

namespace {

constexpr std::uint64_t kSplitStream = 0x9E3779B97F4A7C15ull;

void require_key_dimension(const SecretKey& key, std::size_t n) {
    if (key.dimension() != n) throw DimensionMismatch("key dimension does not match the problem");
}

// A·K, tolerating matrices with no rows (stored as 0×0).
DenseMatrix times_key(const DenseMatrix& a, const StructuredMatrix& k, MulCounter& counter) {
    if (a.rows() == 0) return DenseMatrix(0, k.dimension());
    return mul_structured(a, k, counter);
}

// v - A·r
Vector shifted_rhs(const DenseMatrix& a, const Vector& v, const Vector& r, MulCounter& counter) {
    if (a.rows() == 0) return v;
    return subtract(v, multiply(a, r, &counter));
}

// Products with ±1 are sign copies and are not counted.
double counted_mul(double a, double b, MulCounter& counter) {
    if (std::abs(a) != 1.0 && std::abs(b) != 1.0) counter.add(1);
    return a * b;
}

double counted_pow(double u, unsigned m, MulCounter& counter) {
    double result = 1.0;
    bool first = true;
    double base = u;
    while (m) {
        if (m & 1u) {
            if (first) {
                result = base;
                first = false;
            } else {
                result *= base;
                counter.add(1);
            }
        }
        m >>= 1u;
        if (m) {
            base *= base;
            counter.add(1);
        }
    }
    return result;
}

using KeyRows = std::vector<std::vector<std::pair<std::size_t, double>>>;

// Composes form(x) with x = K·y + r and multiplies the result by `scale`
// (1/p for a split factor, t for a folded Power(1) coefficient, 1 otherwise).
AffineForm substitute(const AffineForm& form, const KeyRows& rows, const Vector& r, double scale,
                      MulCounter& counter) {
    AffineForm out;
    out.constant = form.constant == 0.0 ? 0.0 : counted_mul(form.constant, scale, counter);
    for (const auto& [j, a] : form.coeffs) {
        const double w = counted_mul(a, scale, counter);
        for (const auto& [s, k] : rows[j]) out.coeffs[s] += counted_mul(w, k, counter);
        if (r[j] != 0.0) out.constant += counted_mul(w, r[j], counter);
    }
    std::erase_if(out.coeffs, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

Term transform_term(const Term& term, const KeyRows& rows, const Vector& r, const SplitSource& split,
                    MulCounter& counter) {
    Term out;
    out.fn = term.fn;
    const bool polynomial = term.fn.kind == FunctionKind::Power;
    if (term.cofactors.empty() && polynomial && term.fn.exponent == 1) {
        out.coefficient = 1.0;
        out.argument = substitute(term.argument, rows, r, term.coefficient, counter);
        return out;
    }
    if (term.cofactors.empty() && !(polynomial && term.fn.exponent >= 2)) {
        out.coefficient = term.coefficient;
        out.argument = substitute(term.argument, rows, r, 1.0, counter);
        return out;
    }
    // Split every polynomial factor: (Σk y + c)^m = p^m (Σq y + c/p)^m.
    double divisor = 1.0;
    bool have_divisor = false;
    if (polynomial) {
        const double u = split();
        out.argument = substitute(term.argument, rows, r, u, counter);
        divisor = counted_pow(u, term.fn.exponent, counter);
        have_divisor = true;
    } else {
        out.argument = substitute(term.argument, rows, r, 1.0, counter);
    }
    out.cofactors.reserve(term.cofactors.size());
    for (const auto& cof : term.cofactors) {
        const double u = split();
        out.cofactors.push_back(substitute(cof, rows, r, u, counter));
        if (have_divisor) {
            divisor *= u;
            counter.add(1);
        } else {
            divisor = u;
            have_divisor = true;
        }
    }
    out.coefficient = term.coefficient / divisor;
    counter.add(1);
    return out;
}

}  // namespace

unsigned power_chain_cost(unsigned m) {
    if (m == 0) return 0;
    return static_cast<unsigned>(std::bit_width(m) - 1) + static_cast<unsigned>(std::popcount(m)) - 1;
}

TransformedProblem transform_linear(const LinearSystem& f, const SecretKey& key) {
    f.validate();
    require_key_dimension(key, f.dimension());
    key.consume();
    MulCounter main;
    MulCounter aux;
    LinearSystem g;
    g.a = mul_structured(f.a, key.matrix(), main);
    g.b = shifted_rhs(f.a, f.b, key.offset(), aux);
    TransformedProblem out{std::move(g), key.scheme()};
    out.mult_count = main.count();
    out.aux_mult_count = aux.count();
    return out;
}

TransformedProblem transform_lp(const LinearProgram& f, const SecretKey& key) {
    f.validate();
    require_key_dimension(key, f.num_vars());
    key.consume();
    const auto& k = key.matrix();
    const auto& r = key.offset();
    MulCounter main;
    MulCounter aux;
    LinearProgram g;
    g.c = k.transpose_multiply(f.c, &aux);
    g.a = times_key(f.a, k, main);
    g.b = shifted_rhs(f.a, f.b, r, aux);
    g.d = times_key(f.d, k, main);
    g.e = shifted_rhs(f.d, f.e, r, aux);
    TransformedProblem out{std::move(g), key.scheme()};
    out.objective_offset = dot(f.c, r, &aux);
    out.mult_count = main.count();
    out.aux_mult_count = aux.count();
    return out;
}

TransformedProblem transform_cqp(const ConvexQuadraticProgram& f, const SecretKey& key) {
    f.validate();
    const std::size_t n = f.num_vars();
    require_key_dimension(key, n);
    key.consume();
    const auto& k = key.matrix();
    const auto& r = key.offset();
    MulCounter main;
    MulCounter aux;
    ConvexQuadraticProgram g;
    // Kᵀ(QK) = ((QK)ᵀK)ᵀ; the result is symmetrized to remove rounding skew.
    const DenseMatrix qk = mul_structured(f.q, k, main);
    const DenseMatrix kqk = mul_structured(qk.transposed(), k, main);
    g.q = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.q(i, j) = 0.5 * (kqk(i, j) + kqk(j, i));
    const Vector qr = multiply(f.q, r, &aux);
    g.c = k.transpose_multiply(add(qr, f.c), &aux);
    g.a = times_key(f.a, k, main);
    g.b = shifted_rhs(f.a, f.b, r, aux);
    g.d = times_key(f.d, k, main);
    g.e = shifted_rhs(f.d, f.e, r, aux);
    TransformedProblem out{std::move(g), key.scheme()};
    out.objective_offset = 0.5 * dot(r, qr, &aux) + dot(f.c, r, &aux);
    out.mult_count = main.count();
    out.aux_mult_count = aux.count();
    return out;
}

TransformedProblem transform_nonlinear(const NonlinearSystem& f, const SecretKey& key,
                                       std::span<const double> x0) {
    Rng rng(key.seed() ^ kSplitStream);
    return transform_nonlinear(f, key, x0, [&rng] { return draw_split_factor(rng); });
}

TransformedProblem transform_nonlinear(const NonlinearSystem& f, const SecretKey& key,
                                       std::span<const double> x0, const SplitSource& split) {
    f.validate();
    require_key_dimension(key, f.n);
    if (x0.size() != f.n) throw DimensionMismatch("initial point has the wrong dimension");
    if (!all_finite(x0)) throw InvalidArgument("initial point must be finite");
    (void)eval_system(f, x0);  // DomainError when x0 is outside the domain
    key.consume();
    const KeyRows rows = key.matrix().rows_view();
    MulCounter main;
    NonlinearSystem g;
    g.n = f.n;
    g.equations.resize(f.equations.size());
    for (std::size_t i = 0; i < f.equations.size(); ++i) {
        g.equations[i].reserve(f.equations[i].size());
        for (const auto& term : f.equations[i])
            g.equations[i].push_back(transform_term(term, rows, key.offset(), split, main));
    }
    TransformedProblem out{std::move(g), key.scheme()};
    out.mult_count = main.count();
    out.initial_point = map_inverse(key, x0);
    return out;
}

TransformedProblem transform(const Problem& f, const SecretKey& key, std::span<const double> x0) {
    return std::visit(
        [&](const auto& p) -> TransformedProblem {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LinearSystem>) return transform_linear(p, key);
            else if constexpr (std::is_same_v<T, LinearProgram>) return transform_lp(p, key);
            else if constexpr (std::is_same_v<T, ConvexQuadraticProgram>) return transform_cqp(p, key);
            else {
                if (x0.empty()) throw InvalidArgument("non-linear transform needs an initial point x0");
                return transform_nonlinear(p, key, x0);
            }
        },
        f);
}

Vector recover(std::span<const double> y_star, const SecretKey& key, MulCounter* counter) {
    return map_forward(key, y_star, counter);
}

Vector recover_linear(std::span<const double> y_star, const SecretKey& key) {
    return recover(y_star, key);
}

Vector recover_nonlinear(std::span<const double> y_star, const SecretKey& key) {
    return recover(y_star, key);
}

}  // namespace caso
