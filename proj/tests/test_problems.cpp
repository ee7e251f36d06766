#include <doctest.h>

#include "caso/errors.hpp"
#include "caso/problems.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace caso;
using gen::affine;
using gen::term;

TEST_CASE("eval_term examples") {
    CHECK(eval_term(term(1, BaseFunction::of(FunctionKind::Sin), affine({{0, 3}})), Vector{0}) == 0.0);
    CHECK(eval_term(term(4, BaseFunction::power(2), affine({{1, 1}})), Vector{0, 2}) == 16.0);
    CHECK(eval_term(term(1, BaseFunction::power(1), affine({{1, 1}}), {affine({{2, 1}})}), Vector{0, 2, 3}) == 6.0);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(eval_term(term(1, BaseFunction::of(FunctionKind::Log10), affine({{0, 1}})), Vector{0}),
                    DomainError);
    CHECK_THROWS_AS(eval_term(term(1, BaseFunction::of(FunctionKind::Ln), affine({{0, 1}})), Vector{-1}),
                    DomainError);
    CHECK_THROWS_AS(eval_term(term(1, BaseFunction::of(FunctionKind::Reciprocal), affine({{0, 2}}, -2)), Vector{1}),
                    DomainError);
}

TEST_CASE("eval_system examples") {
    NonlinearSystem f{1, {{term(1, BaseFunction::power(1), affine({{0, 1}}, -1))}}};
    CHECK(eval_system(f, Vector{1}) == Vector{0});

    const Vector x{0.1, 0.1, 0.1};
    const Vector got = eval_system(gen::example_system(), x);
    const Vector want = oracle::example_system(x);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("linear system written as terms evaluates to Ax - b") {
    Rng rng(4);
    const LinearSystem s = gen::random_system(5, rng);
    const NonlinearSystem f = encode_as_terms(s);
    for (int k = 0; k < 10; ++k) {
        const Vector x = gen::random_vector(5, rng, -3, 3);
        const Vector ref = subtract(oracle::naive_apply(s.a, x), s.b);
        const Vector got = eval_system(f, x);
        for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        CHECK(jacobian(f, x) == s.a);
    }
}

TEST_CASE("jacobian examples") {
    NonlinearSystem f{1, {{term(1, BaseFunction::power(2), affine({{0, 1}})),
                           term(-4, BaseFunction::power(1), affine({}, 1))}}};
    CHECK(jacobian(f, Vector{3})(0, 0) == 6.0);
}

TEST_CASE("property: jacobian matches central differences") {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const std::size_t n = 2 + seed % 4;
        const NonlinearSystem f = gen::random_nonlinear(n, 4, rng);
        const Vector x = gen::random_vector(n, rng, -1, 1);
        const DenseMatrix j = jacobian(f, x), fd = oracle::fd_jacobian(f, x);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                worst = std::max(worst, std::abs(j(r, c) - fd(r, c)) / std::max(1.0, std::abs(fd(r, c))));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("property: Power(1) without cofactors is affine in the point") {
    Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const Term t = term(rng.uniform(-2, 2), BaseFunction::power(1), gen::random_affine(4, rng, 1.0));
        const Vector x = gen::random_vector(4, rng), y = gen::random_vector(4, rng);
        const double a = rng.uniform(-3, 3);
        const Vector mix = add(scale(x, a), scale(y, 1 - a));
        CHECK(eval_term(t, mix) == doctest::Approx(a * eval_term(t, x) + (1 - a) * eval_term(t, y)));
    }
}

TEST_CASE("validation") {
    LinearSystem bad{DenseMatrix(2, 3), Vector{1, 2}};
    CHECK_THROWS_AS(bad.validate(), DimensionMismatch);

    NonlinearSystem oob{2, {{term(1, BaseFunction::power(1), affine({{2, 1}}))}, {}}};
    CHECK_THROWS(oob.validate());
    NonlinearSystem not_square{2, {{term(1, BaseFunction::power(1), affine({{0, 1}}))}}};
    CHECK_THROWS(not_square.validate());
    CHECK_THROWS_AS(BaseFunction::parse("pow", 0), InvalidArgument);

    ConvexQuadraticProgram asym{DenseMatrix{{1, 1}, {0, 1}}, {0, 0}, DenseMatrix(0, 2), {}, DenseMatrix(0, 2), {}};
    CHECK_THROWS(asym.validate());
    ConvexQuadraticProgram indefinite{DenseMatrix{{1, 0}, {0, -1}}, {0, 0}, DenseMatrix(0, 2), {}, DenseMatrix(0, 2), {}};
    CHECK_THROWS(indefinite.validate());
    ConvexQuadraticProgram ok{DenseMatrix{{1, 0}, {0, 0}}, {0, 0}, DenseMatrix(0, 2), {}, DenseMatrix(0, 2), {}};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("class names round trip") {
    for (auto c : {ProblemClass::LinearSystem, ProblemClass::LinearProgram, ProblemClass::Nonlinear,
                   ProblemClass::ConvexQuadratic})
        CHECK(parse_class_name(class_name(c)) == c);
    CHECK_THROWS(parse_class_name("sdp"));
}

TEST_CASE("function names round trip") {
    for (auto k : {FunctionKind::Sin, FunctionKind::Cos, FunctionKind::Exp, FunctionKind::Log10, FunctionKind::Ln,
                   FunctionKind::Reciprocal}) {
        const BaseFunction f = BaseFunction::of(k);
        CHECK(BaseFunction::parse(f.name(), 1) == f);
    }
    CHECK(BaseFunction::parse("pow", 3) == BaseFunction::power(3));
}

TEST_CASE("constraint_violation") {
    const DenseMatrix a{{1, 1}};
    const DenseMatrix d{{1, 0}};
    CHECK(constraint_violation(a, {2}, d, {0}, Vector{1, 1}) == 0.0);
    CHECK(constraint_violation(a, {2}, d, {0}, Vector{-1, 3}) == 1.0);
    CHECK(constraint_violation(a, {2}, d, {0}, Vector{1, 2}) == 1.0);
}
