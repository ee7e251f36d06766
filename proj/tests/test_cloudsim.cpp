#include <doctest.h>

#include "caso/cloudsim.hpp"
#include "caso/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace caso;
using gen::affine;
using gen::term;

namespace {

NormalOutcome normal(const SolveOutcome& out) {
    REQUIRE(std::holds_alternative<NormalOutcome>(out));
    return std::get<NormalOutcome>(out);
}

LinearProgram one_var(double c, std::vector<double> eq_rhs, double lower) {
    LinearProgram lp;
    lp.c = {c};
    lp.a = DenseMatrix(eq_rhs.size(), 1, 1.0);
    lp.b = eq_rhs;
    lp.d = DenseMatrix{{1}};
    lp.e = {lower};
    return lp;
}

void check_unbounded_certificate(const LinearProgram& lp, const UnboundedOutcome& u) {
    CHECK(oracle::satisfies(lp, u.feasible_point, 1e-7));
    const Vector far = add(u.feasible_point, scale(u.ray, 1e3));
    CHECK(oracle::satisfies(lp, far, 1e-6));
    CHECK(lp.objective(far) < lp.objective(u.feasible_point) - 1e-6);
}

}  // namespace

TEST_CASE("solve_linear examples") {
    const auto y = normal(solve_linear({DenseMatrix{{6, 2}, {3, 6}}, {1, -2}})).solution;
    CHECK(y[0] == doctest::Approx(1.0 / 3));
    CHECK(y[1] == doctest::Approx(-0.5));
    CHECK(normal(solve_linear({DenseMatrix::identity(2), {5, 7}})).solution == Vector{5, 7});
    CHECK(std::holds_alternative<FailureOutcome>(solve_linear({DenseMatrix{{1, 1}, {1, 1}}, {1, 2}})));
}

TEST_CASE("solve_lp examples") {
    const auto n = normal(solve_lp(one_var(1, {1}, 0)));
    CHECK(n.solution[0] == doctest::Approx(1.0));
    CHECK(n.objective == doctest::Approx(1.0));

    const auto inf = solve_lp(one_var(1, {-1}, 0));
    REQUIRE(std::holds_alternative<InfeasibleOutcome>(inf));
    CHECK(std::get<InfeasibleOutcome>(inf).rho_star == doctest::Approx(1.0));

    const LinearProgram unb = one_var(-1, {}, 0);
    const auto out = solve_lp(unb);
    REQUIRE(std::holds_alternative<UnboundedOutcome>(out));
    CHECK(std::get<UnboundedOutcome>(out).ray[0] > 0);
    check_unbounded_certificate(unb, std::get<UnboundedOutcome>(out));
}

TEST_CASE("property: simplex agrees with vertex enumeration") {
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const std::size_t n = 2 + seed % 3;
        const std::size_t m = seed % 2;
        const LinearProgram lp = gen::random_lp(n, m, seed % 3, rng);
        const auto truth = oracle::lp_by_vertices(lp);
        REQUIRE(truth.feasible);
        const auto got = normal(solve_lp(lp));
        CHECK(got.objective == doctest::Approx(truth.value).epsilon(1e-7));
        CHECK(oracle::satisfies(lp, got.solution, 1e-7));
        ++compared;
    }
    CHECK(compared == 100);
}

TEST_CASE("property: simplex outcome certificates") {
    int unbounded = 0, infeasible = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed + 1000);
        const std::size_t n = 3;
        LinearProgram lp;
        lp.c = gen::random_vector(n, rng, -1, 1);
        lp.a = DenseMatrix(0, n);
        lp.d = gen::random_matrix(2, n, rng);
        lp.e = gen::random_vector(2, rng);
        if (seed % 2) {
            // x1 >= e1 and x1 <= e1 - δ: empty.
            lp.d = DenseMatrix{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}};
            lp.e = {rng.uniform(-1, 1), 0, 0};
            lp.e[1] = -lp.e[0] + rng.uniform(0.5, 2);
        }
        const auto out = solve_lp(lp);
        if (const auto* u = std::get_if<UnboundedOutcome>(&out)) {
            ++unbounded;
            check_unbounded_certificate(lp, *u);
        } else if (const auto* i = std::get_if<InfeasibleOutcome>(&out)) {
            ++infeasible;
            CHECK(i->rho_star > 0);
            const auto p1 = normal(solve_lp(build_phase_one(lp)));
            CHECK(p1.objective == doctest::Approx(i->rho_star));
        } else {
            CHECK(oracle::satisfies(lp, normal(out).solution, 1e-7));
        }
    }
    CHECK(infeasible == 30);
    CHECK(unbounded > 10);
}

TEST_CASE("solve_newton examples") {
    Rng rng(2);
    const LinearSystem s = gen::random_system(4, rng);
    const auto lin = normal(solve_newton(encode_as_terms(s), Vector(4, 0.0)));
    CHECK(norm_inf(subtract(oracle::naive_apply(s.a, lin.solution), s.b)) <= 1e-9);

    NonlinearSystem sq{1, {{term(1, BaseFunction::power(2), affine({{0, 1}})), term(-4, BaseFunction::power(1), affine({}, 1))}}};
    CHECK(std::abs(normal(solve_newton(sq, Vector{3})).solution[0] - 2.0) <= 1e-9);

    NonlinearSystem circle{2, {{term(1, BaseFunction::power(2), affine({{0, 1}})), term(1, BaseFunction::power(2), affine({{1, 1}})),
                                term(-1, BaseFunction::power(1), affine({}, 1))},
                               {term(1, BaseFunction::power(1), affine({{0, 1}, {1, -1}}))}}};
    const auto c = normal(solve_newton(circle, Vector{1, 0.5})).solution;
    CHECK(std::abs(c[0] - std::sqrt(0.5)) <= 1e-8);
    CHECK(std::abs(c[1] - std::sqrt(0.5)) <= 1e-8);
}

TEST_CASE("solve_newton failure modes") {
    // x² + 1 has no real root.
    NonlinearSystem none{1, {{term(1, BaseFunction::power(2), affine({{0, 1}})), term(1, BaseFunction::power(1), affine({}, 1))}}};
    CHECK(std::holds_alternative<FailureOutcome>(solve_newton(none, Vector{0.5})));
    NonlinearSystem log_sys{1, {{term(1, BaseFunction::of(FunctionKind::Ln), affine({{0, 1}}))}}};
    CHECK(std::holds_alternative<FailureOutcome>(solve_newton(log_sys, Vector{-1})));
}

TEST_CASE("property: Newton on the disguised system lands on the direct root") {
    int both = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto sys = gen::rooted_polynomial(3 + seed % 4, rng);
        const auto direct = solve_newton(sys.f, sys.x0);
        const SecretKey k = generate(gen::kSchemes[seed % 4], sys.f.n, seed);
        const auto g = transform_nonlinear(sys.f, k, sys.x0);
        const auto hidden = solve_newton(std::get<NonlinearSystem>(g.problem), g.initial_point);
        if (!std::holds_alternative<NormalOutcome>(direct) || !std::holds_alternative<NormalOutcome>(hidden)) continue;
        ++both;
        const Vector x = map_forward(k, std::get<NormalOutcome>(hidden).solution);
        CHECK(norm_inf(subtract(x, std::get<NormalOutcome>(direct).solution)) <= 1e-6);
    }
    CHECK(both >= 25);
}

TEST_CASE("solve_cqp examples") {
    ConvexQuadraticProgram proj{DenseMatrix::identity(2), {0, 0}, DenseMatrix{{1, 1}}, {2}, DenseMatrix(0, 2), {}};
    const auto n = normal(solve_cqp(proj));
    CHECK(n.solution[0] == doctest::Approx(1.0));
    CHECK(n.solution[1] == doctest::Approx(1.0));
    CHECK(n.objective == doctest::Approx(1.0));

    ConvexQuadraticProgram empty{DenseMatrix::identity(1), {0}, DenseMatrix(0, 1), {}, DenseMatrix{{1}, {-1}}, {1, 0}};
    const auto out = solve_cqp(empty);
    REQUIRE(std::holds_alternative<InfeasibleOutcome>(out));
    CHECK(std::get<InfeasibleOutcome>(out).rho_star > 0);
}

TEST_CASE("property: CQP with Q = 0 agrees with the simplex") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed + 50);
        const LinearProgram lp = gen::random_lp(3, seed % 2, 2, rng);
        ConvexQuadraticProgram qp{DenseMatrix(3, 3), lp.c, lp.a, lp.b, lp.d, lp.e};
        CHECK(normal(solve_cqp(qp)).objective == doctest::Approx(normal(solve_lp(lp)).objective).epsilon(1e-7));
    }
}

TEST_CASE("property: active-set CQP agrees with KKT enumeration") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed);
        const std::size_t n = 2 + seed % 4;
        const auto qp = gen::random_cqp(n, seed % 2, 2 + seed % 5, rng);
        const auto truth = oracle::cqp_by_kkt(qp);
        REQUIRE(truth.feasible);
        const auto got = normal(solve_cqp(qp));
        CHECK(got.objective == doctest::Approx(truth.value).epsilon(1e-7));
        CHECK(norm_inf(subtract(got.solution, truth.x)) <= 1e-6);
    }
}

TEST_CASE("build_phase_one") {
    LinearProgram feasible = one_var(1, {1}, 0);
    CHECK(normal(solve_lp(build_phase_one(feasible))).objective <= 0.0);
    CHECK(normal(solve_lp(build_phase_one(one_var(1, {-1}, 0)))).objective == doctest::Approx(1.0));

    LinearProgram no_ineq{{1, 1}, DenseMatrix{{1, 2}}, {3}, DenseMatrix(0, 2), {}};
    CHECK(normal(solve_lp(build_phase_one(no_ineq))).objective == doctest::Approx(0.0));
}

TEST_CASE("build_lp_dual") {
    // Unbounded primal, infeasible dual.
    CHECK(std::holds_alternative<InfeasibleOutcome>(solve_lp(build_lp_dual(one_var(-1, {}, 0)))));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const LinearProgram lp = gen::random_lp(3, 1, 1, rng);
        const double primal = normal(solve_lp(lp)).objective;
        const double dual = normal(solve_lp(build_lp_dual(lp))).objective;
        CHECK(-dual == doctest::Approx(primal).epsilon(1e-7));
        const double twice = normal(solve_lp(build_lp_dual(build_lp_dual(lp)))).objective;
        CHECK(twice == doctest::Approx(primal).epsilon(1e-7));
    }
}

TEST_CASE("cloud adversary modes") {
    const LinearSystem g{DenseMatrix{{6, 2}, {3, 6}}, {1, -2}};
    Cloud honest;
    const auto y = normal(honest.serve(CloudTask{g})).solution;
    CHECK(y[0] == doctest::Approx(1.0 / 3));

    Cloud lazy(AdversaryMode::lazy());
    CHECK(normal(lazy.serve(CloudTask{g})).solution == Vector{0, 0});
    LinearProgram lp = one_var(1, {1}, 0);
    CHECK(normal(lazy.serve(CloudTask{lp})).solution == Vector{0});

    Cloud scaled(AdversaryMode::scaled(2.0));
    const auto s = normal(scaled.serve(CloudTask{g})).solution;
    CHECK(s[0] == doctest::Approx(2.0 / 3));
    CHECK(s[1] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(Cloud(AdversaryMode::scaled(1.0)), InvalidArgument);

    Cloud random(AdversaryMode::random(), 4);
    for (double v : normal(random.serve(CloudTask{g})).solution) CHECK(std::abs(v) <= 10.0);

    Cloud half(AdversaryMode::half_honest(), 4);
    CHECK(normal(half.serve(CloudTask{g})).solution[0] == doctest::Approx(1.0 / 3));
    CHECK(normal(half.serve(CloudTask{g})).solution[0] != doctest::Approx(1.0 / 3));
    CHECK(half.calls() == 2);
}

TEST_CASE("adversary and case names") {
    for (const char* name : {"honest", "lazy", "random", "scaled", "halfhonest"})
        CHECK(AdversaryMode::parse(name).name() == name);
    CHECK_THROWS(AdversaryMode::parse("sneaky"));
    for (auto c : {OutcomeCase::Normal, OutcomeCase::Infeasible, OutcomeCase::Unbounded, OutcomeCase::Failure})
        CHECK(parse_case_name(case_name(c)) == c);
}
