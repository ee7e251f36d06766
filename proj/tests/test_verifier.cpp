#include <doctest.h>

#include "caso/errors.hpp"
#include "caso/verifier.hpp"
#include "generators.hpp"

using namespace caso;

namespace {

const LinearSystem kWorked{DenseMatrix{{1, 2}, {3, 1}}, {6, 3}};

LinearProgram infeasible_toy() {
    return {{1}, DenseMatrix{{1}}, {-1}, DenseMatrix{{1}}, {0}};
}

LinearProgram unbounded_toy() {
    return {{-1}, DenseMatrix(0, 1), {}, DenseMatrix{{1}}, {0}};
}

VerificationSession session_for(const Problem& p, std::uint64_t seed, const KeyScheme& s = KeyScheme::diagonal(),
                                Vector x0 = {}) {
    const auto [a, b] = session_seeds(seed);
    const std::size_t n = num_vars(p);
    return VerificationSession(p, generate(s, n, a), generate(s, n, b), VerificationSession::kDefaultEpsilon,
                               std::move(x0));
}

std::pair<SolveOutcome, SolveOutcome> honest_phase_one(const VerificationSession& s) {
    return {solve_lp(phase_one_request(s, 1)), solve_lp(phase_one_request(s, 2))};
}

std::pair<SolveOutcome, SolveOutcome> honest_dual_phase_one(const VerificationSession& s) {
    return {solve_lp(dual_phase_one_request(s, 1)), solve_lp(dual_phase_one_request(s, 2))};
}

}  // namespace

TEST_CASE("honest cloud on the worked system is accepted") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Cloud cloud;
        const auto report = run_protocol(kWorked, gen::kSchemes[seed % 2], seed, cloud);
        REQUIRE(report.verdict.kind == Verdict::Kind::Solution);
        CHECK(report.verdict.solution[0] == doctest::Approx(0.0));
        CHECK(report.verdict.solution[1] == doctest::Approx(3.0));
        CHECK(report.verdict.describe() == "Accept(solution)");
    }
}

TEST_CASE("session construction guards") {
    const SecretKey a = generate(KeyScheme::diagonal(), 2, 5);
    CHECK_THROWS_AS(VerificationSession(kWorked, a, generate(KeyScheme::diagonal(), 2, 5)), InvalidArgument);
    const SecretKey used = generate(KeyScheme::diagonal(), 2, 6);
    used.consume();
    CHECK_THROWS_AS(VerificationSession(kWorked, a.unused_copy(), used), InvalidArgument);
    CHECK_THROWS_AS(VerificationSession(kWorked, a.unused_copy(), generate(KeyScheme::diagonal(), 2, 7), 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(VerificationSession(gen::example_system(), generate(KeyScheme::diagonal(), 3, 1),
                                        generate(KeyScheme::diagonal(), 3, 2)),
                    InvalidArgument);
}

TEST_CASE("lazy cloud is rejected on 100 sessions") {
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Cloud cloud(AdversaryMode::lazy());
        const auto report = run_protocol(kWorked, KeyScheme::permutation(), seed, cloud);
        rejected += report.verdict.kind == Verdict::Kind::Rejected &&
                    report.verdict.reason == RejectReason::MismatchedSolutions;
    }
    CHECK(rejected == 100);
}

TEST_CASE("verify_pair reject reasons") {
    const auto s = session_for(kWorked, 3);
    const SolveOutcome good1 = solve_linear(std::get<LinearSystem>(s.first().problem));
    const SolveOutcome good2 = solve_linear(std::get<LinearSystem>(s.second().problem));
    CHECK(verify_pair(s, good1, good2).kind == Verdict::Kind::Solution);
    CHECK(verify_pair(s, good1, InfeasibleOutcome{{0, 0}, 1.0}).reason == RejectReason::CaseMismatch);
    CHECK(verify_pair(s, good1, FailureOutcome{"x"}).reason == RejectReason::SolverFailure);
    CHECK(verify_pair(s, good1, NormalOutcome{{1, 2, 3}}).reason == RejectReason::MismatchedSolutions);
    CHECK_THROWS_AS(verify_pair(s, UnboundedOutcome{}, UnboundedOutcome{}), InvalidArgument);
}

TEST_CASE("consistent answers that miss the equations fail the residual check") {
    // Both answers map to the same wrong point x = (1, 1).
    const auto s = session_for(kWorked, 4);
    const Vector x{1, 1};
    const Verdict v = verify_pair(s, NormalOutcome{map_inverse(s.key1(), x)}, NormalOutcome{map_inverse(s.key2(), x)});
    CHECK(v.reason == RejectReason::ResidualTooLarge);
}

TEST_CASE("verification cost is within the quadratic bound") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const std::size_t n = 8;
        const auto s = session_for(gen::random_system(n, rng), seed, KeyScheme::band(2));
        const Verdict v = verify_pair(s, solve_linear(std::get<LinearSystem>(s.first().problem)),
                                      solve_linear(std::get<LinearSystem>(s.second().problem)));
        REQUIRE(v.accepted());
        CHECK(v.cross_check_mults <= 2 * (s.key1().matrix().nnz() + s.key2().matrix().nnz()) + 2 * n);
    }
}

TEST_CASE("verify_infeasible examples") {
    Cloud cloud;
    const auto report = run_protocol(infeasible_toy(), KeyScheme::diagonal(), 1, cloud);
    CHECK(report.verdict.kind == Verdict::Kind::InfeasibleConfirmed);

    // Feasible LP, infeasibility claimed: the honest phase-I optimum is <= 0.
    const LinearProgram feasible{{1}, DenseMatrix{{1}}, {1}, DenseMatrix{{1}}, {0}};
    const auto s = session_for(feasible, 2);
    const auto [p1, p2] = honest_phase_one(s);
    CHECK(verify_infeasible(s, p1, p2).reason == RejectReason::PhaseOneContradiction);
    // Fabricated positive optima that do not cross-check.
    CHECK(verify_infeasible(s, NormalOutcome{{0.3, 1.0}, 1.0}, NormalOutcome{{-2.0, 1.0}, 1.0}).reason ==
          RejectReason::PhaseOneContradiction);

    // One positive and one non-positive optimum.
    const auto t = session_for(infeasible_toy(), 5);
    const auto [q1, q2] = honest_phase_one(t);
    CHECK(verify_infeasible(t, q1, q2).kind == Verdict::Kind::InfeasibleConfirmed);
    auto bad = std::get<NormalOutcome>(q2);
    bad.solution.back() = -0.5;
    CHECK(verify_infeasible(t, q1, bad).reason == RejectReason::PhaseOneContradiction);
}

TEST_CASE("verify_unbounded examples") {
    Cloud cloud;
    CHECK(run_protocol(unbounded_toy(), KeyScheme::diagonal(), 1, cloud).verdict.kind ==
          Verdict::Kind::UnboundedConfirmed);

    // Bounded LP, unboundedness claimed: the honest dual phase-I optimum is <= 0.
    const LinearProgram bounded{{1}, DenseMatrix(0, 1), {}, DenseMatrix{{1}}, {0}};
    const auto s = session_for(bounded, 2);
    const auto [d1, d2] = honest_dual_phase_one(s);
    CHECK(verify_unbounded(s, d1, d2).reason == RejectReason::DualContradiction);

    const ConvexQuadraticProgram qp{DenseMatrix::identity(1), {0}, DenseMatrix(0, 1), {}, DenseMatrix{{1}}, {0}};
    const auto q = session_for(qp, 3);
    CHECK_THROWS_AS(verify_unbounded(q, d1, d2), UnsupportedClass);
}

TEST_CASE("phase-I corpus: verdicts follow the sign of the optimum") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const bool empty = seed % 2 == 0;
        const auto c = gen::phase_one_lp(2 + seed % 4, empty ? rng.uniform(0.2, 2) : -rng.uniform(0.2, 2), rng);
        const auto s = session_for(c.lp, seed, gen::kSchemes[seed % 4]);
        const auto [p1, p2] = honest_phase_one(s);
        CHECK(std::get<NormalOutcome>(p1).objective == doctest::Approx(c.rho_star));
        const Verdict v = verify_infeasible(s, p1, p2);
        CHECK(v.kind == (empty ? Verdict::Kind::InfeasibleConfirmed : Verdict::Kind::Rejected));
    }
}

TEST_CASE("unbounded corpus: honest claims accepted, false claims rejected") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const std::size_t n = 2 + seed % 4;
        Cloud cloud;
        const LinearProgram unb = gen::unbounded_family_lp(n, true, rng);
        const auto report = run_protocol(unb, gen::kSchemes[seed % 4], seed, cloud);
        CHECK(report.verdict.kind == Verdict::Kind::UnboundedConfirmed);

        const auto s = session_for(gen::unbounded_family_lp(n, false, rng), seed, gen::kSchemes[seed % 4]);
        const auto [d1, d2] = honest_dual_phase_one(s);
        CHECK(verify_unbounded(s, d1, d2).reason == RejectReason::DualContradiction);
    }
}

TEST_CASE("property: completeness and soundness across classes") {
    const AdversaryMode cheats[] = {AdversaryMode::lazy(), AdversaryMode::random(), AdversaryMode::scaled(2.0),
                                    AdversaryMode::scaled(-0.5), AdversaryMode::half_honest()};
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(seed);
        const std::size_t n = 3 + seed % 3;
        const auto rooted = gen::rooted_polynomial(n, rng);
        const std::vector<std::pair<Problem, Vector>> problems = {
            {gen::random_system(n, rng), {}},
            {gen::random_lp(n, 1, 1, rng), {}},
            {gen::random_cqp(n, 1, 2, rng), {}},
            {rooted.f, rooted.x0},
        };
        for (const auto& [p, x0] : problems) {
            const KeyScheme& scheme = gen::kSchemes[seed % 4];
            Cloud honest(AdversaryMode::honest(), seed);
            CHECK(run_protocol(p, scheme, seed, honest, VerificationSession::kDefaultEpsilon, x0).verdict.accepted());
            for (const auto& mode : cheats) {
                Cloud cheat(mode, seed);
                CHECK_FALSE(run_protocol(p, scheme, seed, cheat, VerificationSession::kDefaultEpsilon, x0)
                                .verdict.accepted());
            }
        }
    }
}

TEST_CASE("restore rebuilds the session from spent keys") {
    const auto [a, b] = session_seeds(9);
    const SecretKey k1 = generate(KeyScheme::diagonal(), 2, a), k2 = generate(KeyScheme::diagonal(), 2, b);
    const VerificationSession first(kWorked, k1, k2);
    CHECK(k1.used());
    const auto again = VerificationSession::restore(kWorked, k1, k2);
    CHECK(std::get<LinearSystem>(again.first().problem) == std::get<LinearSystem>(first.first().problem));
}

TEST_CASE("reason names") {
    CHECK(reason_name(RejectReason::DualContradiction) == "DualContradiction");
    CHECK(Verdict::reject(RejectReason::CaseMismatch).describe() == "Reject(CaseMismatch)");
    CHECK(Verdict::infeasible_confirmed().accepted());
}
