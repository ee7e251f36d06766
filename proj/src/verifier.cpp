#include "caso/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "caso/errors.hpp"

namespace caso {

std::string reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::MismatchedSolutions: return "MismatchedSolutions";
        case RejectReason::ResidualTooLarge: return "ResidualTooLarge";
        case RejectReason::CaseMismatch: return "CaseMismatch";
        case RejectReason::PhaseOneContradiction: return "PhaseOneContradiction";
        case RejectReason::DualContradiction: return "DualContradiction";
        case RejectReason::SolverFailure: return "SolverFailure";
    }
    return "Unknown";
}

std::string Verdict::describe() const {
    switch (kind) {
        case Kind::Solution: return "Accept(solution)";
        case Kind::InfeasibleConfirmed: return "Accept(InfeasibleConfirmed)";
        case Kind::UnboundedConfirmed: return "Accept(UnboundedConfirmed)";
        case Kind::Rejected: return "Reject(" + reason_name(reason) + ")";
    }
    return "Reject(Unknown)";
}

Verdict Verdict::accept(Vector x, std::uint64_t mults) {
    Verdict v;
    v.kind = Kind::Solution;
    v.solution = std::move(x);
    v.cross_check_mults = mults;
    return v;
}

Verdict Verdict::infeasible_confirmed() {
    Verdict v;
    v.kind = Kind::InfeasibleConfirmed;
    return v;
}

Verdict Verdict::unbounded_confirmed() {
    Verdict v;
    v.kind = Kind::UnboundedConfirmed;
    return v;
}

Verdict Verdict::reject(RejectReason r, std::string detail) {
    Verdict v;
    v.kind = Kind::Rejected;
    v.reason = r;
    v.detail = std::move(detail);
    return v;
}

// ---------------------------------------------------------------------------
// Session

VerificationSession::VerificationSession(Problem problem, SecretKey s1, SecretKey s2, double epsilon,
                                         Vector x0)
    : problem_(std::move(problem)),
      s1_(std::move(s1)),
      s2_(std::move(s2)),
      epsilon_(epsilon),
      x0_(std::move(x0)) {
    if (s1_.seed() == s2_.seed()) throw InvalidArgument("session keys must come from distinct seeds");
    if (s1_.used() || s2_.used()) throw InvalidArgument("session keys must be unused");
    if (!(epsilon_ > 0.0)) throw InvalidArgument("verification tolerance must be positive");
    g1_ = transform(problem_, s1_, x0_);
    g2_ = transform(problem_, s2_, x0_);
}

VerificationSession VerificationSession::restore(Problem problem, const SecretKey& s1, const SecretKey& s2,
                                                 double epsilon, Vector x0) {
    return VerificationSession(std::move(problem), s1.unused_copy(), s2.unused_copy(), epsilon, std::move(x0));
}

// ---------------------------------------------------------------------------
// Checks

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

bool is_nonlinear(const Problem& p) { return std::holds_alternative<NonlinearSystem>(p); }

struct PhaseOnePoint {
    Vector y;
    double rho = 0.0;
};

std::optional<PhaseOnePoint> phase_one_point(const SolveOutcome& out, std::size_t n) {
    if (const auto* normal = std::get_if<NormalOutcome>(&out)) {
        if (normal->solution.size() != n + 1) return std::nullopt;
        return PhaseOnePoint{Vector(normal->solution.begin(), normal->solution.end() - 1),
                             normal->solution.back()};
    }
    if (const auto* inf = std::get_if<InfeasibleOutcome>(&out)) {
        if (inf->phase1_solution.size() != n) return std::nullopt;
        return PhaseOnePoint{inf->phase1_solution, inf->rho_star};
    }
    return std::nullopt;
}

// Residual check of a dual phase-I point w = (u, v, ρ) against its own
// constraints, scaled per row by the magnitude of the terms involved.
bool satisfies(const LinearProgram& lp, std::span<const double> w, double eps) {
    for (std::size_t i = 0; i < lp.a.rows(); ++i) {
        double s = 0.0;
        double mag = std::abs(lp.b[i]);
        for (std::size_t j = 0; j < w.size(); ++j) {
            s += lp.a(i, j) * w[j];
            mag += std::abs(lp.a(i, j) * w[j]);
        }
        if (std::abs(s - lp.b[i]) > eps * (1.0 + mag)) return false;
    }
    for (std::size_t i = 0; i < lp.d.rows(); ++i) {
        double s = 0.0;
        double mag = std::abs(lp.e[i]);
        for (std::size_t j = 0; j < w.size(); ++j) {
            s += lp.d(i, j) * w[j];
            mag += std::abs(lp.d(i, j) * w[j]);
        }
        if (s - lp.e[i] < -eps * (1.0 + mag)) return false;
    }
    return true;
}

}  // namespace

Verdict verify_pair(const VerificationSession& session, const SolveOutcome& out1, const SolveOutcome& out2) {
    const OutcomeCase c1 = outcome_case(out1);
    const OutcomeCase c2 = outcome_case(out2);
    if (c1 == OutcomeCase::Failure || c2 == OutcomeCase::Failure)
        return Verdict::reject(RejectReason::SolverFailure, "the cloud reported a solver failure");
    if (c1 != c2)
        return Verdict::reject(RejectReason::CaseMismatch, case_name(c1) + " vs " + case_name(c2));
    if (c1 == OutcomeCase::Infeasible) return verify_infeasible(session, out1, out2);
    if (c1 == OutcomeCase::Unbounded)
        throw InvalidArgument("unbounded claims are settled by verify_unbounded");

    const auto& y = std::get<NormalOutcome>(out1).solution;
    const auto& z = std::get<NormalOutcome>(out2).solution;
    const std::size_t n = session.key1().dimension();
    if (y.size() != n || z.size() != n)
        return Verdict::reject(RejectReason::MismatchedSolutions, "answer has the wrong dimension");
    if (!all_finite(y) || !all_finite(z))
        return Verdict::reject(RejectReason::MismatchedSolutions, "answer is not finite");
    MulCounter counter;
    Vector x1 = recover(y, session.key1(), &counter);
    const Vector x2 = recover(z, session.key2(), &counter);
    const double eps = session.epsilon() * (is_nonlinear(session.problem()) ? 10.0 : 1.0);
    const double gap = max_abs_diff(x1, x2);
    if (gap > eps * (1.0 + norm_inf(x1)))
        return Verdict::reject(RejectReason::MismatchedSolutions,
                               "‖x1 - x2‖∞ = " + std::to_string(gap));
    if (const auto* sys = std::get_if<LinearSystem>(&session.problem())) {
        const double res = max_abs_diff(multiply(sys->a, x1), sys->b);
        if (res > eps * (1.0 + norm_inf(sys->b)))
            return Verdict::reject(RejectReason::ResidualTooLarge, "‖A·x - b‖∞ = " + std::to_string(res));
    }
    return Verdict::accept(std::move(x1), counter.count());
}

Verdict verify_infeasible(const VerificationSession& session, const SolveOutcome& phase1_out1,
                          const SolveOutcome& phase1_out2) {
    const std::size_t n = session.key1().dimension();
    const auto p1 = phase_one_point(phase1_out1, n);
    const auto p2 = phase_one_point(phase1_out2, n);
    if (!p1 || !p2)
        return Verdict::reject(RejectReason::PhaseOneContradiction, "missing or malformed phase-I answer");
    if (!all_finite(p1->y) || !all_finite(p2->y) || !std::isfinite(p1->rho) || !std::isfinite(p2->rho))
        return Verdict::reject(RejectReason::PhaseOneContradiction, "phase-I answer is not finite");
    if (!(p1->rho > 0.0) || !(p2->rho > 0.0))
        return Verdict::reject(RejectReason::PhaseOneContradiction, "phase-I optimum is not positive");
    const double eps = session.epsilon();
    if (std::abs(p1->rho - p2->rho) > eps * (1.0 + std::abs(p1->rho)))
        return Verdict::reject(RejectReason::PhaseOneContradiction, "phase-I optima differ");
    const Vector x1 = recover(p1->y, session.key1());
    const Vector x2 = recover(p2->y, session.key2());
    if (max_abs_diff(x1, x2) > eps * (1.0 + norm_inf(x1)))
        return Verdict::reject(RejectReason::PhaseOneContradiction, "phase-I points do not cross-check");
    return Verdict::infeasible_confirmed();
}

LinearProgram phase_one_request(const VerificationSession& session, int which) {
    const TransformedProblem& g = which == 1 ? session.first() : session.second();
    if (const auto* lp = std::get_if<LinearProgram>(&g.problem)) return build_phase_one(*lp);
    if (const auto* qp = std::get_if<ConvexQuadraticProgram>(&g.problem)) return build_phase_one(*qp);
    throw UnsupportedClass("phase-I checks apply to LP and CQP only");
}

LinearProgram dual_phase_one_request(const VerificationSession& session, int which) {
    const TransformedProblem& g = which == 1 ? session.first() : session.second();
    const auto* lp = std::get_if<LinearProgram>(&g.problem);
    if (!lp) throw UnsupportedClass("unbounded verification is implemented for LP only");
    return build_phase_one(build_lp_dual(*lp));
}

Verdict verify_unbounded(const VerificationSession& session, const SolveOutcome& dual_phase1_out1,
                         const SolveOutcome& dual_phase1_out2) {
    const LinearProgram req1 = dual_phase_one_request(session, 1);
    const LinearProgram req2 = dual_phase_one_request(session, 2);
    const auto* a1 = std::get_if<NormalOutcome>(&dual_phase1_out1);
    const auto* a2 = std::get_if<NormalOutcome>(&dual_phase1_out2);
    if (!a1 || !a2) return Verdict::reject(RejectReason::DualContradiction, "no dual phase-I optimum");
    const auto& w1 = a1->solution;
    const auto& w2 = a2->solution;
    if (w1.size() != req1.num_vars() || w2.size() != req2.num_vars())
        return Verdict::reject(RejectReason::DualContradiction, "dual answer has the wrong dimension");
    if (!all_finite(w1) || !all_finite(w2))
        return Verdict::reject(RejectReason::DualContradiction, "dual answer is not finite");
    const double rho1 = w1.back();
    const double rho2 = w2.back();
    if (!(rho1 > 0.0) || !(rho2 > 0.0))
        return Verdict::reject(RejectReason::DualContradiction, "dual phase-I optimum is not positive");
    const double eps = session.epsilon();
    if (!satisfies(req1, w1, eps) || !satisfies(req2, w2, eps))
        return Verdict::reject(RejectReason::DualContradiction, "dual phase-I point violates its constraints");
    if (max_abs_diff(w1, w2) > eps * (1.0 + norm_inf(w1)))
        return Verdict::reject(RejectReason::DualContradiction, "dual phase-I points do not cross-check");
    return Verdict::unbounded_confirmed();
}

// ---------------------------------------------------------------------------
// Orchestration

std::pair<std::uint64_t, std::uint64_t> session_seeds(std::uint64_t seed) {
    Rng rng(seed);
    const std::uint64_t a = rng.next();
    std::uint64_t b = rng.next();
    while (b == a) b = rng.next();
    return {a, b};
}

ProtocolReport run_protocol(const VerificationSession& session, Cloud& cloud) {
    ProtocolReport report{Verdict{}, FailureOutcome{}, FailureOutcome{}};
    report.mult_count_first = session.first().mult_count;
    report.mult_count_second = session.second().mult_count;
    report.first = cloud.serve(session.first());
    report.second = cloud.serve(session.second());
    const OutcomeCase c1 = outcome_case(report.first);
    const OutcomeCase c2 = outcome_case(report.second);
    if (c1 == OutcomeCase::Failure || c2 == OutcomeCase::Failure || c1 != c2) {
        report.verdict = verify_pair(session, report.first, report.second);
        return report;
    }
    const ProblemClass cls = problem_class(session.problem());
    const bool optimization = cls == ProblemClass::LinearProgram || cls == ProblemClass::ConvexQuadratic;
    if (c1 == OutcomeCase::Infeasible) {
        if (!optimization) {
            report.verdict = Verdict::reject(RejectReason::PhaseOneContradiction,
                                             "infeasibility claimed for an equation system");
            return report;
        }
        report.first_certificate = cloud.serve(CloudTask{phase_one_request(session, 1)});
        report.second_certificate = cloud.serve(CloudTask{phase_one_request(session, 2)});
        report.verdict = verify_infeasible(session, *report.first_certificate, *report.second_certificate);
        return report;
    }
    if (c1 == OutcomeCase::Unbounded) {
        if (!optimization) {
            report.verdict = Verdict::reject(RejectReason::DualContradiction,
                                             "unboundedness claimed for an equation system");
            return report;
        }
        if (cls != ProblemClass::LinearProgram)
            throw UnsupportedClass("unbounded verification is implemented for LP only");
        report.first_certificate = cloud.serve(CloudTask{dual_phase_one_request(session, 1)});
        report.second_certificate = cloud.serve(CloudTask{dual_phase_one_request(session, 2)});
        report.verdict = verify_unbounded(session, *report.first_certificate, *report.second_certificate);
        return report;
    }
    report.verdict = verify_pair(session, report.first, report.second);
    if (report.verdict.kind == Verdict::Kind::Solution) {
        if (const auto* lp = std::get_if<LinearProgram>(&session.problem()))
            report.objective = lp->objective(report.verdict.solution);
        else if (const auto* qp = std::get_if<ConvexQuadraticProgram>(&session.problem()))
            report.objective = qp->objective(report.verdict.solution);
    }
    return report;
}

ProtocolReport run_protocol(const Problem& problem, const KeyScheme& scheme, std::uint64_t seed,
                            Cloud& cloud, double epsilon, Vector x0) {
    const std::size_t n = num_vars(problem);
    const auto [seed1, seed2] = session_seeds(seed);
    SecretKey s1 = generate(scheme, n, seed1);
    SecretKey s2 = generate(scheme, n, seed2);
    const VerificationSession session(problem, std::move(s1), std::move(s2), epsilon, std::move(x0));
    return run_protocol(session, cloud);
}

}  // namespace caso
