#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "caso/cloudsim.hpp"
#include "caso/keys.hpp"
#include "caso/transform.hpp"

namespace caso {

enum class RejectReason {
    MismatchedSolutions,
    ResidualTooLarge,
    CaseMismatch,
    PhaseOneContradiction,
    DualContradiction,
    SolverFailure,
};

std::string reason_name(RejectReason r);

struct Verdict {
    enum class Kind { Solution, InfeasibleConfirmed, UnboundedConfirmed, Rejected };

    Kind kind = Kind::Rejected;
    Vector solution;  // Kind::Solution only
    RejectReason reason = RejectReason::MismatchedSolutions;
    std::string detail;
    /// Multiplications spent mapping the two answers back (K·y + r twice).
    std::uint64_t cross_check_mults = 0;

    bool accepted() const { return kind != Kind::Rejected; }
    /// One line, e.g. "Accept(solution)" or "Reject(MismatchedSolutions)".
    std::string describe() const;

    static Verdict accept(Vector x, std::uint64_t mults = 0);
    static Verdict infeasible_confirmed();
    static Verdict unbounded_confirmed();
    static Verdict reject(RejectReason r, std::string detail = {});
};

/// One problem outsourced twice under independent keys S1, S2.
/// Construction transforms the problem with both keys and so consumes them.
class VerificationSession {
public:
    static constexpr double kDefaultEpsilon = 1e-6;

    /// Throws InvalidArgument if the seeds coincide or a key is already used;
    /// x0 is required for non-linear systems.
    VerificationSession(Problem problem, SecretKey s1, SecretKey s2, double epsilon = kDefaultEpsilon,
                        Vector x0 = {});

    /// Rebuilds a session from keys that were already spent on these very
    /// transforms (phase-wise CLI use). The transforms are recomputed from
    /// fresh copies of the key material.
    static VerificationSession restore(Problem problem, const SecretKey& s1, const SecretKey& s2,
                                       double epsilon = kDefaultEpsilon, Vector x0 = {});

    const Problem& problem() const { return problem_; }
    const SecretKey& key1() const { return s1_; }
    const SecretKey& key2() const { return s2_; }
    const TransformedProblem& first() const { return g1_; }
    const TransformedProblem& second() const { return g2_; }
    double epsilon() const { return epsilon_; }

private:
    Problem problem_;
    SecretKey s1_;
    SecretKey s2_;
    double epsilon_;
    Vector x0_;
    TransformedProblem g1_;
    TransformedProblem g2_;
};

/// Normal/Normal: K1·y* + r1 and K2·z* + r2 must agree within
/// ε·(1 + ‖x1‖∞) (ten times that for Newton answers); linear systems also
/// need ‖A·x1 - b‖∞ <= ε·(1 + ‖b‖∞). Infeasible/Infeasible pairs are
/// passed to verify_infeasible using the certificates inside the outcomes.
/// Throws InvalidArgument for an Unbounded pair (see verify_unbounded).
Verdict verify_pair(const VerificationSession& session, const SolveOutcome& out1,
                    const SolveOutcome& out2);

/// Takes the cloud's answers to the phase-I problems of the two disguised
/// problems: either Normal outcomes over (y, ρ) or Infeasible outcomes.
/// Accepts when both ρ* > 0, the ρ* agree, and the y parts cross-check.
Verdict verify_infeasible(const VerificationSession& session, const SolveOutcome& phase1_out1,
                          const SolveOutcome& phase1_out2);

/// Takes the cloud's answers to the phase-I problems of the two disguised
/// duals, over (u, v, ρ). Dual multipliers are not disguised by the key, so
/// the two answers are compared directly; each must also satisfy its own
/// dual phase-I constraints. Accepts when both ρ* > 0 (dual infeasible).
/// Throws UnsupportedClass unless the session holds an LP.
Verdict verify_unbounded(const VerificationSession& session, const SolveOutcome& dual_phase1_out1,
                         const SolveOutcome& dual_phase1_out2);

struct ProtocolReport {
    Verdict verdict;
    SolveOutcome first;
    SolveOutcome second;
    /// Phase-I answers (infeasible claims) or dual phase-I answers
    /// (unbounded claims).
    std::optional<SolveOutcome> first_certificate;
    std::optional<SolveOutcome> second_certificate;
    std::uint64_t mult_count_first = 0;
    std::uint64_t mult_count_second = 0;
    /// Objective of F at the accepted solution (LP and CQP).
    std::optional<double> objective;
};

/// Disguised problem the cloud is asked to solve when an infeasible claim
/// must be checked (`which` is 1 or 2).
LinearProgram phase_one_request(const VerificationSession& session, int which);
/// Same for unbounded claims: phase-I of the disguised dual.
LinearProgram dual_phase_one_request(const VerificationSession& session, int which);

/// Sends both disguised problems to the cloud, follows up with phase-I or
/// dual phase-I requests when the cloud claims infeasibility or
/// unboundedness, and returns the verdict.
ProtocolReport run_protocol(const VerificationSession& session, Cloud& cloud);

/// Two distinct key seeds derived from one seed.
std::pair<std::uint64_t, std::uint64_t> session_seeds(std::uint64_t seed);

/// Generates both keys from `seed` and runs the protocol.
ProtocolReport run_protocol(const Problem& problem, const KeyScheme& scheme, std::uint64_t seed,
                            Cloud& cloud, double epsilon = VerificationSession::kDefaultEpsilon,
                            Vector x0 = {});

}  // namespace caso
