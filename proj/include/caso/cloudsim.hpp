#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "caso/problems.hpp"
#include "caso/rng.hpp"
#include "caso/transform.hpp"

namespace caso {

struct NormalOutcome {
    Vector solution;
    double objective = 0.0;  // 0 for equation systems
};

/// The problem has no feasible point. `phase1_solution` is the variable part
/// of a phase-I optimum and `rho_star` its optimal value (> 0). When the
/// equality constraints alone are inconsistent there is no phase-I optimum;
/// `phase1_solution` is then empty and `rho_star` is the phase-1 residual.
struct InfeasibleOutcome {
    Vector phase1_solution;
    double rho_star = 0.0;
};

/// The objective decreases without bound along `ray` from `feasible_point`.
struct UnboundedOutcome {
    Vector ray;
    Vector feasible_point;
};

/// The solver gave up (singular system, iteration cap, domain error).
struct FailureOutcome {
    std::string reason;
};

using SolveOutcome = std::variant<NormalOutcome, InfeasibleOutcome, UnboundedOutcome, FailureOutcome>;

enum class OutcomeCase { Normal, Infeasible, Unbounded, Failure };

OutcomeCase outcome_case(const SolveOutcome& out);
/// normal, infeasible, unbounded, failure
std::string case_name(OutcomeCase c);
OutcomeCase parse_case_name(const std::string& name);

SolveOutcome solve_linear(const LinearSystem& g);

/// Two-phase tableau simplex with Bland's rule. Free variables are split,
/// inequality rows get surplus variables. Each phase stops with a failure
/// outcome after 10·(n+m+s) pivots.
SolveOutcome solve_lp(const LinearProgram& g);

/// Damped Newton: up to 20 step halvings per iteration, a step is accepted
/// once ‖G‖₂ decreases. Stops when ‖G(y)‖₂ < eps.
SolveOutcome solve_newton(const NonlinearSystem& g, std::span<const double> y0, double eps = 1e-10,
                          std::size_t max_iter = 100);

/// Equality-only problems go through the KKT system; otherwise a primal
/// active-set method (at most 200 iterations) started from an LP-feasible
/// point.
SolveOutcome solve_cqp(const ConvexQuadraticProgram& g);

/// minimize ρ over (y, ρ) s.t. A·y = b, D·y + ρ·1 >= e, ρ free. With no
/// inequality rows the single row ρ >= 0 is added, so ρ* = 0 whenever A·y = b
/// is consistent. The optimum is <= 0 exactly when the constraint set is
/// non-empty.
LinearProgram build_phase_one(const LinearProgram& g);
LinearProgram build_phase_one(const ConvexQuadraticProgram& g);

/// The LP dual max bᵀu + eᵀv s.t. Aᵀu + Dᵀv = c, v >= 0, written in min form
/// over w = (u, v): minimize -(bᵀu + eᵀv) s.t. [Aᵀ Dᵀ]·w = c, [0 I]·w >= 0.
/// The min-form optimum is the negated dual value.
LinearProgram build_lp_dual(const LinearProgram& g);

/// What the cloud sees: a disguised problem and, for Newton, a start point.
struct CloudTask {
    Problem problem;
    Vector initial_point;
    double tolerance = 1e-10;
    std::size_t max_iterations = 100;
};

CloudTask make_task(const TransformedProblem& t);

enum class AdversaryKind { Honest, Lazy, Random, Scaled, HalfHonest };

struct AdversaryMode {
    AdversaryKind kind = AdversaryKind::Honest;
    double alpha = 2.0;  // Scaled only

    static AdversaryMode honest() { return {AdversaryKind::Honest}; }
    static AdversaryMode lazy() { return {AdversaryKind::Lazy}; }
    static AdversaryMode random() { return {AdversaryKind::Random}; }
    static AdversaryMode scaled(double alpha) { return {AdversaryKind::Scaled, alpha}; }
    static AdversaryMode half_honest() { return {AdversaryKind::HalfHonest}; }

    /// honest, lazy, random, scaled, halfhonest
    std::string name() const;
    static AdversaryMode parse(const std::string& name);
};

/// Honest solves by dispatch on the problem class.
SolveOutcome solve_task(const CloudTask& task);

/// A simulated cloud session. The adversary mode is fixed at construction.
///   Lazy        Normal(zero vector)
///   Random      Normal(vector uniform in [-10, 10])
///   Scaled      the honest outcome with every returned vector times alpha
///   HalfHonest  odd-numbered calls honest, even-numbered calls Random
class Cloud {
public:
    explicit Cloud(AdversaryMode mode = AdversaryMode::honest(), std::uint64_t seed = 0);

    SolveOutcome serve(const CloudTask& task);
    SolveOutcome serve(const TransformedProblem& t) { return serve(make_task(t)); }

    const AdversaryMode& mode() const { return mode_; }
    std::size_t calls() const { return calls_; }

private:
    SolveOutcome fabricate(std::size_t dim);

    AdversaryMode mode_;
    Rng rng_;
    std::size_t calls_ = 0;
};

}  // namespace caso
