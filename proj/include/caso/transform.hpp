#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "caso/keys.hpp"
#include "caso/problems.hpp"

namespace caso {

/// A disguised problem G together with the bookkeeping the local side keeps.
struct TransformedProblem {
    Problem problem;
    KeyScheme scheme_used;
    /// Multiplications spent on products with K (A·K, D·K, Kᵀ·Q·K, or the
    /// substitution into non-linear terms). This is the quantity tabulated
    /// per scheme.
    std::uint64_t mult_count = 0;
    /// Remaining multiplications (A·r, Kᵀ·c, offsets).
    std::uint64_t aux_mult_count = 0;
    /// Added to G's objective to obtain F's objective (LP and CQP).
    double objective_offset = 0.0;
    /// Disguised starting point y0 = K⁻¹(x0 - r); non-linear systems only.
    Vector initial_point;
};

/// Source of the split multipliers for polynomial terms. Each call returns
/// 1/p for a fresh split k_s = p·q_s, so q_s = k_s·(1/p) and t becomes
/// t·p^m = t / (1/p)^m.
using SplitSource = std::function<double()>;

TransformedProblem transform_linear(const LinearSystem& f, const SecretKey& key);
TransformedProblem transform_lp(const LinearProgram& f, const SecretKey& key);
TransformedProblem transform_cqp(const ConvexQuadraticProgram& f, const SecretKey& key);

/// Term-wise substitution x = K·y + r. Polynomial terms of degree >= 2 and
/// terms with cofactors get their affine factors split with independent
/// multipliers; Power(1) terms absorb their coefficient into the argument.
/// Throws DomainError if x0 is outside the domain of F.
TransformedProblem transform_nonlinear(const NonlinearSystem& f, const SecretKey& key,
                                       std::span<const double> x0);
TransformedProblem transform_nonlinear(const NonlinearSystem& f, const SecretKey& key,
                                       std::span<const double> x0, const SplitSource& split);

/// Dispatches on the problem class; x0 is required for non-linear systems.
TransformedProblem transform(const Problem& f, const SecretKey& key, std::span<const double> x0 = {});

/// x* = K·y* + r (identical for every class).
Vector recover(std::span<const double> y_star, const SecretKey& key, MulCounter* counter = nullptr);
Vector recover_linear(std::span<const double> y_star, const SecretKey& key);
Vector recover_nonlinear(std::span<const double> y_star, const SecretKey& key);

/// Cost of u^m by square-and-multiply: floor(log2 m) + popcount(m) - 1.
unsigned power_chain_cost(unsigned m);

}  // namespace caso
