#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "caso/matcore.hpp"
#include "caso/rng.hpp"

namespace caso {

/// Structure of the key matrix K. `parameter` is the half-bandwidth ω for
/// Band and the per-row/column nonzero count θ for Sparse.
struct KeyScheme {
    StructureKind kind = StructureKind::Diagonal;
    std::size_t parameter = 0;

    static KeyScheme diagonal() { return {StructureKind::Diagonal, 0}; }
    static KeyScheme permutation() { return {StructureKind::Permutation, 0}; }
    static KeyScheme band(std::size_t omega) { return {StructureKind::Band, omega}; }
    static KeyScheme sparse(std::size_t theta) { return {StructureKind::Sparse, theta}; }

    /// Throws InvalidArgument unless 2ω+1 <= n (band) or 1 <= θ <= n (sparse).
    void validate_for(std::size_t n) const;

    /// CLI spelling: diag, perm, band, sparse.
    std::string name() const;
    static KeyScheme parse(const std::string& name, std::size_t omega, std::size_t theta);

    bool operator==(const KeyScheme&) const = default;
};

/// The one-time secret S = (K, r) of the affine mapping x = K·y + r.
///
/// WARNING: a SecretKey must never leave the local side. The JSON form exists
/// for test fixtures and phase-wise scripting only.
///
/// Copies share a single "used" flag, so a key (and every copy of it) can
/// disguise exactly one problem.
class SecretKey {
public:
    SecretKey(StructuredMatrix k, Vector r, KeyScheme scheme, std::uint64_t seed);

    const StructuredMatrix& matrix() const { return k_; }
    const Vector& offset() const { return r_; }
    const KeyScheme& scheme() const { return scheme_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t dimension() const { return k_.dimension(); }

    bool used() const { return used_->load(); }
    /// Marks the key used; throws KeyReuse if it already was.
    void consume() const;

    /// Entry magnitudes of K in [0.5, 10] and r in [-10, 10].
    bool within_generation_bounds() const;

    /// Same K, r, scheme and seed, with an independent unused flag.
    SecretKey unused_copy() const;

    /// Compares key material only; the used flag is ignored.
    bool same_material(const SecretKey& other) const;

private:
    StructuredMatrix k_;
    Vector r_;
    KeyScheme scheme_;
    std::uint64_t seed_ = 0;
    std::shared_ptr<std::atomic<bool>> used_;
};

inline constexpr int kKeyGenAttempts = 16;

/// Deterministic for fixed (scheme, n, seed). Throws KeyGenFailure if no
/// nonsingular K is found within kKeyGenAttempts draws.
SecretKey generate(const KeyScheme& scheme, std::size_t n, std::uint64_t seed);

/// K·y + r
Vector map_forward(const SecretKey& key, std::span<const double> y, MulCounter* counter = nullptr);
/// The unique y with K·y + r = x.
Vector map_inverse(const SecretKey& key, std::span<const double> x);

/// Factorisation k_s = p·q_s of key entries.
struct SplitKey {
    double p = 1.0;
    Vector q;
};

/// p uniform on [0.5, 2] ∪ [-2, -0.5].
double draw_split_factor(Rng& rng);

SplitKey split_for_power(std::span<const double> entries, std::uint64_t seed);
/// Deterministic split with a caller-chosen factor.
SplitKey split_with_factor(std::span<const double> entries, double p);

}  // namespace caso
