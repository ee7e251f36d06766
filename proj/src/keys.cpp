#include "caso/keys.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "caso/errors.hpp"

namespace caso {

void KeyScheme::validate_for(std::size_t n) const {
    if (n == 0) throw InvalidArgument("key dimension must be at least 1");
    if (kind == StructureKind::Band && 2 * parameter + 1 > n)
        throw InvalidArgument("band key needs 2*omega+1 <= n");
    if (kind == StructureKind::Sparse && (parameter < 1 || parameter > n))
        throw InvalidArgument("sparse key needs 1 <= theta <= n");
}

std::string KeyScheme::name() const {
    switch (kind) {
        case StructureKind::Diagonal: return "diag";
        case StructureKind::Permutation: return "perm";
        case StructureKind::Band: return "band";
        case StructureKind::Sparse: return "sparse";
    }
    return "unknown";
}

KeyScheme KeyScheme::parse(const std::string& name, std::size_t omega, std::size_t theta) {
    if (name == "diag" || name == "diagonal") return diagonal();
    if (name == "perm" || name == "permutation") return permutation();
    if (name == "band") return band(omega);
    if (name == "sparse") return sparse(theta);
    throw InvalidArgument("unknown key scheme '" + name + "'");
}

SecretKey::SecretKey(StructuredMatrix k, Vector r, KeyScheme scheme, std::uint64_t seed)
    : k_(std::move(k)),
      r_(std::move(r)),
      scheme_(scheme),
      seed_(seed),
      used_(std::make_shared<std::atomic<bool>>(false)) {
    if (r_.size() != k_.dimension()) throw DimensionMismatch("key offset r must match dimension of K");
    if (!all_finite(r_)) throw InvalidArgument("key offset r must be finite");
    if (scheme_.kind != k_.kind()) throw InvalidArgument("key scheme does not match structure of K");
    if (scheme_.kind == StructureKind::Band || scheme_.kind == StructureKind::Sparse)
        scheme_.parameter = k_.parameter();
}

void SecretKey::consume() const {
    if (used_->exchange(true)) throw KeyReuse("secret key already used for a transform");
}

bool SecretKey::within_generation_bounds() const {
    for (const auto& e : k_.entries())
        if (std::abs(e.value) < 0.5 || std::abs(e.value) > 10.0) return false;
    return std::all_of(r_.begin(), r_.end(), [](double v) { return v >= -10.0 && v <= 10.0; });
}

SecretKey SecretKey::unused_copy() const { return SecretKey(k_, r_, scheme_, seed_); }

bool SecretKey::same_material(const SecretKey& other) const {
    return k_ == other.k_ && r_ == other.r_;
}

namespace {

constexpr double kMinMagnitude = 0.5;
constexpr double kMaxMagnitude = 10.0;

StructuredMatrix draw_band(std::size_t n, std::size_t omega, Rng& rng, bool& dominant) {
    // Diagonal dominance is reachable inside [0.5, 10] while the 2ω
    // off-diagonal magnitudes can sum below 9.
    const double off_hi = omega == 0 ? 0.0 : 9.0 / (2.0 * static_cast<double>(omega));
    dominant = omega == 0 || off_hi >= kMinMagnitude;
    std::vector<Triplet> entries;
    entries.reserve(n * (2 * omega + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= omega ? i - omega : 0;
        const std::size_t hi = std::min(n - 1, i + omega);
        double off_sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            const double v = dominant ? rng.signed_magnitude(kMinMagnitude, off_hi)
                                      : rng.signed_magnitude(kMinMagnitude, kMaxMagnitude);
            off_sum += std::abs(v);
            entries.push_back({i, j, v});
        }
        double diag;
        if (dominant) {
            const double mag = off_sum + (kMaxMagnitude - off_sum) * rng.uniform(0.1, 1.0);
            diag = rng.coin() ? mag : -mag;
        } else {
            diag = rng.signed_magnitude(kMinMagnitude, kMaxMagnitude);
        }
        entries.push_back({i, i, diag});
    }
    return StructuredMatrix::band(n, omega, std::move(entries));
}

// θ disjoint placements (a, (a + d) mod n) under random row and column
// relabelings: a permutation backbone plus θ-1 further permutations, so every
// row and column holds exactly θ nonzeros.
StructuredMatrix draw_sparse(std::size_t n, std::size_t theta, Rng& rng) {
    const auto rows = rng.permutation(n);
    const auto cols = rng.permutation(n);
    auto offsets = rng.permutation(n);
    offsets.resize(theta);
    std::vector<Triplet> entries;
    entries.reserve(n * theta);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t d : offsets)
            entries.push_back({rows[a], cols[(a + d) % n], rng.signed_magnitude(kMinMagnitude, kMaxMagnitude)});
    return StructuredMatrix::sparse(n, theta, std::move(entries));
}

bool nonsingular(const StructuredMatrix& k) {
    // Probe solve runs the same LU path that map_inverse will use.
    try {
        const Vector probe(k.dimension(), 1.0);
        const Vector w = structured_solve(k, probe);
        return all_finite(w);
    } catch (const SingularMatrix&) {
        return false;
    }
}

}  // namespace

SecretKey generate(const KeyScheme& scheme, std::size_t n, std::uint64_t seed) {
    scheme.validate_for(n);
    Rng rng(seed);
    for (int attempt = 0; attempt < kKeyGenAttempts; ++attempt) {
        StructuredMatrix k;
        bool certified = false;
        switch (scheme.kind) {
            case StructureKind::Diagonal: {
                Vector v(n);
                for (double& x : v) x = rng.signed_magnitude(kMinMagnitude, kMaxMagnitude);
                k = StructuredMatrix::diagonal(v);
                certified = true;
                break;
            }
            case StructureKind::Permutation: {
                const auto perm = rng.permutation(n);
                Vector v(n);
                for (double& x : v) x = rng.signed_magnitude(kMinMagnitude, kMaxMagnitude);
                k = StructuredMatrix::permutation(perm, v);
                certified = true;
                break;
            }
            case StructureKind::Band:
                k = draw_band(n, scheme.parameter, rng, certified);
                break;
            case StructureKind::Sparse:
                k = draw_sparse(n, scheme.parameter, rng);
                break;
        }
        Vector r(n);
        for (double& x : r) x = rng.uniform(-kMaxMagnitude, kMaxMagnitude);
        if (certified || nonsingular(k)) return SecretKey(std::move(k), std::move(r), scheme, seed);
    }
    throw KeyGenFailure("no nonsingular key after " + std::to_string(kKeyGenAttempts) + " draws");
}

Vector map_forward(const SecretKey& key, std::span<const double> y, MulCounter* counter) {
    if (y.size() != key.dimension()) throw DimensionMismatch("map_forward: dimension mismatch");
    Vector x = key.matrix().multiply(y, counter);
    const auto& r = key.offset();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += r[i];
    return x;
}

Vector map_inverse(const SecretKey& key, std::span<const double> x) {
    if (x.size() != key.dimension()) throw DimensionMismatch("map_inverse: dimension mismatch");
    return structured_solve(key.matrix(), subtract(x, key.offset()));
}

double draw_split_factor(Rng& rng) { return rng.signed_magnitude(0.5, 2.0); }

SplitKey split_with_factor(std::span<const double> entries, double p) {
    if (p == 0.0 || !std::isfinite(p)) throw InvalidArgument("split factor must be finite and nonzero");
    SplitKey s;
    s.p = p;
    s.q.reserve(entries.size());
    for (double k : entries) s.q.push_back(k / p);
    return s;
}

SplitKey split_for_power(std::span<const double> entries, std::uint64_t seed) {
    if (entries.empty()) throw InvalidArgument("split_for_power: no entries");
    Rng rng(seed);
    return split_with_factor(entries, draw_split_factor(rng));
}

}  // namespace caso
