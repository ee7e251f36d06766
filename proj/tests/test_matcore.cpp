#include <doctest.h>

#include "caso/errors.hpp"
#include "caso/keys.hpp"
#include "caso/matcore.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace caso;

namespace {

StructuredMatrix swap_key() { return StructuredMatrix::permutation({1, 0}, {2, 3}); }

void check_close(const DenseMatrix& a, const DenseMatrix& b, double rel) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    const double scale = std::max(1.0, b.max_abs());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) CHECK(std::abs(a(i, j) - b(i, j)) <= rel * scale);
}

}  // namespace

TEST_CASE("mul_structured on the worked two-by-two example") {
    MulCounter c;
    const DenseMatrix a{{1, 2}, {3, 1}};
    CHECK(swap_key().to_dense() == DenseMatrix{{0, 2}, {3, 0}});
    CHECK(mul_structured(a, swap_key(), c) == DenseMatrix{{6, 2}, {3, 6}});
    CHECK(c.count() == 4);
}

TEST_CASE("identity key leaves A unchanged") {
    MulCounter c;
    const DenseMatrix a{{1, -2, 3}, {4, 5, 6}, {0, 0, 1}};
    CHECK(mul_structured(a, StructuredMatrix::diagonal({1, 1, 1}), c) == a);
}

TEST_CASE("band counter for n=4, omega=1 is 40") {
    Rng rng(3);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = (i == 0 ? 0 : i - 1); j <= std::min<std::size_t>(3, i + 1); ++j)
            t.push_back({i, j, i == j ? 4.0 : 1.0});
    const auto k = StructuredMatrix::band(4, 1, t);
    MulCounter c;
    mul_structured(gen::random_matrix(4, 4, rng), k, c);
    CHECK(c.count() == 40);
}

TEST_CASE("mul_structured rejects a dimension mismatch") {
    MulCounter c;
    CHECK_THROWS_AS(mul_structured(DenseMatrix(2, 3), swap_key(), c), DimensionMismatch);
}

TEST_CASE("structure invariants are enforced") {
    CHECK_THROWS_AS(StructuredMatrix::diagonal({1, 0}), InvalidArgument);
    CHECK_THROWS_AS(StructuredMatrix::permutation({0, 0}, {1, 1}), InvalidArgument);
    CHECK_THROWS_AS(StructuredMatrix::band(3, 0, {{0, 1, 1.0}, {0, 0, 1}, {1, 1, 1}, {2, 2, 1}}), InvalidArgument);
    // Row 2 has no nonzero.
    CHECK_THROWS_AS(StructuredMatrix::sparse(3, 2, {{0, 0, 1}, {1, 1, 1}, {0, 2, 1}}), InvalidArgument);
}

TEST_CASE("lu_solve examples") {
    const Vector y = lu_solve(DenseMatrix{{6, 2}, {3, 6}}, Vector{1, -2});
    CHECK(y[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(lu_solve(DenseMatrix::identity(2), Vector{5, 7}) == Vector{5, 7});

    Rng rng(8);
    const DenseMatrix a = gen::random_system(8, rng).a;
    const Vector x0 = gen::random_vector(8, rng, -5, 5);
    const Vector x = lu_solve(a, oracle::naive_apply(a, x0));
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(x[i] - x0[i]) <= 1e-8);
}

TEST_CASE("lu_solve reports singular matrices") {
    CHECK_THROWS_AS(lu_solve(DenseMatrix{{1, 2}, {2, 4}}, Vector{1, 1}), SingularMatrix);
    CHECK_THROWS_AS(lu_solve(DenseMatrix(2, 3), Vector{1, 1}), DimensionMismatch);
}

TEST_CASE("lu_solve agrees with an independent elimination") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto sys = gen::random_system(1 + seed % 9, rng);
        const Vector x = lu_solve(sys.a, sys.b);
        const auto ref = oracle::gauss_solve(oracle::to_rows(sys.a), sys.b);
        REQUIRE(ref);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx((*ref)[i]).epsilon(1e-9));
    }
}

TEST_CASE("structured_solve examples") {
    CHECK(structured_solve(StructuredMatrix::diagonal({3, 2, 4}), Vector{9, 4, 8}) == Vector{3, 2, 2});
    const Vector w = structured_solve(swap_key(), Vector{6, 2});
    CHECK(swap_key().multiply(w) == Vector{6, 2});

    const SecretKey k = generate(KeyScheme::band(1), 5, 42);
    const Vector v{1, -2, 3, 0.5, 7};
    const Vector sol = structured_solve(k.matrix(), v);
    CHECK(norm_inf(subtract(k.matrix().multiply(sol), v)) <= 1e-9);
}

TEST_CASE("property: mul_structured matches a naive product and counts exactly") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        const std::size_t n = 3 + seed % 18;
        const DenseMatrix a = gen::random_matrix(n, n, rng, -5, 5);
        const KeyScheme schemes[] = {KeyScheme::diagonal(), KeyScheme::permutation(), KeyScheme::band(1),
                                     KeyScheme::sparse(std::min<std::size_t>(3, n))};
        for (const auto& s : schemes) {
            const SecretKey key = generate(s, n, seed * 7 + 1);
            MulCounter c;
            const DenseMatrix ak = mul_structured(a, key.matrix(), c);
            check_close(ak, oracle::naive_product(a, key.matrix().to_dense()), 1e-12);
            std::uint64_t expect = 0;
            switch (s.kind) {
                case StructureKind::Diagonal:
                case StructureKind::Permutation: expect = n * n; break;
                case StructureKind::Band: expect = (2 * 1 + 1) * n * n - 2 * n; break;
                case StructureKind::Sparse: expect = key.matrix().nnz() * n; break;
            }
            CHECK(c.count() == expect);
        }
    }
}

TEST_CASE("property: structured_solve inverts multiply") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed + 100);
        const std::size_t n = 3 + seed % 12;
        for (const auto& s : gen::kSchemes) {
            const SecretKey key = generate(s, n, seed);
            const Vector v = gen::random_vector(n, rng, -10, 10);
            const Vector back = structured_solve(key.matrix(), key.matrix().multiply(v));
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - v[i]) <= 1e-8);
        }
    }
}

TEST_CASE("counter helpers") {
    MulCounter c;
    CHECK(dot(Vector{1, 2, 3}, Vector{4, 5, 6}, &c) == 32);
    CHECK(c.count() == 3);
    multiply(DenseMatrix(2, 3, 1.0), Vector{1, 1, 1}, &c);
    CHECK(c.count() == 9);
    c.reset();
    CHECK(c.count() == 0);
}
