#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "caso/keys.hpp"
#include "caso/problems.hpp"

namespace caso {

/// One benchmark cell. t_e_sec is the local-side time (two transforms, the
/// two recoveries and the cross-check), t_s_sec the direct local solve.
/// A failed cell carries NaN timings.
struct BenchRecord {
    std::string problem_class;
    std::size_t size = 0;
    std::string scheme;
    std::size_t param = 0;  // W = 2ω+1 for band, θ for sparse, 0 otherwise
    double t_e_sec = 0.0;
    double t_s_sec = 0.0;
    double gain = 0.0;
    std::uint64_t mult_count = 0;

    bool operator==(const BenchRecord&) const = default;
};

/// "diag", "perm", "band:W" (W odd, ω = (W-1)/2) or "sparse:θ".
struct BenchScheme {
    KeyScheme scheme;
    std::size_t param = 0;

    static BenchScheme parse(const std::string& text);
    std::string label() const;
};

struct BenchConfig {
    ProblemClass problem_class = ProblemClass::LinearSystem;
    std::vector<std::size_t> sizes;
    std::vector<BenchScheme> schemes;
    std::size_t repeats = 5;
    std::uint64_t seed = 1;
    /// Variables in the non-linear benchmark (size is the term count N).
    std::size_t nonlinear_vars = 10;
};

double median(std::vector<double> v);

/// Rows ordered by (size, scheme) as listed in the config. The direct solve
/// is timed once per size and shared by that size's cells.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

inline constexpr const char* kBenchHeader = "class,size,scheme,param,t_e_sec,t_s_sec,gain,mult_count";

/// Shortest round-trip formatting, so parse_bench_csv(bench_csv(r)) == r.
std::string bench_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_bench_csv(const std::string& text);

/// Random diagonally dominant n×n system (test and bench input).
LinearSystem random_linear_system(std::size_t n, std::uint64_t seed);

/// Random polynomial system over `vars` variables with `terms` terms beyond
/// a dominant diagonal, built around a known root. x0 is a nearby start.
struct BenchNonlinear {
    NonlinearSystem system;
    Vector root;
    Vector x0;
};
BenchNonlinear random_polynomial_system(std::size_t vars, std::size_t terms, std::uint64_t seed);

}  // namespace caso
