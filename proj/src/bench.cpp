#include "caso/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "caso/cloudsim.hpp"
#include "caso/errors.hpp"
#include "caso/transform.hpp"
#include "caso/verifier.hpp"

namespace caso {

BenchScheme BenchScheme::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::size_t value = 0;
    if (colon != std::string::npos) {
        const std::string num = text.substr(colon + 1);
        const auto res = std::from_chars(num.data(), num.data() + num.size(), value);
        if (res.ec != std::errc() || res.ptr != num.data() + num.size() || num.empty())
            throw InvalidArgument("bad scheme parameter in '" + text + "'");
    }
    if (name == "diag" || name == "perm") {
        if (colon != std::string::npos) throw InvalidArgument("'" + name + "' takes no parameter");
        return {KeyScheme::parse(name, 0, 0), 0};
    }
    if (name == "band") {
        if (colon == std::string::npos || value % 2 == 0)
            throw InvalidArgument("band needs an odd width, e.g. band:7");
        return {KeyScheme::band((value - 1) / 2), value};
    }
    if (name == "sparse") {
        if (colon == std::string::npos || value == 0) throw InvalidArgument("sparse needs a count, e.g. sparse:4");
        return {KeyScheme::sparse(value), value};
    }
    throw InvalidArgument("unknown scheme '" + text + "'");
}

std::string BenchScheme::label() const { return scheme.name(); }

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

LinearSystem random_linear_system(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    LinearSystem s{DenseMatrix(n, n), Vector(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) s.a(i, j) = rng.uniform(-1.0, 1.0);
        s.a(i, i) += static_cast<double>(n);
        s.b[i] = rng.uniform(-10.0, 10.0);
    }
    return s;
}

BenchNonlinear random_polynomial_system(std::size_t vars, std::size_t terms, std::uint64_t seed) {
    Rng rng(seed);
    BenchNonlinear out;
    out.system.n = vars;
    out.system.equations.resize(vars);
    out.root.resize(vars);
    out.x0.resize(vars);
    for (std::size_t i = 0; i < vars; ++i) {
        out.root[i] = rng.uniform(-0.5, 0.5);
        out.x0[i] = out.root[i] + rng.uniform(-0.1, 0.1);
    }
    for (std::size_t k = 0; k < terms; ++k) {
        Term t;
        t.coefficient = rng.signed_magnitude(0.001, 0.01);
        t.fn = BaseFunction::power(2 + static_cast<unsigned>(rng.index(2)));
        t.argument.coeffs[rng.index(vars)] = rng.uniform(-1.0, 1.0);
        t.argument.constant = rng.uniform(-1.0, 1.0);
        out.system.equations[k % vars].push_back(std::move(t));
    }
    const double diag = 5.0 + 0.1 * static_cast<double>(terms) / static_cast<double>(vars);
    for (std::size_t i = 0; i < vars; ++i) {
        Term lin;
        lin.coefficient = diag;
        lin.argument.coeffs[i] = 1.0;
        out.system.equations[i].push_back(lin);
        double value = 0.0;
        for (const auto& t : out.system.equations[i]) value += eval_term(t, out.root);
        Term constant;
        constant.coefficient = -value;
        constant.argument.constant = 1.0;
        out.system.equations[i].push_back(constant);
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CellTiming {
    double t_e = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t mults = 0;
};

// Local-side work for one cell: transforms with two keys, then recovery and
// cross-check of honest answers. Key generation is offline and the cloud's
// solves are not local work, so neither is timed.
CellTiming time_cell(const Problem& problem, const Vector& x_star, const Vector& x0, const KeyScheme& scheme,
                     std::size_t repeats, std::uint64_t seed) {
    const std::size_t n = x_star.size();
    const auto [seed1, seed2] = session_seeds(seed);
    const SecretKey k1 = generate(scheme, n, seed1);
    const SecretKey k2 = generate(scheme, n, seed2);
    // An honest cloud returns K⁻¹(x* - r) for each disguised problem.
    const NormalOutcome y{map_inverse(k1, x_star), 0.0};
    const NormalOutcome z{map_inverse(k2, x_star), 0.0};
    std::vector<double> samples;
    CellTiming cell;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        Problem copy = problem;
        SecretKey a = k1.unused_copy();
        SecretKey b = k2.unused_copy();
        const auto t0 = Clock::now();
        const VerificationSession session(std::move(copy), std::move(a), std::move(b),
                                          VerificationSession::kDefaultEpsilon, x0);
        const Verdict v = verify_pair(session, y, z);
        samples.push_back(seconds_since(t0));
        if (!v.accepted()) return cell;
        cell.mults = session.first().mult_count;
    }
    cell.t_e = median(samples);
    return cell;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
    if (config.repeats == 0) throw InvalidArgument("bench needs at least one repeat");
    if (!std::is_sorted(config.sizes.begin(), config.sizes.end()))
        throw InvalidArgument("bench sizes must be increasing");
    const bool linear = config.problem_class == ProblemClass::LinearSystem;
    if (!linear && config.problem_class != ProblemClass::Nonlinear)
        throw InvalidArgument("bench supports linear_system and nonlinear");
    std::vector<BenchRecord> records;
    for (std::size_t size : config.sizes) {
        const std::uint64_t instance_seed = config.seed * 1000003ull + size;
        Problem problem;
        Vector x0;
        Vector x_star;
        std::vector<double> direct;
        if (linear) {
            LinearSystem sys = random_linear_system(size, instance_seed);
            for (std::size_t rep = 0; rep < config.repeats; ++rep) {
                const auto t0 = Clock::now();
                x_star = lu_solve(sys.a, sys.b);
                direct.push_back(seconds_since(t0));
            }
            problem = std::move(sys);
        } else {
            BenchNonlinear nl = random_polynomial_system(config.nonlinear_vars, size, instance_seed);
            for (std::size_t rep = 0; rep < config.repeats; ++rep) {
                const auto t0 = Clock::now();
                const SolveOutcome out = solve_newton(nl.system, nl.x0);
                direct.push_back(seconds_since(t0));
                if (const auto* normal = std::get_if<NormalOutcome>(&out)) x_star = normal->solution;
            }
            x0 = nl.x0;
            problem = std::move(nl.system);
        }
        const double t_s = x_star.empty() ? std::numeric_limits<double>::quiet_NaN() : median(direct);
        for (const auto& cell_scheme : config.schemes) {
            BenchRecord rec;
            rec.problem_class = class_name(config.problem_class);
            rec.size = size;
            rec.scheme = cell_scheme.label();
            rec.param = cell_scheme.param;
            rec.t_s_sec = t_s;
            rec.t_e_sec = std::numeric_limits<double>::quiet_NaN();
            const std::size_t n = num_vars(problem);
            try {
                cell_scheme.scheme.validate_for(n);
                if (!x_star.empty()) {
                    const CellTiming cell =
                        time_cell(problem, x_star, x0, cell_scheme.scheme, config.repeats, instance_seed + 17);
                    rec.t_e_sec = cell.t_e;
                    rec.mult_count = cell.mults;
                }
            } catch (const Error&) {
                // Failed cells keep NaN timings.
            }
            rec.gain = rec.t_s_sec / rec.t_e_sec;
            records.push_back(rec);
        }
    }
    return records;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("bench csv: bad number '" + s + "'");
    return v;
}

std::uint64_t parse_count(const std::string& s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("bench csv: bad integer '" + s + "'");
    return v;
}

}  // namespace

std::string bench_csv(const std::vector<BenchRecord>& records) {
    std::string out = kBenchHeader;
    out += '\n';
    for (const auto& r : records) {
        out += r.problem_class + ',' + std::to_string(r.size) + ',' + r.scheme + ',' + std::to_string(r.param) +
               ',' + format_double(r.t_e_sec) + ',' + format_double(r.t_s_sec) + ',' + format_double(r.gain) +
               ',' + std::to_string(r.mult_count) + '\n';
    }
    return out;
}

std::vector<BenchRecord> parse_bench_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kBenchHeader) throw ParseError("bench csv: missing or wrong header");
    std::vector<BenchRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
            f.push_back(line.substr(start, pos - start));
        f.push_back(line.substr(start));
        if (f.size() != 8) throw ParseError("bench csv: expected 8 fields in '" + line + "'");
        BenchRecord r;
        r.problem_class = f[0];
        r.size = parse_count(f[1]);
        r.scheme = f[2];
        r.param = parse_count(f[3]);
        r.t_e_sec = parse_double(f[4]);
        r.t_s_sec = parse_double(f[5]);
        r.gain = parse_double(f[6]);
        r.mult_count = parse_count(f[7]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace caso
