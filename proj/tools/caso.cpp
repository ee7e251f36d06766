// caso: phase-wise and end-to-end access to the outsourcing protocol.
//
// Exit codes: 0 success / Accept, 2 Reject, 1 any error.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "caso/bench.hpp"
#include "caso/cloudsim.hpp"
#include "caso/errors.hpp"
#include "caso/io.hpp"
#include "caso/transform.hpp"
#include "caso/verifier.hpp"

using namespace caso;

namespace {

struct KeyOptions {
    std::string scheme = "band";
    std::size_t omega = 3;
    std::size_t theta = 4;
    std::uint64_t seed = 1;
    CLI::Option* omega_opt = nullptr;
    CLI::Option* theta_opt = nullptr;

    // Defaults shrink to fit small problems; explicit values are taken as given.
    KeyScheme parse(std::size_t n) const {
        std::size_t w = omega, t = theta;
        if (omega_opt && omega_opt->count() == 0 && n > 0) w = std::min(w, (n - 1) / 2);
        if (theta_opt && theta_opt->count() == 0 && n > 0) t = std::min(t, n);
        return KeyScheme::parse(scheme, w, t);
    }
};

void add_key_options(CLI::App* cmd, KeyOptions& o) {
    cmd->add_option("--scheme", o.scheme, "Key structure")
        ->check(CLI::IsMember({"diag", "perm", "band", "sparse"}));
    o.omega_opt = cmd->add_option("--omega", o.omega, "Band half-width (default 3, capped for small n)");
    o.theta_opt = cmd->add_option("--theta", o.theta, "Sparse nonzeros per row and column (default 4, capped for small n)");
    cmd->add_option("--seed", o.seed, "Seed for all randomness");
}

std::string format_vector(std::span<const double> v) {
    std::string out = "(";
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", v[i]);
        out += buf;
        if (i + 1 < v.size()) out += ", ";
    }
    return out + ")";
}

void emit(const std::string& out_path, const Json& j) {
    if (out_path.empty()) std::cout << j.dump(2) << '\n';
    else write_json_file(out_path, j);
}

Vector start_point(const ProblemFile& file) {
    if (!std::holds_alternative<NonlinearSystem>(file.problem)) return {};
    return file.x0.empty() ? Vector(num_vars(file.problem), 0.0) : file.x0;
}

// ---------------------------------------------------------------------------

int cmd_keygen(const KeyOptions& o, std::size_t n, const std::string& out) {
    emit(out, key_to_json(generate(o.parse(n), n, o.seed)));
    return 0;
}

int cmd_transform(const std::string& problem_path, const std::string& key_path, const KeyOptions& o,
                  const std::string& out, const std::string& key_out) {
    const ProblemFile file = problem_from_json(read_json_file(problem_path));
    const std::size_t n = num_vars(file.problem);
    std::optional<SecretKey> key;
    if (!key_path.empty()) {
        KeyFile kf = key_from_json(read_json_file(key_path));
        if (kf.key.used()) throw KeyReuse("key file '" + key_path + "' was already used for a transform");
        key.emplace(std::move(kf.key));
    } else {
        key.emplace(generate(o.parse(n), n, o.seed));
    }
    const TransformedProblem g = transform(file.problem, *key, start_point(file));
    write_json_file(key_out, key_to_json(*key, g.objective_offset));
    emit(out, problem_to_json(g.problem, g.initial_point));
    std::cerr << "transformed " << class_name(problem_class(file.problem)) << " n=" << n << " scheme=" << key->scheme().name()
              << " mult_count=" << g.mult_count << '\n';
    return 0;
}

int cmd_solve(const std::string& path, const std::string& adversary, std::uint64_t seed, const std::string& out) {
    const Json j = read_json_file(path);
    if (is_key_json(j)) throw InvalidArgument("refusing to solve: '" + path + "' holds secret key material");
    const ProblemFile file = problem_from_json(j);
    Cloud cloud(AdversaryMode::parse(adversary), seed);
    CloudTask task{file.problem, file.x0};
    const SolveOutcome outcome = cloud.serve(task);
    Json result = outcome_to_json(outcome);
    result["kind"] = "caso-solution";
    const OutcomeCase c = outcome_case(outcome);
    const ProblemClass cls = problem_class(file.problem);
    if (c == OutcomeCase::Infeasible) {
        if (const auto* lp = std::get_if<LinearProgram>(&file.problem))
            result["phase_one"] = outcome_to_json(cloud.serve(CloudTask{build_phase_one(*lp)}));
        else if (const auto* qp = std::get_if<ConvexQuadraticProgram>(&file.problem))
            result["phase_one"] = outcome_to_json(cloud.serve(CloudTask{build_phase_one(*qp)}));
    } else if (c == OutcomeCase::Unbounded && cls == ProblemClass::LinearProgram) {
        const auto& lp = std::get<LinearProgram>(file.problem);
        result["dual_phase_one"] = outcome_to_json(cloud.serve(CloudTask{build_phase_one(build_lp_dual(lp))}));
    }
    emit(out, result);
    std::cerr << "cloud outcome: " << case_name(c) << '\n';
    return 0;
}

struct SolutionFile {
    SolveOutcome outcome;
    std::optional<SolveOutcome> phase_one;
    std::optional<SolveOutcome> dual_phase_one;
};

SolutionFile read_solution(const std::string& path) {
    Json j = read_json_file(path);
    if (!j.is_object()) throw ParseError("solution: expected an object");
    const auto kind = j.find("kind");
    if (kind == j.end() || *kind != "caso-solution") throw ParseError("solution: expected kind \"caso-solution\"");
    SolutionFile s{FailureOutcome{}};
    if (j.contains("phase_one")) s.phase_one = outcome_from_json(j["phase_one"]);
    if (j.contains("dual_phase_one")) s.dual_phase_one = outcome_from_json(j["dual_phase_one"]);
    j.erase("kind");
    j.erase("phase_one");
    j.erase("dual_phase_one");
    s.outcome = outcome_from_json(j);
    return s;
}

int cmd_recover(const std::string& solution_path, const std::string& key_path, const std::string& out) {
    const SolutionFile sol = read_solution(solution_path);
    const KeyFile kf = key_from_json(read_json_file(key_path));
    Json result{{"kind", "caso-recovered"}, {"case", case_name(outcome_case(sol.outcome))}};
    if (const auto* normal = std::get_if<NormalOutcome>(&sol.outcome)) {
        const Vector x = recover(normal->solution, kf.key);
        result["solution"] = x;
        result["objective"] = normal->objective + kf.objective_offset;
        std::cout << "x* = " << format_vector(x) << '\n';
    } else if (const auto* unb = std::get_if<UnboundedOutcome>(&sol.outcome)) {
        result["ray"] = kf.key.matrix().multiply(unb->ray);
        result["feasible_point"] = recover(unb->feasible_point, kf.key);
        std::cout << "cloud claims: unbounded\n";
    } else {
        std::cout << "cloud claims: " << case_name(outcome_case(sol.outcome)) << '\n';
    }
    if (!out.empty()) write_json_file(out, result);
    return 0;
}

int report_verdict(const Verdict& v) {
    std::cout << "verdict: " << v.describe();
    if (!v.detail.empty()) std::cout << " - " << v.detail;
    std::cout << '\n';
    if (v.kind == Verdict::Kind::Solution) std::cout << "x* = " << format_vector(v.solution) << '\n';
    return v.accepted() ? 0 : 2;
}

int cmd_verify(const std::string& problem_path, const std::string& key1, const std::string& key2,
               const std::string& sol1, const std::string& sol2, double epsilon) {
    const ProblemFile file = problem_from_json(read_json_file(problem_path));
    const KeyFile k1 = key_from_json(read_json_file(key1));
    const KeyFile k2 = key_from_json(read_json_file(key2));
    const SolutionFile s1 = read_solution(sol1);
    const SolutionFile s2 = read_solution(sol2);
    const VerificationSession session =
        VerificationSession::restore(file.problem, k1.key, k2.key, epsilon, start_point(file));
    const OutcomeCase c1 = outcome_case(s1.outcome);
    const OutcomeCase c2 = outcome_case(s2.outcome);
    if (c1 == c2 && c1 == OutcomeCase::Infeasible && s1.phase_one && s2.phase_one)
        return report_verdict(verify_infeasible(session, *s1.phase_one, *s2.phase_one));
    if (c1 == c2 && c1 == OutcomeCase::Unbounded) {
        if (!s1.dual_phase_one || !s2.dual_phase_one)
            return report_verdict(Verdict::reject(RejectReason::DualContradiction, "missing dual phase-I answers"));
        return report_verdict(verify_unbounded(session, *s1.dual_phase_one, *s2.dual_phase_one));
    }
    return report_verdict(verify_pair(session, s1.outcome, s2.outcome));
}

int cmd_roundtrip(const std::string& problem_path, const KeyOptions& o, const std::string& adversary,
                  double epsilon) {
    const ProblemFile file = problem_from_json(read_json_file(problem_path));
    Cloud cloud(AdversaryMode::parse(adversary), o.seed);
    const std::size_t n = num_vars(file.problem);
    const ProtocolReport report =
        run_protocol(file.problem, o.parse(n), o.seed, cloud, epsilon, start_point(file));
    std::cout << "class: " << class_name(problem_class(file.problem)) << '\n'
              << "scheme: " << o.parse(n).name() << '\n'
              << "mult_count: " << report.mult_count_first << " + " << report.mult_count_second << '\n'
              << "cloud outcomes: " << case_name(outcome_case(report.first)) << ", "
              << case_name(outcome_case(report.second)) << '\n';
    if (report.objective) std::cout << "objective: " << *report.objective << '\n';
    return report_verdict(report.verdict);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(',', start)) != std::string::npos; start = pos + 1)
        out.push_back(s.substr(start, pos - start));
    out.push_back(s.substr(start));
    return out;
}

int cmd_bench(const std::string& cls, const std::string& sizes, const std::string& schemes, std::size_t repeats,
              std::uint64_t seed, const std::string& out) {
    BenchConfig config;
    config.problem_class = parse_class_name(cls);
    for (const auto& s : split_list(sizes)) config.sizes.push_back(std::stoul(s));
    for (const auto& s : split_list(schemes)) config.schemes.push_back(BenchScheme::parse(s));
    config.repeats = repeats;
    config.seed = seed;
    const std::string csv = bench_csv(run_bench(config));
    if (out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(out);
        if (!f) throw Error("cannot write '" + out + "'");
        f << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine-mapping outsourcing of linear, LP, non-linear and quadratic problems"};
    app.require_subcommand(1);

    KeyOptions keygen_o;
    std::size_t keygen_n = 0;
    std::string keygen_out;
    auto* keygen = app.add_subcommand("keygen", "Generate a one-time secret key");
    add_key_options(keygen, keygen_o);
    keygen->add_option("--n", keygen_n, "Dimension")->required();
    keygen->add_option("--out", keygen_out, "Key file (stdout if omitted)");

    KeyOptions transform_o;
    std::string transform_in, transform_key, transform_out, transform_key_out;
    auto* transform_cmd = app.add_subcommand("transform", "Disguise a problem file");
    transform_cmd->add_option("problem", transform_in, "Problem file")->required();
    add_key_options(transform_cmd, transform_o);
    transform_cmd->add_option("--key", transform_key, "Use this unused key file instead of generating one");
    transform_cmd->add_option("--out", transform_out, "Disguised problem file (stdout if omitted)");
    transform_cmd->add_option("--key-out", transform_key_out, "Where to keep the spent key")->required();

    std::string solve_in, solve_adv = "honest", solve_out;
    std::uint64_t solve_seed = 1;
    auto* solve = app.add_subcommand("solve", "Act as the cloud on a disguised problem file");
    solve->add_option("problem", solve_in, "Disguised problem file")->required();
    solve->add_option("--adversary", solve_adv, "Cloud behaviour")
        ->check(CLI::IsMember({"honest", "lazy", "random", "scaled", "halfhonest"}));
    solve->add_option("--seed", solve_seed, "Seed for fabricated answers");
    solve->add_option("--out", solve_out, "Solution file (stdout if omitted)");

    std::string recover_in, recover_key, recover_out;
    auto* recover_cmd = app.add_subcommand("recover", "Map a cloud answer back with the key");
    recover_cmd->add_option("solution", recover_in, "Solution file")->required();
    recover_cmd->add_option("--key", recover_key, "Key file")->required();
    recover_cmd->add_option("--out", recover_out, "Recovered solution file");

    std::string verify_in, verify_k1, verify_k2, verify_s1, verify_s2;
    double verify_eps = VerificationSession::kDefaultEpsilon;
    auto* verify = app.add_subcommand("verify", "Cross-check two answers to the same problem");
    verify->add_option("problem", verify_in, "Original problem file")->required();
    verify->add_option("--key1", verify_k1, "First key file")->required();
    verify->add_option("--key2", verify_k2, "Second key file")->required();
    verify->add_option("--sol1", verify_s1, "Answer under the first key")->required();
    verify->add_option("--sol2", verify_s2, "Answer under the second key")->required();
    verify->add_option("--epsilon", verify_eps, "Relative tolerance");

    KeyOptions rt_o;
    std::string rt_in, rt_adv = "honest";
    double rt_eps = VerificationSession::kDefaultEpsilon;
    auto* roundtrip = app.add_subcommand("roundtrip", "Transform twice, solve, recover and verify");
    roundtrip->add_option("problem", rt_in, "Problem file")->required();
    add_key_options(roundtrip, rt_o);
    roundtrip->add_option("--adversary", rt_adv, "Cloud behaviour")
        ->check(CLI::IsMember({"honest", "lazy", "random", "scaled", "halfhonest"}));
    roundtrip->add_option("--epsilon", rt_eps, "Relative tolerance");

    std::string bench_cls = "linear_system", bench_sizes = "256,512,1024", bench_schemes = "band:1,band:7,band:15",
                bench_out;
    std::size_t bench_repeats = 5;
    std::uint64_t bench_seed = 1;
    auto* bench = app.add_subcommand("bench", "Time local work against direct solving; CSV output");
    bench->add_option("--class", bench_cls, "linear_system or nonlinear");
    bench->add_option("--sizes", bench_sizes, "Comma-separated increasing sizes");
    bench->add_option("--schemes", bench_schemes, "Comma-separated: diag, perm, band:W, sparse:T");
    bench->add_option("--repeats", bench_repeats, "Timing repeats (median)");
    bench->add_option("--seed", bench_seed, "Instance seed");
    bench->add_option("--out", bench_out, "CSV file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*keygen) return cmd_keygen(keygen_o, keygen_n, keygen_out);
        if (*transform_cmd)
            return cmd_transform(transform_in, transform_key, transform_o, transform_out, transform_key_out);
        if (*solve) return cmd_solve(solve_in, solve_adv, solve_seed, solve_out);
        if (*recover_cmd) return cmd_recover(recover_in, recover_key, recover_out);
        if (*verify) return cmd_verify(verify_in, verify_k1, verify_k2, verify_s1, verify_s2, verify_eps);
        if (*roundtrip) return cmd_roundtrip(rt_in, rt_o, rt_adv, rt_eps);
        if (*bench) return cmd_bench(bench_cls, bench_sizes, bench_schemes, bench_repeats, bench_seed, bench_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
