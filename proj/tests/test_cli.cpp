#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("caso_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run caso(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = std::string(CASO_CLI) + " " + args + " > " + out.string() + " 2> " +
                            (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string data(const char* name) { return std::string(CASO_TEST_DATA) + "/" + name; }

std::string tmp(const char* name) { return (scratch() / name).string(); }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

// Parses the "x* = (a, b, ...)" line.
std::vector<double> printed_point(const std::string& out) {
    std::vector<double> v;
    const auto at = out.find("x* = (");
    if (at == std::string::npos) return v;
    const char* p = out.c_str() + at + 6;
    while (*p && *p != ')') {
        char* end = nullptr;
        v.push_back(std::strtod(p, &end));
        if (end == p) break;
        p = end;
        while (*p == ',' || *p == ' ') ++p;
    }
    return v;
}

bool near_worked_root(const std::string& out) {
    const auto v = printed_point(out);
    return v.size() == 2 && std::abs(v[0]) < 1e-9 && std::abs(v[1] - 3) < 1e-9;
}

}  // namespace

TEST_CASE("roundtrip on the worked system") {
    const Run ok = caso("roundtrip " + data("worked_system.json") + " --scheme diag --seed 5");
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "Accept(solution)"));
    CHECK(near_worked_root(ok.out));

    const Run lazy = caso("roundtrip " + data("worked_system.json") + " --adversary lazy");
    CHECK(lazy.code == 2);
    CHECK(contains(lazy.out, "Reject(MismatchedSolutions)"));
}

TEST_CASE("roundtrip verdicts for LP outcomes") {
    CHECK(contains(caso("roundtrip " + data("infeasible_lp.json")).out, "InfeasibleConfirmed"));
    CHECK(contains(caso("roundtrip " + data("unbounded_lp.json")).out, "UnboundedConfirmed"));
    const Run lp = caso("roundtrip " + data("small_lp.json") + " --scheme perm");
    CHECK(lp.code == 0);
    CHECK(contains(lp.out, "objective: -2"));
}

TEST_CASE("malformed input and bad flags exit 1") {
    CHECK(caso("roundtrip " + data("unknown_field.json")).code == 1);
    CHECK(caso("roundtrip " + data("truncated.json")).code == 1);
    CHECK(caso("roundtrip " + data("wrong_shape.json")).code == 1);
    CHECK(caso("roundtrip " + data("worked_system.json") + " --no-such-flag").code == 1);
    CHECK(caso("solve " + data("worked_system.json") + " --adversary sneaky").code == 1);
    CHECK(caso("").code == 1);
}

TEST_CASE("keygen is deterministic in the seed") {
    REQUIRE(caso("keygen --n 6 --scheme band --omega 1 --seed 9 --out " + tmp("k_a.json")).code == 0);
    REQUIRE(caso("keygen --n 6 --scheme band --omega 1 --seed 9 --out " + tmp("k_b.json")).code == 0);
    REQUIRE(caso("keygen --n 6 --scheme band --omega 1 --seed 10 --out " + tmp("k_c.json")).code == 0);
    CHECK(slurp(tmp("k_a.json")) == slurp(tmp("k_b.json")));
    CHECK(slurp(tmp("k_a.json")) != slurp(tmp("k_c.json")));
}

TEST_CASE("transform, solve and recover by hand") {
    const std::string p = data("worked_system.json");
    REQUIRE(caso("transform " + p + " --scheme sparse --seed 3 --out " + tmp("g1.json") + " --key-out " +
                 tmp("key1.json"))
                .code == 0);
    const std::string disguised = slurp(tmp("g1.json"));
    CHECK_FALSE(contains(disguised, "\"kind\": \"caso-key\""));
    REQUIRE(caso("solve " + tmp("g1.json") + " --out " + tmp("s1.json")).code == 0);
    const Run rec = caso("recover " + tmp("s1.json") + " --key " + tmp("key1.json"));
    CHECK(rec.code == 0);
    CHECK(near_worked_root(rec.out));

    // Key files never go to the cloud, and a spent key is not reused.
    CHECK(caso("solve " + tmp("key1.json")).code == 1);
    CHECK(caso("transform " + p + " --key " + tmp("key1.json") + " --key-out " + tmp("key1b.json")).code == 1);
}

TEST_CASE("verify accepts consistent answers and rejects fabricated ones") {
    const std::string p = data("worked_system.json");
    for (int i : {1, 2}) {
        const std::string k = std::to_string(i);
        REQUIRE(caso("transform " + p + " --scheme perm --seed " + std::to_string(40 + i) + " --out " +
                     tmp(("v_g" + k + ".json").c_str()) + " --key-out " + tmp(("v_k" + k + ".json").c_str()))
                    .code == 0);
        REQUIRE(caso("solve " + tmp(("v_g" + k + ".json").c_str()) + " --out " + tmp(("v_s" + k + ".json").c_str()))
                    .code == 0);
        REQUIRE(caso("solve " + tmp(("v_g" + k + ".json").c_str()) + " --adversary random --seed " + k + " --out " +
                     tmp(("v_r" + k + ".json").c_str()))
                    .code == 0);
    }
    const std::string keys = " --key1 " + tmp("v_k1.json") + " --key2 " + tmp("v_k2.json");
    const Run good = caso("verify " + p + keys + " --sol1 " + tmp("v_s1.json") + " --sol2 " + tmp("v_s2.json"));
    CHECK(good.code == 0);
    CHECK(near_worked_root(good.out));
    const Run bad = caso("verify " + p + keys + " --sol1 " + tmp("v_r1.json") + " --sol2 " + tmp("v_r2.json"));
    CHECK(bad.code == 2);
}

TEST_CASE("bench writes a CSV") {
    const Run r = caso("bench --sizes 8,16 --schemes diag,band:3 --repeats 1");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("class,size,scheme,param,t_e_sec,t_s_sec,gain,mult_count\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
}
