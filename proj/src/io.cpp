#include "caso/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "caso/errors.hpp"

namespace caso {

namespace {

constexpr const char* kKeyWarning =
    "SECRET KEY: keep on the local side; never send this file to the solver.";

void check_fields(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ParseError(where + ": unknown field '" + k + "'");
}

const Json& field(const Json& j, const char* name, const std::string& where) {
    const auto it = j.find(name);
    if (it == j.end()) throw ParseError(where + ": missing field '" + name + "'");
    return *it;
}

double as_real(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(where + ": number must be finite");
    return v;
}

std::uint64_t as_count(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned())
        throw ParseError(where + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
}

Vector as_vector(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
    Vector v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(as_real(x, where));
    return v;
}

Vector optional_vector(const Json& j, const char* name, const std::string& where) {
    const auto it = j.find(name);
    return it == j.end() ? Vector{} : as_vector(*it, where + "." + name);
}

// Rows of a matrix with `cols` columns; [] is a matrix with no rows.
DenseMatrix as_matrix(const Json& j, std::size_t cols, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
    DenseMatrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = as_vector(j[i], where);
        if (row.size() != cols)
            throw ParseError(where + ": row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                             " entries, expected " + std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = row[c];
    }
    return m;
}

DenseMatrix optional_matrix(const Json& j, const char* name, std::size_t cols, const std::string& where) {
    const auto it = j.find(name);
    return it == j.end() ? DenseMatrix(0, cols) : as_matrix(*it, cols, where + "." + name);
}

Json matrix_json(const DenseMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(Vector(r.begin(), r.end()));
    }
    return rows;
}

Json affine_json(const AffineForm& f) {
    Json coeffs = Json::object();
    for (const auto& [i, v] : f.coeffs) coeffs[std::to_string(i)] = v;
    return Json{{"coeffs", coeffs}, {"const", f.constant}};
}

AffineForm affine_from_json(const Json& j, const std::string& where) {
    check_fields(j, {"coeffs", "const"}, where);
    AffineForm f;
    if (const auto it = j.find("const"); it != j.end()) f.constant = as_real(*it, where + ".const");
    if (const auto it = j.find("coeffs"); it != j.end()) {
        if (!it->is_object()) throw ParseError(where + ".coeffs: expected an object");
        for (const auto& [k, v] : it->items()) {
            std::size_t idx = 0;
            const auto res = std::from_chars(k.data(), k.data() + k.size(), idx);
            if (res.ec != std::errc() || res.ptr != k.data() + k.size())
                throw ParseError(where + ".coeffs: key '" + k + "' is not a variable index");
            f.coeffs[idx] = as_real(v, where + ".coeffs." + k);
        }
    }
    return f;
}

Json term_json(const Term& t) {
    Json j{{"t", t.coefficient}, {"fn", t.fn.name()}, {"arg", affine_json(t.argument)}};
    if (t.fn.kind == FunctionKind::Power) j["m"] = t.fn.exponent;
    if (!t.cofactors.empty()) {
        Json cof = Json::array();
        for (const auto& c : t.cofactors) cof.push_back(affine_json(c));
        j["cofactors"] = cof;
    }
    return j;
}

Term term_from_json(const Json& j, const std::string& where) {
    check_fields(j, {"t", "fn", "m", "arg", "cofactors"}, where);
    Term t;
    t.coefficient = as_real(field(j, "t", where), where + ".t");
    const Json& fn = field(j, "fn", where);
    if (!fn.is_string()) throw ParseError(where + ".fn: expected a string");
    const std::string name = fn.get<std::string>();
    unsigned m = 1;
    if (const auto it = j.find("m"); it != j.end()) {
        if (name != "pow") throw ParseError(where + ": 'm' is only allowed for fn \"pow\"");
        const std::uint64_t v = as_count(*it, where + ".m");
        if (v < 1 || v > 64) throw ParseError(where + ".m: exponent must be in [1, 64]");
        m = static_cast<unsigned>(v);
    } else if (name == "pow") {
        throw ParseError(where + ": fn \"pow\" needs 'm'");
    }
    try {
        t.fn = BaseFunction::parse(name, m);
    } catch (const InvalidArgument& e) {
        throw ParseError(where + ": " + e.what());
    }
    t.argument = affine_from_json(field(j, "arg", where), where + ".arg");
    if (const auto it = j.find("cofactors"); it != j.end()) {
        if (!it->is_array()) throw ParseError(where + ".cofactors: expected an array");
        for (std::size_t k = 0; k < it->size(); ++k)
            t.cofactors.push_back(affine_from_json((*it)[k], where + ".cofactors[" + std::to_string(k) + "]"));
    }
    return t;
}

}  // namespace

Json problem_to_json(const Problem& p, std::span<const double> x0) {
    Json j;
    j["class"] = class_name(problem_class(p));
    j["n"] = num_vars(p);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LinearSystem>) {
                j["A"] = matrix_json(v.a);
                j["b"] = v.b;
            } else if constexpr (std::is_same_v<T, NonlinearSystem>) {
                Json eqs = Json::array();
                for (const auto& eq : v.equations) {
                    Json terms = Json::array();
                    for (const auto& t : eq) terms.push_back(term_json(t));
                    eqs.push_back(terms);
                }
                j["equations"] = eqs;
            } else {
                if constexpr (std::is_same_v<T, ConvexQuadraticProgram>) j["Q"] = matrix_json(v.q);
                j["c"] = v.c;
                j["A"] = matrix_json(v.a);
                j["b"] = v.b;
                j["D"] = matrix_json(v.d);
                j["e"] = v.e;
            }
        },
        p);
    if (!x0.empty()) j["x0"] = Vector(x0.begin(), x0.end());
    return j;
}

ProblemFile problem_from_json(const Json& j) {
    const std::string where = "problem";
    if (!j.is_object()) throw ParseError("problem: expected a JSON object");
    const Json& cls_j = field(j, "class", where);
    if (!cls_j.is_string()) throw ParseError("problem.class: expected a string");
    ProblemClass cls;
    try {
        cls = parse_class_name(cls_j.get<std::string>());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("problem.class: ") + e.what());
    }
    const std::size_t n = as_count(field(j, "n", where), "problem.n");
    if (n == 0) throw ParseError("problem.n: must be at least 1");
    ProblemFile out;
    switch (cls) {
        case ProblemClass::LinearSystem: {
            check_fields(j, {"class", "n", "A", "b"}, where);
            LinearSystem s;
            s.a = as_matrix(field(j, "A", where), n, "problem.A");
            s.b = as_vector(field(j, "b", where), "problem.b");
            out.problem = std::move(s);
            break;
        }
        case ProblemClass::LinearProgram: {
            check_fields(j, {"class", "n", "c", "A", "b", "D", "e"}, where);
            LinearProgram lp;
            lp.c = as_vector(field(j, "c", where), "problem.c");
            lp.a = optional_matrix(j, "A", n, where);
            lp.b = optional_vector(j, "b", where);
            lp.d = optional_matrix(j, "D", n, where);
            lp.e = optional_vector(j, "e", where);
            out.problem = std::move(lp);
            break;
        }
        case ProblemClass::ConvexQuadratic: {
            check_fields(j, {"class", "n", "Q", "c", "A", "b", "D", "e"}, where);
            ConvexQuadraticProgram qp;
            qp.q = as_matrix(field(j, "Q", where), n, "problem.Q");
            qp.c = as_vector(field(j, "c", where), "problem.c");
            qp.a = optional_matrix(j, "A", n, where);
            qp.b = optional_vector(j, "b", where);
            qp.d = optional_matrix(j, "D", n, where);
            qp.e = optional_vector(j, "e", where);
            out.problem = std::move(qp);
            break;
        }
        case ProblemClass::Nonlinear: {
            check_fields(j, {"class", "n", "equations", "x0"}, where);
            NonlinearSystem f;
            f.n = n;
            const Json& eqs = field(j, "equations", where);
            if (!eqs.is_array()) throw ParseError("problem.equations: expected an array");
            for (std::size_t i = 0; i < eqs.size(); ++i) {
                const std::string w = "problem.equations[" + std::to_string(i) + "]";
                if (!eqs[i].is_array()) throw ParseError(w + ": expected an array of terms");
                Equation eq;
                for (std::size_t k = 0; k < eqs[i].size(); ++k)
                    eq.push_back(term_from_json(eqs[i][k], w + "[" + std::to_string(k) + "]"));
                f.equations.push_back(std::move(eq));
            }
            out.x0 = optional_vector(j, "x0", where);
            if (!out.x0.empty() && out.x0.size() != n) throw ParseError("problem.x0: expected n entries");
            out.problem = std::move(f);
            break;
        }
    }
    if (num_vars(out.problem) != n) throw ParseError("problem: 'n' disagrees with the payload");
    try {
        validate(out.problem);
    } catch (const Error& e) {
        throw ParseError(std::string("problem: ") + e.what());
    }
    return out;
}

Json key_to_json(const SecretKey& key, double objective_offset) {
    Json entries = Json::array();
    for (const auto& t : key.matrix().entries()) entries.push_back(Json::array({t.row, t.col, t.value}));
    return Json{{"kind", "caso-key"},
                {"warning", kKeyWarning},
                {"scheme", key.scheme().name()},
                {"param", key.scheme().parameter},
                {"n", key.dimension()},
                {"seed", key.seed()},
                {"K", entries},
                {"r", key.offset()},
                {"objective_offset", objective_offset},
                {"used", key.used()}};
}

bool is_key_json(const Json& j) {
    if (!j.is_object()) return false;
    const auto it = j.find("kind");
    return (it != j.end() && it->is_string() && it->get<std::string>() == "caso-key") || j.contains("K") ||
           j.contains("r");
}

KeyFile key_from_json(const Json& j) {
    const std::string where = "key";
    check_fields(j, {"kind", "warning", "scheme", "param", "n", "seed", "K", "r", "objective_offset", "used"},
                 where);
    const Json& kind = field(j, "kind", where);
    if (!kind.is_string() || kind.get<std::string>() != "caso-key") throw ParseError("key.kind: expected \"caso-key\"");
    const Json& scheme_j = field(j, "scheme", where);
    if (!scheme_j.is_string()) throw ParseError("key.scheme: expected a string");
    const std::size_t param = as_count(field(j, "param", where), "key.param");
    const std::size_t n = as_count(field(j, "n", where), "key.n");
    const std::uint64_t seed = as_count(field(j, "seed", where), "key.seed");
    const Json& k_j = field(j, "K", where);
    if (!k_j.is_array()) throw ParseError("key.K: expected an array of [row, col, value]");
    std::vector<Triplet> entries;
    for (const auto& e : k_j) {
        if (!e.is_array() || e.size() != 3) throw ParseError("key.K: expected [row, col, value] entries");
        entries.push_back({as_count(e[0], "key.K"), as_count(e[1], "key.K"), as_real(e[2], "key.K")});
    }
    Vector r = as_vector(field(j, "r", where), "key.r");
    double offset = 0.0;
    if (const auto it = j.find("objective_offset"); it != j.end()) offset = as_real(*it, "key.objective_offset");
    bool used = false;
    if (const auto it = j.find("used"); it != j.end()) {
        if (!it->is_boolean()) throw ParseError("key.used: expected a boolean");
        used = it->get<bool>();
    }
    try {
        const KeyScheme scheme = KeyScheme::parse(scheme_j.get<std::string>(), param, param);
        StructuredMatrix k = StructuredMatrix::from_triplets(scheme.kind, n, param, std::move(entries));
        SecretKey key(std::move(k), std::move(r), scheme, seed);
        if (used) key.consume();
        return KeyFile{std::move(key), offset};
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("key: ") + e.what());
    }
}

Json outcome_to_json(const SolveOutcome& out) {
    Json j;
    j["case"] = case_name(outcome_case(out));
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, NormalOutcome>) {
                j["solution"] = o.solution;
                j["objective"] = o.objective;
            } else if constexpr (std::is_same_v<T, InfeasibleOutcome>) {
                j["phase1_solution"] = o.phase1_solution;
                j["rho_star"] = o.rho_star;
            } else if constexpr (std::is_same_v<T, UnboundedOutcome>) {
                j["ray"] = o.ray;
                j["feasible_point"] = o.feasible_point;
            } else {
                j["reason"] = o.reason;
            }
        },
        out);
    return j;
}

SolveOutcome outcome_from_json(const Json& j) {
    const std::string where = "outcome";
    if (!j.is_object()) throw ParseError("outcome: expected an object");
    const Json& c = field(j, "case", where);
    if (!c.is_string()) throw ParseError("outcome.case: expected a string");
    switch (parse_case_name(c.get<std::string>())) {
        case OutcomeCase::Normal:
            check_fields(j, {"case", "solution", "objective"}, where);
            return NormalOutcome{as_vector(field(j, "solution", where), "outcome.solution"),
                                 as_real(field(j, "objective", where), "outcome.objective")};
        case OutcomeCase::Infeasible:
            check_fields(j, {"case", "phase1_solution", "rho_star"}, where);
            return InfeasibleOutcome{as_vector(field(j, "phase1_solution", where), "outcome.phase1_solution"),
                                     as_real(field(j, "rho_star", where), "outcome.rho_star")};
        case OutcomeCase::Unbounded:
            check_fields(j, {"case", "ray", "feasible_point"}, where);
            return UnboundedOutcome{as_vector(field(j, "ray", where), "outcome.ray"),
                                    as_vector(field(j, "feasible_point", where), "outcome.feasible_point")};
        case OutcomeCase::Failure: {
            check_fields(j, {"case", "reason"}, where);
            const Json& r = field(j, "reason", where);
            if (!r.is_string()) throw ParseError("outcome.reason: expected a string");
            return FailureOutcome{r.get<std::string>()};
        }
    }
    throw ParseError("outcome: unknown case");
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::exception& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace caso
