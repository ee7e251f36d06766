#pragma once

#include <json.hpp>
#include <string>

#include "caso/cloudsim.hpp"
#include "caso/keys.hpp"
#include "caso/problems.hpp"

namespace caso {

using Json = nlohmann::json;

/// A problem file: the problem plus the optional starting point "x0"
/// (non-linear systems only).
struct ProblemFile {
    Problem problem;
    Vector x0;
};

/// {"class": ..., "n": ..., payload}. Non-linear terms are
/// {"t": real, "fn": "pow"|"sin"|"cos"|"exp"|"lg"|"ln"|"recip", "m": int (pow only),
///  "arg": {"coeffs": {"index": real}, "const": real}, "cofactors": [affine, ...]}.
Json problem_to_json(const Problem& p, std::span<const double> x0 = {});
/// Strict: unknown fields, wrong types and shape errors raise ParseError;
/// the parsed problem is validated.
ProblemFile problem_from_json(const Json& j);

/// Key file. `objective_offset` travels with the key because it is local,
/// key-derived state. WARNING: key files must stay on the local side.
struct KeyFile {
    SecretKey key;
    double objective_offset = 0.0;
};

Json key_to_json(const SecretKey& key, double objective_offset = 0.0);
/// The returned key carries the file's "used" flag.
KeyFile key_from_json(const Json& j);
bool is_key_json(const Json& j);

Json outcome_to_json(const SolveOutcome& out);
SolveOutcome outcome_from_json(const Json& j);

/// Whole-file helpers. Read failures and malformed JSON raise ParseError.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace caso
