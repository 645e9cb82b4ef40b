#pragma once

// Expression parsing, report serialization and command dispatch behind the
// tubecheck executable.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubecheck/poly.hpp"

namespace tubecheck {

// Grammar (whitespace insensitive):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' ['-'] integer | '^' '(' ['-'] integer ')')?
//   atom   := number | identifier | 'sqrt' '(' expr ')' | 'cbrt' '(' expr ')' | '(' expr ')'
// Identifiers are variables of the space, the field parameter (t, or tau for
// a tau space) and i. Radicands must be rational functions of the field
// parameter. Division and negative powers need a scalar or an invertible
// single term. Without a space, tube(N) is used with N the largest x/y/z
// index (at least 1). Throws SyntaxError (message carries the column),
// UnsupportedRadicand.
MPoly parse_expression(const std::string& text, SpacePtr space = nullptr);

enum class ReportVerdict { Verified, Failed, NonEquivalent, Inconclusive, Error };

std::string verdict_name(ReportVerdict v);
ReportVerdict parse_verdict(const std::string& s);  // throws PreconditionViolated

struct Report {
  static constexpr int kSchemaVersion = 1;
  std::string command;
  std::map<std::string, std::string> arguments;  // echo of the invocation
  ReportVerdict verdict = ReportVerdict::Error;
  std::optional<std::size_t> residual_terms;
  nlohmann::json values = nlohmann::json::object();
  double timing_ms = 0;

  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);  // throws PreconditionViolated
  std::string to_text() const;
};

// 0 for verified and non-equivalent, 1 for failed and inconclusive, 2 for errors.
int exit_code(const Report& r);

// key=value lines, '#' comments. Keys: precision, phi_samples, chi_samples,
// random_points, seed, output_dir.
struct Config {
  unsigned precision = 256;
  std::size_t phi_samples = 1000;
  std::size_t chi_samples = 100;
  std::size_t random_points = 20;
  unsigned long seed = 1;
  std::string output_dir;

  static Config parse(const std::string& text);  // throws PreconditionViolated
  static Config load(const std::string& path);    // throws PreconditionViolated
};

// Name of the environment variable holding a default configuration path.
inline constexpr const char* kConfigEnv = "TUBECHECK_CONFIG";

struct Command {
  std::string name;
  std::map<std::string, std::string> args;  // option name without dashes -> value ("" for flags)
};

// Subcommands: families, verify-sphericity, verify-homogeneity, trace,
// signature, separate-quartics, separate-bases, j-invariant, phi-scan, chi,
// reciprocity, parse. Library errors become verdict Error with the code and
// message under values.
Report run(const Command& cmd, const Config& config);

// Full front end: argument parsing, configuration, dispatch and output.
int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace tubecheck
