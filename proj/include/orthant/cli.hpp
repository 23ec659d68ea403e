#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orthant/core.hpp"
#include "orthant/error.hpp"
#include "orthant/integrator.hpp"
#include "orthant/probability.hpp"

namespace orthant::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kNumericalError = 3,
  kOracleMismatch = 4,
  kOracleInapplicable = 5,
};

int exit_code_for(ErrorCode code);

struct ProblemFile {
  ProblemSpec spec;
  std::optional<std::vector<int>> signs;
};

/// Parses {"mean": [...], "cov": [[...], ...], "signs": [...]?}. Throws
/// Error(ParseError) naming the offending row/column.
ProblemFile parse_problem(std::string_view text);
ProblemFile load_problem(const std::string& path);

/// Applies optional signs: returns (D cov D, D mean).
ProblemSpec apply_signs(const ProblemSpec& spec, const std::vector<int>& signs);

/// %.17g, or null for non-finite values.
std::string format_number(double v);

struct RunConfig {
  IntegratorConfig integrator;
  std::size_t dimension_cap = kDefaultDimensionCap;
  std::uint64_t seed = 42;
};

/// Result document with every key present; numbers use 17 significant digits.
std::string result_document(const OrthantResult& r, const RunConfig& config, double elapsed_seconds);

/// Error object {"error": <code>, "message": <text>}.
std::string error_document(ErrorCode code, std::string_view message);

/// Random correlation matrix: Gram matrix of d Gaussian vectors in R^{d+2},
/// each normalized to unit length. Deterministic in `seed`.
Matrix random_correlation(std::size_t dim, std::uint64_t seed);

/// Entry point for the command-line tool; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orthant::cli
