#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acc2dc/transform.hpp"

namespace acc2dc::testing {

/// One randomly generated loop program together with the mode to migrate it
/// with and the variables whose final values must agree.
struct SemanticCase {
  std::string family;
  Mode mode = Mode::AD;
  std::string source;
  bool integer = false;
  struct ArraySpec {
    std::string name;
    std::vector<std::int64_t> extents;
    /// Fixed initial value instead of random data ("identity" targets).
    enum class Fill { Random, Zero, One, Lowest, Highest } fill = Fill::Random;
  };
  std::vector<ArraySpec> arrays;
  std::vector<std::string> scalars;         ///< observable scalars, random initial values
  std::vector<std::pair<std::string, std::int64_t>> extents; ///< n1, n2, ...
  std::uint64_t seed = 0;
};

struct SemanticOutcome {
  bool ok = false;
  bool converted = false; ///< the output contains DO CONCURRENT and, for full modes, no directives
  std::string detail;
  double max_error = 0; ///< largest relative difference seen (floating cases)
};

/// Relative tolerance for floating-point comparisons. Integer cases must match exactly.
inline constexpr double kFloatTolerance = 1e-12;

const std::vector<std::string> &semantic_families();
SemanticCase make_semantic_case(const std::string &family, std::uint64_t seed);
/// Migrates the case and runs both versions in the reference interpreter.
SemanticOutcome check_semantic_case(const SemanticCase &c);

} // namespace acc2dc::testing
