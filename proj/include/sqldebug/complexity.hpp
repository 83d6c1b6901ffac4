#pragma once

#include <limits>
#include <optional>

#include "sqldebug/catalog.hpp"
#include "sqldebug/lexer.hpp"
#include "sqldebug/syntax_tree.hpp"

namespace sqldebug {

/// Weights of the composite complexity score and the seed threshold.
/// composite = alpha * (depth + width) + beta * lines.
struct ProfilerConfig {
  double alpha = 1.0;
  double beta = 0.1;
  double tau = -std::numeric_limits<double>::infinity();

  /// Throws Error unless alpha, beta >= 0 and alpha + beta > 0.
  void check() const;
};

struct ComplexityProfile {
  int depth = 0;
  int width = 0;
  int lines = 0;
  int tokens = 0;
  int functions = 0;
  double composite = 0.0;

  bool operator==(const ComplexityProfile&) const = default;
};

/// Nodes on the longest root-to-leaf path (the root counts as 1).
int ast_depth(const SyntaxTree& tree);
/// Largest number of nodes sharing one depth level.
int ast_width(const SyntaxTree& tree);
/// Lines holding at least one non-whitespace character.
int count_lines(std::string_view text);

/// Parses with parse_script (failures propagate) and fills every field.
/// The catalog is accepted for interface symmetry; profiling is purely
/// structural.
ComplexityProfile profile(const SqlScript& script, const ProfilerConfig& config = {},
                          const Catalog* catalog = nullptr);

/// Seed filter: composite strictly greater than tau.
bool passes_threshold(const ComplexityProfile& profile, const ProfilerConfig& config);

}  // namespace sqldebug
