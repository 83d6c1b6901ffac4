#pragma once

#include <vector>

#include "sqldebug/lexer.hpp"
#include "sqldebug/parse_error.hpp"
#include "sqldebug/syntax_tree.hpp"

namespace sqldebug {

/// Strict parse. Throws ParseFailure at the first grammar violation.
/// Semicolon-separated statements become children of the Script root, in
/// source order, with comments as statement-level Comment leaves.
SyntaxTree parse_script(const SqlScript& script);

struct ParseResult {
  SyntaxTree tree;
  std::vector<ParseError> errors;

  [[nodiscard]] bool clean() const { return errors.empty(); }
};

/// Best-effort parse that never throws: a statement that fails becomes a
/// Raw node covering its tokens up to the next semicolon (or end of input),
/// and parsing resumes with the following statement. `errors` is parallel
/// to the Raw nodes in source order.
ParseResult parse_recovering(const SqlScript& script);

/// True when the tree contains at least one Raw node.
bool has_raw(const SyntaxTree& tree);

}  // namespace sqldebug
