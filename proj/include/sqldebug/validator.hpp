#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/catalog.hpp"
#include "sqldebug/lexer.hpp"
#include "sqldebug/syntax_tree.hpp"
#include "sqldebug/taxonomy.hpp"

namespace sqldebug {

enum class Severity { error, warning };

std::string_view to_string(Severity severity);

struct Diagnostic {
  TaxonomyPath taxonomy;
  std::string message;
  Span span;
  Severity severity = Severity::error;

  bool operator==(const Diagnostic&) const = default;
};

/// Static pseudo-execution of a script against a catalog. Checks grammar
/// (Raw recovery nodes), name resolution, aggregation and window placement,
/// set-operation arity, table functions, INSERT arity, shallow comparison
/// typing, join conditions and dialect support. Diagnostics are sorted by
/// span start; an empty list means the script passes.
///
/// CREATE TABLE statements in the script extend a script-local copy of the
/// catalog for the statements that follow them.
std::vector<Diagnostic> validate(const SyntaxTree& tree, const Catalog& catalog);

/// True iff validate() reports no error-severity diagnostic.
bool passes(const SyntaxTree& tree, const Catalog& catalog);

/// parse_recovering + validate. A blank script yields a single error.
std::vector<Diagnostic> lint(const SqlScript& script, const Catalog& catalog);

/// "level3: message" of the first error, for benchmark error_message fields.
std::string first_error_message(const std::vector<Diagnostic>& diagnostics);

}  // namespace sqldebug
