#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/span.hpp"

namespace sqldebug {

/// Grammar-level fault classes. Each one maps onto a row of the bug
/// taxonomy (see taxonomy.cpp), which is how Raw recovery nodes turn into
/// classified diagnostics.
enum class GrammarFault {
  unexpected_token,
  unexpected_end,
  empty_script,
  unterminated_literal,
  missing_select_list,
  missing_select,
  missing_from_source,
  multiple_where,
  clause_order,
  missing_connector,
  with_not_first,
  cte_trailing_comma,
  keyword_spelling,
  spaced_not_equal,
  missing_closing_paren,
  redundant_as,
  case_missing_end,
  case_multiple_end,
  in_missing_argument,
  cast_multiple_as,
  missing_lateral_view,
  lateral_view_alias,
  punctuation,
  quoted_alias,
  missing_semicolon,
  create_table,
  insert_syntax,
};

std::string_view to_string(GrammarFault fault);

struct ParseError {
  std::string message;
  Span span;
  /// Token kinds (or literal tokens, e.g. "')'") the parser would have accepted.
  std::vector<std::string> expected;
  GrammarFault fault = GrammarFault::unexpected_token;

  bool operator==(const ParseError&) const = default;
};

class ParseFailure : public Error {
 public:
  explicit ParseFailure(ParseError error)
      : Error(error.message), error_(std::move(error)) {}
  [[nodiscard]] const ParseError& error() const { return error_; }

 private:
  ParseError error_;
};

}  // namespace sqldebug
