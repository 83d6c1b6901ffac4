#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sqldebug/catalog.hpp"
#include "sqldebug/syntax_tree.hpp"

namespace sqldebug::detail {

/// Aggregate functions (outside an OVER clause they collapse groups).
bool is_aggregate_function(std::string_view lower_name);
/// Functions that are only meaningful with OVER (row_number, rank, lag, ...).
bool is_ranking_function(std::string_view lower_name);
/// Table-generating functions that must sit in a LATERAL VIEW.
bool is_table_function(std::string_view lower_name);
/// Built-in functions known to the dialect (used to tell a typo from a UDF).
bool is_known_function(std::string_view lower_name);

/// True for FunctionCall nodes carrying an Over child.
bool has_over(const SyntaxTree& tree, NodeId call);

/// Column name a projection item produces: the alias, the referenced
/// column, or Hive's positional `_cN`.
std::string output_name(const SyntaxTree& tree, NodeId item, std::size_t position);

/// Type of a literal node, if it has one (NULL has none).
std::optional<ColumnType> literal_type(std::string_view label);
/// True when a quoted string literal's body is a plain number.
bool string_is_numeric(std::string_view quoted);
/// Literal body without its quotes.
std::string unquote(std::string_view quoted);

std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace sqldebug::detail
