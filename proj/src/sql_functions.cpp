#include "sql_functions.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace sqldebug::detail {
namespace {

constexpr std::array<std::string_view, 14> kAggregates = {
    "count",  "sum",          "avg",         "min",      "max",        "collect_set", "collect_list",
    "stddev", "stddev_samp",  "stddev_pop",  "variance", "var_samp",   "var_pop",     "percentile"};

constexpr std::array<std::string_view, 10> kRanking = {
    "row_number", "rank", "dense_rank", "lag", "lead", "ntile", "first_value", "last_value",
    "percent_rank", "cume_dist"};

constexpr std::array<std::string_view, 5> kTableFunctions = {"explode", "posexplode", "inline",
                                                             "json_tuple", "stack"};

constexpr std::array<std::string_view, 96> kKnown = {
    "abs", "acos", "add_months", "array", "array_contains", "array_distinct", "array_join",
    "asin", "atan", "avg", "base64", "bround", "case", "cast", "cbrt", "ceil", "ceiling",
    "coalesce", "collect_list", "collect_set", "concat", "concat_ws", "conv", "cos", "count",
    "cume_dist", "current_date", "current_timestamp", "date", "date_add", "date_format",
    "date_sub", "date_trunc", "datediff", "day", "dayofmonth", "decode", "dense_rank", "elt",
    "encode", "exp", "explode", "first_value", "floor", "format_number", "from_json",
    "from_unixtime", "get_json_object", "greatest", "hash", "hour", "if", "ifnull", "in_file",
    "initcap", "inline", "instr", "isnotnull", "isnull", "json_tuple", "lag", "last_day",
    "last_value", "lcase", "lead", "least", "left", "length", "lower", "lpad", "ltrim", "map",
    "max", "md5", "min", "minute", "month", "months_between", "named_struct", "nvl", "percentile",
    "posexplode", "pow", "power", "rank", "regexp_extract", "regexp_replace", "round",
    "row_number", "rpad", "rtrim", "size", "sort_array", "split", "sqrt", "sum"};

constexpr std::array<std::string_view, 22> kKnownMore = {
    "stack", "stddev", "substr", "substring", "to_date", "to_json", "to_unix_timestamp",
    "trim", "trunc", "ucase", "unix_timestamp", "upper", "weekofyear", "year", "ntile",
    "percent_rank", "nvl2", "right", "sign", "variance", "struct", "quarter"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

}  // namespace

bool is_aggregate_function(std::string_view n) { return contains(kAggregates, n); }
bool is_ranking_function(std::string_view n) { return contains(kRanking, n); }
bool is_table_function(std::string_view n) { return contains(kTableFunctions, n); }
bool is_known_function(std::string_view n) {
  return contains(kKnown, n) || contains(kKnownMore, n) || is_aggregate_function(n);
}

bool has_over(const SyntaxTree& tree, NodeId call) {
  return tree.find_child(call, NodeKind::Over) >= 0;
}

std::string output_name(const SyntaxTree& tree, NodeId item, std::size_t position) {
  const Node& n = tree[item];
  if (n.kind == NodeKind::Alias) return n.label;
  if (n.kind == NodeKind::ColRef) {
    const auto dot = n.label.rfind('.');
    return dot == std::string::npos ? n.label : n.label.substr(dot + 1);
  }
  return "_c" + std::to_string(position);
}

std::optional<ColumnType> literal_type(std::string_view label) {
  if (label.empty()) return std::nullopt;
  if (label.front() == '\'' || label.front() == '"') return ColumnType::string;
  if (label == "NULL") return std::nullopt;
  if (label == "TRUE" || label == "FALSE") return ColumnType::boolean;
  if (label.rfind("${", 0) == 0) return std::nullopt;
  const bool fractional = label.find_first_of(".eE") != std::string_view::npos;
  return fractional ? ColumnType::double_ : ColumnType::int_;
}

std::string unquote(std::string_view quoted) {
  if (quoted.size() >= 2 && (quoted.front() == '\'' || quoted.front() == '"')) {
    return std::string(quoted.substr(1, quoted.size() - 2));
  }
  return std::string(quoted);
}

bool string_is_numeric(std::string_view quoted) {
  const std::string body = unquote(quoted);
  if (body.empty()) return false;
  std::size_t i = (body[0] == '-' || body[0] == '+') ? 1 : 0;
  bool digit = false;
  bool dot = false;
  for (; i < body.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(body[i]))) {
      digit = true;
    } else if (body[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digit;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace sqldebug::detail
