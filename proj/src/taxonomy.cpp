#include "sqldebug/taxonomy.hpp"

#include <algorithm>
#include <set>

#include "sqldebug/span.hpp"

namespace sqldebug {
namespace {

constexpr const char* kSemantics = "Semantics & Logic";
constexpr const char* kFunctions = "Functions & Expressions";
constexpr const char* kJoins = "Joins & Grouping";
constexpr const char* kResult = "Result & Quality";
constexpr const char* kTypes = "Types & Data Formats";
constexpr const char* kIdents = "Identifiers & Objects";
constexpr const char* kRules = "Query Validation & Rules";
constexpr const char* kGrammar = "Grammar & Structure";
constexpr const char* kPunct = "Punctuation & Formatting";
constexpr const char* kDml = "DML & DDL";
constexpr const char* kDialect = "Compatibility/Dialect";

struct Row {
  const char* l1;
  const char* l2;
  const char* l3;
  int count;
  Detectability detect;
};

constexpr auto E = Detectability::error;
constexpr auto W = Detectability::warning;
constexpr auto S = Detectability::semantic_only;

// Semantic bug table.
constexpr Row kSemanticRows[] = {
    {kSemantics, "Aggregate Logic", "Using COUNT(column) instead of COUNT(*) and misunderstanding NULL exclusion", 43, S},
    {kSemantics, "Aggregate Logic", "Using SUM()/AVG() on a column with NULLs without COALESCE", 27, S},
    {kSemantics, "Join Logic", "JOIN condition placed in WHERE clause (accidental CROSS JOIN)", 41, S},
    {kSemantics, "Join Logic", "Failing to handle NULLs in JOIN keys (causing rows to disappear)", 13, S},
    {kSemantics, "Join Logic", "Missing condition causing Cartesian product", 2, W},
    {kSemantics, "Boolean & Logic", "Three-valued logic error: NOT (a = b) not equivalent to a != b when NULLs present", 14, S},
    {kSemantics, "Boolean & Logic", "Improper Boolean usage (e.g., WHERE col = TRUE)", 9, S},
    {kSemantics, "NULL Handling", "NULL compared with = (should use IS NULL)", 33, W},
    {kSemantics, "NULL Handling", "Confusion between IS NULL and =NULL", 2, W},
    {kSemantics, "Window Function Logic", "Using RANK() instead of ROW_NUMBER() or DENSE_RANK() leading to duplicates/skips", 31, S},
    {kSemantics, "Window Function Logic", "Incorrect partitioning/ordering in window function leading to wrong row assignment", 4, S},
    {kSemantics, "Subquery Scope", "Misplaced LIMIT inside subquery affecting outer results", 3, S},
    {kSemantics, "Subquery Scope", "Correlated subquery missing correlation condition", 2, S},
    {kSemantics, "JOIN Logic", "Missing condition causing Cartesian product", 12, W},
    {kSemantics, "JOIN Logic", "Wrong join key used inside nested subquery", 2, S},
    {kSemantics, "Set Operations", "UNION vs. UNION ALL misuse (unintended deduplication)", 55, S},
    {kSemantics, "Date/Time Logic", "Confusion between DATE, TIMESTAMP, and INTERVAL types", 23, S},
    {kSemantics, "Pattern Matching", "Incorrect LIKE usage", 2, S},
    {kFunctions, "Separator Rule", "collect_set/concat_ws separator uses semicolon", 54, S},
    {kFunctions, "Function Semantics", "Misunderstanding the empty handling of aggregate functions", 1, S},
    {kJoins, "GROUP BY Extensions", "Misuse of ROLLUP / CUBE", 14, S},
    {kJoins, "GROUP BY Extensions", "Rollup/Cube/Grouping Sets producing unexpected super-aggregate rows", 3, S},
    {kJoins, "GROUP BY Logic", "Grouping by a functionally dependent column unnecessarily", 17, S},
    {kJoins, "GROUP BY Logic", "Rollup/Cube/Grouping Sets producing unexpected super-aggregate rows", 4, S},
    {kJoins, "JOIN Type Selection", "Using INNER JOIN when LEFT JOIN is needed (loss of data)", 64, S},
    {kResult, "Correctness", "Duplicate rows due to many-to-many join not being accounted for", 1, S},
    {kResult, "Correctness", "Incorrect output data", 1, S},
    {kTypes, "Implicit Casting", "Implicit cast changing semantics (e.g., string to number)", 15, W},
    {kTypes, "Data Format", "Misused format placeholder", 1, S},
    {kIdents, "Qualification", "Qualifying a column with the wrong table alias in a complex join", 22, S},
};

// Syntax bug table.
constexpr Row kSyntaxRows[] = {
    {kFunctions, "Parameter Completeness", "Missing parameter for explode", 15, E},
    {kFunctions, "Parameter Completeness", "Incorrect explode parameter", 9, E},
    {kFunctions, "Parameter Completeness", "explode(map) requires two aliases", 2, E},
    {kFunctions, "Parameter Completeness", "date_add missing parameter (also typo data_add)", 2, E},
    {kFunctions, "Parameter Completeness", "array_contains wrong argument type", 1, E},
    {kFunctions, "Parameter Type", "get_json_object wrong argument type", 4, E},
    {kFunctions, "Parameter Type", "array_contains wrong argument type", 3, E},
    {kFunctions, "Parameter Type", "from_json wrong argument type", 1, E},
    {kFunctions, "LATERAL VIEW Required", "Missing LATERAL VIEW", 94, E},
    {kFunctions, "LATERAL VIEW Required", "Missing alias for LATERAL VIEW function output", 1, E},
    {kFunctions, "Date Difference", "datadiff argument/typo error", 5, E},
    {kFunctions, "Type Conversion", "Multiple AS in CAST", 15, E},
    {kFunctions, "Nesting Limit", "Aggregate expressions cannot be nested", 2, E},
    {kFunctions, "Separator Rule", "collect_set/concat_ws separator uses semicolon", 11, S},
    {kFunctions, "Date/Time", "to_unix_timestap typo", 1, E},
    {kFunctions, "Function Spelling", "concat_ws typo", 1, E},
    {kRules, "CASE Expression", "Missing END or THRN in CASE WHEN", 72, E},
    {kRules, "CASE Expression", "Multiple END in CASE WHEN", 4, E},
    {kRules, "Conditional Logic", "Missing argument in IN", 7, E},
    {kRules, "Conditional Logic", "IN subquery returns multiple columns", 1, E},
    {kRules, "Window Functions", "Window function misused with GROUP BY", 3, E},
    {kRules, "Window Functions", "Window function used inside WHERE/HAVING", 3, E},
    {kRules, "Window Functions", "Window function frame clause misuse (e.g., ROWS BETWEEN error)", 1, E},
    {kRules, "Subquery Scope", "Outer query references alias not visible in subquery", 2, E},
    {kRules, "Aggregation & Subquery", "SELECT list contains non-aggregated column not in GROUP BY", 62, E},
    {kRules, "Pattern Matching", "Incorrect LIKE usage", 2, E},
    {kRules, "Aggregate Usage", "Aggregate function in SELECT without GROUP BY", 1, E},
    {kRules, "Boolean & NULL", "NULL compared with = (should use IS NULL)", 2, W},
    {kGrammar, "Clause Structure", "Incorrect clause ordering - JOIN after WHERE", 7, E},
    {kGrammar, "Clause Structure", "Invalid SELECT clause syntax with subquery", 6, E},
    {kGrammar, "Clause Structure", "Missing SELECT before FROM clause", 5, E},
    {kGrammar, "Clause Structure", "Multiple WHERE", 4, E},
    {kGrammar, "Clause Structure", "Missing partition conditions in WHERE clause", 3, S},
    {kGrammar, "Clause Structure", "Missing logical connector in WHERE", 26, E},
    {kGrammar, "Clause Structure", "Non-query expression in illegal context", 3, E},
    {kGrammar, "Clause Structure", "Missing FROM clause", 2, E},
    {kGrammar, "Clause Structure", "Column count mismatch in UNION", 1, E},
    {kGrammar, "CTE/View", "WITH AS not first", 26, E},
    {kGrammar, "CTE/View", "Unnecessary WITH AS", 13, S},
    {kGrammar, "CTE/View", "Trailing comma after last view", 23, E},
    {kGrammar, "Keywords & Operators", "Keyword spelling error", 3, E},
    {kGrammar, "Keywords & Operators", "Space in !=", 2, E},
    {kGrammar, "Keywords & Operators", "Missing IN keyword", 2, E},
    {kGrammar, "Statement Ending", "Extra trailing statements", 4, E},
    {kGrammar, "Parentheses / Brackets", "Missing closing parenthesis", 5, E},
    {kGrammar, "Alias / AS", "Redundant AS", 3, E},
    {kGrammar, "SELECT List", "Missing column list after SELECT", 1, E},
    {kIdents, "Variables/Placeholders", "Variable error", 13, E},
    {kIdents, "Variables/Placeholders", "Missing partition conditions in DELETE statement", 2, S},
    {kIdents, "Variables/Placeholders", "Partition column comparison with numeric type not allowed", 2, E},
    {kIdents, "Ambiguous References", "Column exists in multiple tables but alias omitted", 8, E},
    {kIdents, "Ambiguous References", "Ambiguous alias in nested subquery with same column name", 1, E},
    {kIdents, "Schema/Object", "Field/Table does not exist", 11, E},
    {kIdents, "Schema/Object", "Missing partition query conditions", 2, S},
    {kIdents, "Naming/Alias", "Duplicate names (column/alias)", 5, E},
    {kJoins, "GROUP BY", "Missing grouping column", 14, E},
    {kJoins, "GROUP BY", "Missing HAVING clause for aggregate filtering", 1, E},
    {kJoins, "JOIN Ambiguity", "Missing condition causing Cartesian product", 6, W},
    {kJoins, "JOIN Ambiguity", "Missing table prefix for duplicate column names in join", 35, E},
    {kJoins, "Nested Joins", "Ambiguous column reference due to multiple levels of alias", 1, E},
    {kPunct, "Punctuation/Parentheses", "Punctuation error", 49, E},
    {kPunct, "Punctuation/Parentheses", "Incorrect quote type for column alias with special characters", 4, E},
    {kPunct, "Punctuation/Parentheses", "Missing semicolon between statements", 5, E},
    {kDml, "Insert Statement", "Insert error", 37, E},
    {kDml, "Insert Statement", "Mismatched column count", 5, E},
    {kDml, "Create Table Statement", "Table creation error", 10, E},
    {kDialect, "Function Differences", "TRANSFORM with lambda expression not supported in Hive", 3, E},
    {kDialect, "Function Differences", "wm_concat function not supported in the current SQL dialect", 1, E},
    {kTypes, "Type System", "Type mismatch", 16, E},
    {kTypes, "Date/Time", "to_unix_timestap typo", 2, E},
};

TaxonomyPath P(const char* l1, const char* l2, const char* l3) { return {l1, l2, l3}; }

std::vector<TaxonomyEntry> standard_entries() {
  std::vector<TaxonomyEntry> out;
  auto merge = [&](const Row& r, bool semantic) {
    TaxonomyPath path = P(r.l1, r.l2, r.l3);
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const TaxonomyEntry& e) { return e.path == path; });
    if (it == out.end()) {
      out.push_back({std::move(path), 0, 0, r.detect});
      it = out.end() - 1;
    }
    (semantic ? it->semantic_count : it->syntax_count) += r.count;
  };
  for (const Row& r : kSemanticRows) merge(r, true);
  for (const Row& r : kSyntaxRows) merge(r, false);
  return out;
}

}  // namespace

std::string to_string(const TaxonomyPath& path) {
  return path.level1 + " / " + path.level2 + " / " + path.level3;
}

std::string_view to_string(Detectability d) {
  switch (d) {
    case Detectability::error: return "error";
    case Detectability::warning: return "warning";
    case Detectability::semantic_only: return "semantic_only";
  }
  return "?";
}

TaxonomyRegistry::TaxonomyRegistry(std::vector<TaxonomyEntry> entries)
    : entries_(std::move(entries)) {
  std::set<TaxonomyPath> seen;
  for (const TaxonomyEntry& e : entries_) {
    if (!seen.insert(e.path).second) throw Error("duplicate taxonomy path: " + to_string(e.path));
  }
}

const TaxonomyRegistry& TaxonomyRegistry::standard() {
  static const TaxonomyRegistry registry(standard_entries());
  return registry;
}

const TaxonomyEntry* TaxonomyRegistry::find(const TaxonomyPath& path) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const TaxonomyEntry& e) { return e.path == path; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<std::string> TaxonomyRegistry::level1_names() const {
  std::vector<std::string> out;
  for (const TaxonomyEntry& e : entries_) {
    if (std::find(out.begin(), out.end(), e.path.level1) == out.end()) out.push_back(e.path.level1);
  }
  return out;
}

namespace tax {
TaxonomyPath field_not_exist() { return P(kIdents, "Schema/Object", "Field/Table does not exist"); }
TaxonomyPath ambiguous_column() {
  return P(kIdents, "Ambiguous References", "Column exists in multiple tables but alias omitted");
}
TaxonomyPath duplicate_name() { return P(kIdents, "Naming/Alias", "Duplicate names (column/alias)"); }
TaxonomyPath missing_grouping_column() { return P(kJoins, "GROUP BY", "Missing grouping column"); }
TaxonomyPath non_aggregated_column() {
  return P(kRules, "Aggregation & Subquery", "SELECT list contains non-aggregated column not in GROUP BY");
}
TaxonomyPath aggregate_in_where() {
  return P(kJoins, "GROUP BY", "Missing HAVING clause for aggregate filtering");
}
TaxonomyPath window_in_where() {
  return P(kRules, "Window Functions", "Window function used inside WHERE/HAVING");
}
TaxonomyPath nested_aggregate() {
  return P(kFunctions, "Nesting Limit", "Aggregate expressions cannot be nested");
}
TaxonomyPath union_arity() { return P(kGrammar, "Clause Structure", "Column count mismatch in UNION"); }
TaxonomyPath case_missing_end() { return P(kRules, "CASE Expression", "Missing END or THRN in CASE WHEN"); }
TaxonomyPath missing_lateral_view() { return P(kFunctions, "LATERAL VIEW Required", "Missing LATERAL VIEW"); }
TaxonomyPath explode_map_aliases() {
  return P(kFunctions, "Parameter Completeness", "explode(map) requires two aliases");
}
TaxonomyPath explode_missing_parameter() {
  return P(kFunctions, "Parameter Completeness", "Missing parameter for explode");
}
TaxonomyPath explode_bad_parameter() {
  return P(kFunctions, "Parameter Completeness", "Incorrect explode parameter");
}
TaxonomyPath multiple_as_in_cast() { return P(kFunctions, "Type Conversion", "Multiple AS in CAST"); }
TaxonomyPath insert_column_count() { return P(kDml, "Insert Statement", "Mismatched column count"); }
TaxonomyPath type_mismatch() { return P(kTypes, "Type System", "Type mismatch"); }
TaxonomyPath partition_numeric_compare() {
  return P(kIdents, "Variables/Placeholders", "Partition column comparison with numeric type not allowed");
}
TaxonomyPath implicit_cast() {
  return P(kTypes, "Implicit Casting", "Implicit cast changing semantics (e.g., string to number)");
}
TaxonomyPath null_equality() { return P(kRules, "Boolean & NULL", "NULL compared with = (should use IS NULL)"); }
TaxonomyPath cartesian_product() {
  return P(kJoins, "JOIN Ambiguity", "Missing condition causing Cartesian product");
}
TaxonomyPath unsupported_wm_concat() {
  return P(kDialect, "Function Differences", "wm_concat function not supported in the current SQL dialect");
}
TaxonomyPath unsupported_transform() {
  return P(kDialect, "Function Differences", "TRANSFORM with lambda expression not supported in Hive");
}
TaxonomyPath date_add_parameter() {
  return P(kFunctions, "Parameter Completeness", "date_add missing parameter (also typo data_add)");
}
TaxonomyPath datediff_error() { return P(kFunctions, "Date Difference", "datadiff argument/typo error"); }
TaxonomyPath array_contains_type() {
  return P(kFunctions, "Parameter Type", "array_contains wrong argument type");
}
TaxonomyPath get_json_object_type() {
  return P(kFunctions, "Parameter Type", "get_json_object wrong argument type");
}
TaxonomyPath from_json_type() { return P(kFunctions, "Parameter Type", "from_json wrong argument type"); }
TaxonomyPath concat_ws_typo() { return P(kFunctions, "Function Spelling", "concat_ws typo"); }
TaxonomyPath to_unix_timestamp_typo() { return P(kFunctions, "Date/Time", "to_unix_timestap typo"); }
TaxonomyPath missing_semicolon() {
  return P(kPunct, "Punctuation/Parentheses", "Missing semicolon between statements");
}
TaxonomyPath punctuation_error() { return P(kPunct, "Punctuation/Parentheses", "Punctuation error"); }
TaxonomyPath missing_connector() {
  return P(kGrammar, "Clause Structure", "Missing logical connector in WHERE");
}
TaxonomyPath missing_closing_paren() {
  return P(kGrammar, "Parentheses / Brackets", "Missing closing parenthesis");
}
TaxonomyPath insert_error() { return P(kDml, "Insert Statement", "Insert error"); }
TaxonomyPath table_creation_error() { return P(kDml, "Create Table Statement", "Table creation error"); }

TaxonomyPath union_misuse() {
  return P(kSemantics, "Set Operations", "UNION vs. UNION ALL misuse (unintended deduplication)");
}
TaxonomyPath null_equality_semantic() {
  return P(kSemantics, "NULL Handling", "NULL compared with = (should use IS NULL)");
}
TaxonomyPath rank_misuse() {
  return P(kSemantics, "Window Function Logic",
           "Using RANK() instead of ROW_NUMBER() or DENSE_RANK() leading to duplicates/skips");
}
TaxonomyPath inner_instead_of_left() {
  return P(kJoins, "JOIN Type Selection", "Using INNER JOIN when LEFT JOIN is needed (loss of data)");
}
TaxonomyPath separator_rule() {
  return P(kFunctions, "Separator Rule", "collect_set/concat_ws separator uses semicolon");
}
TaxonomyPath incorrect_output() { return P(kResult, "Correctness", "Incorrect output data"); }
TaxonomyPath implicit_cast_semantics() { return implicit_cast(); }
TaxonomyPath wrong_qualifier() {
  return P(kIdents, "Qualification", "Qualifying a column with the wrong table alias in a complex join");
}
TaxonomyPath incorrect_like() { return P(kSemantics, "Pattern Matching", "Incorrect LIKE usage"); }
}  // namespace tax

TaxonomyPath fault_taxonomy(GrammarFault fault) {
  switch (fault) {
    case GrammarFault::missing_select_list:
      return P(kGrammar, "SELECT List", "Missing column list after SELECT");
    case GrammarFault::missing_select: return P(kGrammar, "Clause Structure", "Missing SELECT before FROM clause");
    case GrammarFault::missing_from_source: return P(kGrammar, "Clause Structure", "Missing FROM clause");
    case GrammarFault::multiple_where: return P(kGrammar, "Clause Structure", "Multiple WHERE");
    case GrammarFault::clause_order:
      return P(kGrammar, "Clause Structure", "Incorrect clause ordering - JOIN after WHERE");
    case GrammarFault::missing_connector: return tax::missing_connector();
    case GrammarFault::with_not_first: return P(kGrammar, "CTE/View", "WITH AS not first");
    case GrammarFault::cte_trailing_comma: return P(kGrammar, "CTE/View", "Trailing comma after last view");
    case GrammarFault::keyword_spelling: return P(kGrammar, "Keywords & Operators", "Keyword spelling error");
    case GrammarFault::spaced_not_equal: return P(kGrammar, "Keywords & Operators", "Space in !=");
    case GrammarFault::missing_closing_paren: return tax::missing_closing_paren();
    case GrammarFault::redundant_as: return P(kGrammar, "Alias / AS", "Redundant AS");
    case GrammarFault::case_missing_end: return tax::case_missing_end();
    case GrammarFault::case_multiple_end: return P(kRules, "CASE Expression", "Multiple END in CASE WHEN");
    case GrammarFault::in_missing_argument: return P(kRules, "Conditional Logic", "Missing argument in IN");
    case GrammarFault::cast_multiple_as: return tax::multiple_as_in_cast();
    case GrammarFault::missing_lateral_view: return tax::missing_lateral_view();
    case GrammarFault::lateral_view_alias:
      return P(kFunctions, "LATERAL VIEW Required", "Missing alias for LATERAL VIEW function output");
    case GrammarFault::quoted_alias:
      return P(kPunct, "Punctuation/Parentheses", "Incorrect quote type for column alias with special characters");
    case GrammarFault::missing_semicolon: return tax::missing_semicolon();
    case GrammarFault::create_table: return tax::table_creation_error();
    case GrammarFault::insert_syntax: return tax::insert_error();
    case GrammarFault::punctuation:
    case GrammarFault::unterminated_literal: return tax::punctuation_error();
    case GrammarFault::unexpected_token:
    case GrammarFault::unexpected_end:
    case GrammarFault::empty_script:
      return P(kGrammar, "Clause Structure", "Non-query expression in illegal context");
  }
  return tax::punctuation_error();
}

}  // namespace sqldebug
