#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/parse_error.hpp"

namespace sqldebug {

struct TaxonomyPath {
  std::string level1;
  std::string level2;
  std::string level3;

  auto operator<=>(const TaxonomyPath&) const = default;
  bool operator==(const TaxonomyPath&) const = default;
};

/// "level1 / level2 / level3".
std::string to_string(const TaxonomyPath& path);

/// How a bug class surfaces under static validation.
enum class Detectability {
  error,          ///< validator reports an error-severity diagnostic
  warning,        ///< validator reports a warning; the script still passes
  semantic_only,  ///< statically invisible; only plan comparison reveals it
};

std::string_view to_string(Detectability d);

struct TaxonomyEntry {
  TaxonomyPath path;
  int semantic_count = 0;  ///< occurrences in the semantic bug table
  int syntax_count = 0;    ///< occurrences in the syntax bug table
  Detectability detectability = Detectability::semantic_only;

  [[nodiscard]] int count() const { return semantic_count + syntax_count; }
};

/// The three-level bug taxonomy. Paths are unique.
class TaxonomyRegistry {
 public:
  TaxonomyRegistry() = default;
  explicit TaxonomyRegistry(std::vector<TaxonomyEntry> entries);

  /// Registry seeded with every row of the semantic and syntax bug tables.
  static const TaxonomyRegistry& standard();

  [[nodiscard]] const std::vector<TaxonomyEntry>& entries() const { return entries_; }
  [[nodiscard]] const TaxonomyEntry* find(const TaxonomyPath& path) const;
  [[nodiscard]] bool contains(const TaxonomyPath& path) const { return find(path) != nullptr; }
  /// Distinct level-1 names, in first-seen order.
  [[nodiscard]] std::vector<std::string> level1_names() const;

 private:
  std::vector<TaxonomyEntry> entries_;
};

/// Taxonomy row that a grammar fault manifests as.
TaxonomyPath fault_taxonomy(GrammarFault fault);

/// Shorthand constructors for the paths the toolkit emits. Every function
/// returns a path present in TaxonomyRegistry::standard().
namespace tax {
TaxonomyPath field_not_exist();
TaxonomyPath ambiguous_column();
TaxonomyPath duplicate_name();
TaxonomyPath missing_grouping_column();
TaxonomyPath non_aggregated_column();
TaxonomyPath aggregate_in_where();
TaxonomyPath window_in_where();
TaxonomyPath nested_aggregate();
TaxonomyPath union_arity();
TaxonomyPath case_missing_end();
TaxonomyPath missing_lateral_view();
TaxonomyPath explode_map_aliases();
TaxonomyPath explode_missing_parameter();
TaxonomyPath explode_bad_parameter();
TaxonomyPath multiple_as_in_cast();
TaxonomyPath insert_column_count();
TaxonomyPath type_mismatch();
TaxonomyPath partition_numeric_compare();
TaxonomyPath implicit_cast();
TaxonomyPath null_equality();
TaxonomyPath cartesian_product();
TaxonomyPath unsupported_wm_concat();
TaxonomyPath unsupported_transform();
TaxonomyPath date_add_parameter();
TaxonomyPath datediff_error();
TaxonomyPath array_contains_type();
TaxonomyPath get_json_object_type();
TaxonomyPath from_json_type();
TaxonomyPath concat_ws_typo();
TaxonomyPath to_unix_timestamp_typo();
TaxonomyPath missing_semicolon();
TaxonomyPath punctuation_error();
TaxonomyPath missing_connector();
TaxonomyPath missing_closing_paren();
TaxonomyPath insert_error();
TaxonomyPath table_creation_error();
// semantic-table rows
TaxonomyPath union_misuse();
TaxonomyPath null_equality_semantic();
TaxonomyPath rank_misuse();
TaxonomyPath inner_instead_of_left();
TaxonomyPath separator_rule();
TaxonomyPath incorrect_output();
TaxonomyPath implicit_cast_semantics();
TaxonomyPath wrong_qualifier();
TaxonomyPath incorrect_like();
}  // namespace tax

}  // namespace sqldebug
