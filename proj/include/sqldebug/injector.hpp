#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/catalog.hpp"
#include "sqldebug/instance.hpp"
#include "sqldebug/lexer.hpp"
#include "sqldebug/metrics.hpp"
#include "sqldebug/syntax_tree.hpp"
#include "sqldebug/taxonomy.hpp"
#include "sqldebug/validator.hpp"

namespace sqldebug {

/// Structural profile of a script, used to pick applicable bug types.
struct FeatureSet {
  bool has_case = false;
  bool has_union_all = false;
  bool has_lateral_view = false;
  bool has_window = false;
  bool has_group_by = false;
  bool has_insert = false;
  bool has_cte = false;
  bool has_distinct = false;
  bool has_cast = false;
  bool has_like = false;
  std::size_t statements = 0;
  std::size_t null_comparison_sites = 0;        ///< IS [NOT] NULL predicates
  std::map<std::string, std::size_t> joins;     ///< join kind -> count, e.g. {"LEFT": 2}
  std::map<std::string, std::size_t> functions; ///< lower-case function name -> calls
  std::map<std::string, std::size_t> operator_sites;  ///< operator id -> candidate sites

  bool operator==(const FeatureSet&) const = default;
};

/// A byte-range replacement in the source text.
struct Edit {
  Span span;
  std::string replacement;

  bool operator==(const Edit&) const = default;
};

/// Everything a site finder may consult.
struct SiteContext {
  const SyntaxTree& tree;
  const std::vector<Token>& tokens;  ///< lossless token stream of tree.source()
  const Catalog* catalog = nullptr;
};

/// A taxonomy-labeled single-site mutation.
struct MutationOperator {
  std::string id;
  TaxonomyPath taxonomy;
  TaskType bug_class = TaskType::syntax;
  std::string description;  ///< short human description, used in user_query templates
  /// Candidate edits in source order.
  std::function<std::vector<Edit>(const SiteContext&)> sites;

  [[nodiscard]] bool applicable(const FeatureSet& features) const;
};

/// The shipped operator set, in a fixed order.
const std::vector<MutationOperator>& mutation_operators();
/// Looks an operator up by id; throws Error when unknown.
const MutationOperator& find_operator(std::string_view id);

FeatureSet structural_profile(const SyntaxTree& tree, const Catalog* catalog = nullptr);

/// Applicable operators ranked by how common their taxonomy row is in the
/// registry (descending), then by fewest candidate sites, then by taxonomy
/// path and id; truncated to k. `only` restricts to one bug class.
std::vector<const MutationOperator*> candidate_bugs(const FeatureSet& features, const TaxonomyRegistry& registry,
                                                    std::size_t k,
                                                    std::optional<TaskType> only = std::nullopt);

struct InjectionResult {
  std::string operator_id;
  SqlScript issue_sql;
  TaxonomyPath taxonomy;
  TaskType bug_class = TaskType::syntax;
  Distance distance;  ///< normalized edit distance to the reference
  bool fallback_used = false;
  std::vector<Diagnostic> diagnostics;  ///< validator output on the issue
  Span site_span;                       ///< replaced byte range of the reference
  std::string replacement;

  [[nodiscard]] double edit_distance_to_reference() const { return distance.value(); }
};

constexpr double kDefaultBudget = 0.15;

/// Applies `op` at its first site (in source order) whose mutant satisfies
/// the operator's class contract within the budget. Throws Error when no
/// site exists or none is accepted.
InjectionResult inject(const SqlScript& reference, const MutationOperator& op, const Catalog& catalog,
                       double budget = kDefaultBudget);

struct Verification {
  bool ok = false;
  std::string reason;  ///< "ok" or the first failed check
};

/// Re-checks an injection against its reference: syntax mutants fail
/// validation with a diagnostic in the operator's level1; semantic mutants
/// pass validation and lower to a different canonical plan; the distance is
/// within budget; no comment byte changed.
Verification verify_injection(const InjectionResult& result, const SqlScript& reference, const Catalog& catalog,
                              double budget = kDefaultBudget);

/// Splices an edit into a text.
std::string apply_edit(std::string_view text, const Edit& edit);

}  // namespace sqldebug
