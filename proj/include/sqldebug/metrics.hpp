#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqldebug/catalog.hpp"
#include "sqldebug/instance.hpp"
#include "sqldebug/lexer.hpp"
#include "sqldebug/plan.hpp"
#include "sqldebug/syntax_tree.hpp"
#include "sqldebug/taxonomy.hpp"

namespace sqldebug {

/// Unit-cost edit model; distances are normalized by the larger tree.
struct EditConfig {
  std::int64_t insert_cost = 1;
  std::int64_t delete_cost = 1;
  std::int64_t relabel_cost = 1;

  /// Throws Error unless every cost is positive.
  void check() const;
};

/// An edit cost over a size, kept as an exact rational so that ties compare
/// exactly.
struct Distance {
  std::int64_t cost = 0;
  std::int64_t size = 1;

  [[nodiscard]] double value() const { return size == 0 ? 0.0 : static_cast<double>(cost) / static_cast<double>(size); }
  /// Exact a < b by cross multiplication.
  friend bool operator<(const Distance& a, const Distance& b) { return a.cost * b.size < b.cost * a.size; }
  friend bool operator==(const Distance& a, const Distance& b) { return a.cost * b.size == b.cost * a.size; }
};

/// Plain ordered labeled tree; node 0 is the root.
struct LabeledTree {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> children;

  [[nodiscard]] std::size_t size() const { return labels.size(); }
  /// Adds a node and returns its index; `parent` is ignored for the first node.
  std::size_t add(std::string label, std::size_t parent);
};

/// "Kind|label" tree of a syntax tree with comments removed.
LabeledTree labeled_tree(const SyntaxTree& tree);

/// Zhang-Shasha ordered tree edit distance (raw cost).
std::int64_t tree_edit_cost(const LabeledTree& a, const LabeledTree& b, const EditConfig& config = {});

/// Edit cost over max(node_count(a), node_count(b)).
Distance tree_distance(const SyntaxTree& a, const SyntaxTree& b, const EditConfig& config = {});
double tree_edit_distance(const SyntaxTree& a, const SyntaxTree& b, const EditConfig& config = {});

/// Levenshtein distance over normalized significant tokens, over the longer
/// sequence. Used when a side only parses into Raw recovery nodes.
Distance token_distance(const SqlScript& a, const SqlScript& b);

/// Edit distance between two scripts: tree distance when both sides parse
/// (strictly or with recovery) without Raw nodes, token distance otherwise.
struct ScriptDistance {
  Distance distance;
  bool fallback_used = false;
};
ScriptDistance script_distance(const SqlScript& a, const SqlScript& b, const EditConfig& config = {});

/// \r\n -> \n, trailing whitespace stripped per line, leading and trailing
/// blank lines dropped.
std::string normalize_text(std::string_view text);

bool exact_match(const SqlScript& prediction, const std::vector<SqlScript>& references);

/// Lowers and normalizes a script; nullopt when it fails to parse, validate
/// or lower.
std::optional<CanonicalPlan> canonical_plan(const SqlScript& script, const Catalog& catalog);

bool graph_match(const SqlScript& prediction, const std::vector<SqlScript>& references, const Catalog& catalog);

struct ModifyBetter {
  bool mb = false;
  Distance distance_pred;
  Distance distance_issue;
  bool fallback_used = false;
};

/// min_r d(pred, r) < min_r d(issue, r), compared exactly. Every pair uses
/// token distance as soon as any of the scripts needs Raw recovery.
ModifyBetter modify_better(const SqlScript& prediction, const SqlScript& issue,
                           const std::vector<SqlScript>& references, const EditConfig& config = {});

struct InstanceScore {
  std::string instance_id;
  bool em = false;
  bool gm = false;
  bool mb = false;
  double distance_pred = 0.0;
  double distance_issue = 0.0;
  bool fallback_used = false;

  bool operator==(const InstanceScore&) const = default;
};

/// Scores one prediction. The catalog is built from the instance's DDL.
InstanceScore score_instance(const BenchmarkInstance& instance, const SqlScript& prediction);

/// Scores every instance (a missing prediction scores as an empty script),
/// fanning out over `threads` workers; results follow instance order.
std::vector<InstanceScore> score_all(const std::vector<BenchmarkInstance>& instances,
                                     const std::map<std::string, Prediction>& predictions,
                                     unsigned threads = 0);

/// Counts behind a percentage triple.
struct MetricCounts {
  std::size_t n = 0;
  std::size_t em = 0;
  std::size_t gm = 0;
  std::size_t mb = 0;

  bool operator==(const MetricCounts&) const = default;
};

struct ScoreReport {
  MetricCounts overall;
  std::map<std::string, MetricCounts> per_taxonomy;  ///< keyed by level1
};

/// Fails with Error on empty input.
ScoreReport aggregate(const std::vector<std::pair<TaxonomyPath, InstanceScore>>& scores);

/// 100 * count / n rounded half-up to hundredths, e.g. 171/469 -> 3646.
std::int64_t percentage_hundredths(std::size_t count, std::size_t n);
/// Two-decimal text, e.g. "36.46".
std::string format_percentage(std::size_t count, std::size_t n);

}  // namespace sqldebug
