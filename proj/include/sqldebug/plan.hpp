#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/catalog.hpp"
#include "sqldebug/syntax_tree.hpp"

namespace sqldebug {

struct PlanNode;

enum class ExprKind {
  literal,   ///< name: normalized literal text ('str', 42, TRUE, NULL, *)
  column,    ///< ordinal into the input row `level` subquery boundaries up
  call,      ///< name: function; distinct flag in `detail`
  op,        ///< name: operator (AND, OR, NOT, =, <>, <, +, IS NULL, IN, LIKE, ...)
  case_,     ///< args: [operand] (when, then)* [else]; name: CASE / CASE SIMPLE, detail: ELSE?
  cast,      ///< name: target type; args[0]: value
  subquery,  ///< name: EXISTS / NOT EXISTS / IN / NOT IN / SCALAR; args: [lhs]; subplans[0]
  window,    ///< name: function; args; partition; order (sort keys); detail: frame
  sort_key,  ///< name: direction ("", ASC, DESC, ...); args[0]: key
};

std::string_view to_string(ExprKind kind);

/// Scalar expression over the input row of the plan node that owns it.
/// Column references are positional, so source aliases never appear.
struct Expr {
  ExprKind kind = ExprKind::literal;
  std::string name;
  std::string detail;
  std::size_t ordinal = 0;
  std::size_t level = 0;
  std::vector<Expr> args;
  std::vector<Expr> partition;
  std::vector<Expr> order;
  std::vector<PlanNode> subplans;

  static Expr literal(std::string text);
  static Expr column(std::size_t ordinal, std::size_t level = 0);
  static Expr op(std::string name, std::vector<Expr> args);
  static Expr call(std::string name, std::vector<Expr> args);

  bool operator==(const Expr& other) const;
};

enum class PlanKind {
  Scan,         ///< detail: table; arity: table columns
  Values,       ///< one row of `exprs` (empty for a FROM-less SELECT)
  Project,      ///< exprs: output columns
  Filter,       ///< exprs[0]: predicate
  Join,         ///< detail: INNER/LEFT/RIGHT/FULL/CROSS/LEFT SEMI; exprs: [condition]
  Aggregate,    ///< keys: grouping keys; exprs: aggregate calls; output keys ++ aggs
  Window,       ///< exprs: window expressions; output input ++ windows
  Sort,         ///< exprs: sort keys
  Limit,        ///< detail: row count
  Union,        ///< detail: ALL or DISTINCT
  Distinct,
  LateralView,  ///< exprs[0]: generator call; detail: [OUTER ]k; output input ++ k columns
  Insert,       ///< detail: mode + target (+ column list); keys: partition spec
  CreateTable,  ///< detail: table and column spec; children: [CTAS query]
};

std::string_view to_string(PlanKind kind);

struct PlanNode {
  PlanKind kind = PlanKind::Values;
  std::string detail;
  std::vector<Expr> exprs;
  std::vector<Expr> keys;
  std::vector<PlanNode> children;
  std::size_t arity = 0;  ///< number of output columns

  bool operator==(const PlanNode& other) const;
};

/// One plan per statement, in script order (comments are dropped).
struct ScriptPlan {
  std::vector<PlanNode> statements;
  bool operator==(const ScriptPlan&) const = default;
};

/// Lowers a syntax tree to relational plans: CTEs and derived tables are
/// inlined, `*` is expanded from the catalog, aliases are erased and
/// `!=`/`==` become `<>`/`=`. Throws Error naming the node kind for
/// constructs outside the supported subset (including Raw nodes).
ScriptPlan lower(const SyntaxTree& tree, const Catalog& catalog);

/// Rewrite rules of the normal form (R1, alias erasure, is part of lower()).
enum class Rule {
  flatten_and_sort,       ///< R2: flatten AND/OR, order operands canonically
  fold_constants,         ///< R3: fold literal arithmetic/comparisons, drop TRUE filters
  commutative_order,      ///< R4: order inner-join inputs and =, +, * operands
  inline_passthrough,     ///< R5: remove identity projections below the root
  push_not,               ///< R6: remove NOT NOT, push NOT into comparisons
  merge_filters,          ///< R7: Filter(Filter(x)) -> Filter(p AND q)
  collapse_projects,      ///< R8: Project(Project(x)) -> Project(x)
};

std::string_view to_string(Rule rule);

/// Applies one rule once over the whole plan (bottom-up, no fixpoint).
PlanNode apply_rule(const PlanNode& plan, Rule rule);

struct CanonicalPlan {
  ScriptPlan plan;
  std::string text;    ///< canonical serialization
  std::string digest;  ///< SHA-256 of `text`, lower-case hex

  bool operator==(const CanonicalPlan&) const = default;
};

/// Applies R2-R8 to a fixpoint and serializes the result.
CanonicalPlan normalize(const ScriptPlan& plan);
PlanNode normalize(const PlanNode& plan);

/// Indented canonical text of a plan; stable across runs and platforms.
std::string serialize(const ScriptPlan& plan);
std::string serialize(const PlanNode& plan);
/// One-line rendering of an expression.
std::string render(const Expr& expr);

std::string canonical_digest(const CanonicalPlan& plan);
std::string sha256_hex(std::string_view data);

/// Digest equality as a filter, structural equality as the authority.
bool plans_isomorphic(const CanonicalPlan& a, const CanonicalPlan& b);

}  // namespace sqldebug
