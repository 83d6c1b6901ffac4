#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <numeric>
#include <optional>

#include "sqldebug/plan.hpp"

namespace sqldebug {
namespace {

constexpr int kMaxIterations = 32;

using Perm = std::vector<std::size_t>;  // old output ordinal -> new output ordinal

bool is_op(const Expr& e, std::string_view name) { return e.kind == ExprKind::op && e.name == name; }

bool is_literal(const Expr& e, std::string_view text) { return e.kind == ExprKind::literal && e.name == text; }

std::optional<long long> int_literal(const Expr& e) {
  if (e.kind != ExprKind::literal || e.name.empty()) return std::nullopt;
  long long v = 0;
  const char* first = e.name.data();
  const char* last = first + e.name.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

bool is_string_literal(const Expr& e) {
  return e.kind == ExprKind::literal && e.name.size() >= 2 && e.name.front() == '\'' && e.name.back() == '\'';
}

Expr bool_literal(bool v) { return Expr::literal(v ? "TRUE" : "FALSE"); }

bool comparison(const std::string& op) {
  return op == "=" || op == "<>" || op == "<" || op == ">" || op == "<=" || op == ">=";
}

std::string flip(const std::string& op) {
  if (op == "<") return ">";
  if (op == ">") return "<";
  if (op == "<=") return ">=";
  if (op == ">=") return "<=";
  return op;
}

/// Negated form of a predicate operator, when one exists.
std::optional<std::string> negation(const std::string& op) {
  static const std::map<std::string, std::string> kNegate = {
      {"=", "<>"},           {"<>", "="},           {"<", ">="},
      {">=", "<"},           {">", "<="},           {"<=", ">"},
      {"IS NULL", "IS NOT NULL"}, {"IS NOT NULL", "IS NULL"}, {"IN", "NOT IN"},
      {"NOT IN", "IN"},      {"LIKE", "NOT LIKE"},  {"NOT LIKE", "LIKE"},
      {"RLIKE", "NOT RLIKE"}, {"NOT RLIKE", "RLIKE"}, {"BETWEEN", "NOT BETWEEN"},
      {"NOT BETWEEN", "BETWEEN"}, {"EXISTS", "NOT EXISTS"}, {"NOT EXISTS", "EXISTS"}};
  if (auto it = kNegate.find(op); it != kNegate.end()) return it->second;
  return std::nullopt;
}

bool contains_subquery(const Expr& e) {
  if (e.kind == ExprKind::subquery) return true;
  auto any = [](const std::vector<Expr>& v) { return std::any_of(v.begin(), v.end(), contains_subquery); };
  return any(e.args) || any(e.partition) || any(e.order);
}

// ------------------------------------------------------------ generic walks

/// Rewrites every expression of `node` bottom-up with `fn`; plans nested in
/// subquery expressions are rewritten with `plan_fn`.
template <typename ExprFn, typename PlanFn>
Expr map_expr(const Expr& e, ExprFn& fn, PlanFn& plan_fn) {
  Expr out = e;
  for (Expr& a : out.args) a = map_expr(a, fn, plan_fn);
  for (Expr& p : out.partition) p = map_expr(p, fn, plan_fn);
  for (Expr& o : out.order) o = map_expr(o, fn, plan_fn);
  for (PlanNode& s : out.subplans) s = plan_fn(s);
  return fn(std::move(out));
}

template <typename ExprFn, typename PlanFn>
void map_node_exprs(PlanNode& node, ExprFn& fn, PlanFn& plan_fn) {
  for (Expr& e : node.exprs) e = map_expr(e, fn, plan_fn);
  for (Expr& e : node.keys) e = map_expr(e, fn, plan_fn);
}

/// Applies an expression rewrite everywhere in a plan, including subplans.
template <typename ExprFn>
PlanNode rewrite_exprs(const PlanNode& plan, ExprFn fn) {
  std::function<PlanNode(const PlanNode&)> walk = [&](const PlanNode& p) {
    PlanNode out = p;
    for (PlanNode& c : out.children) c = walk(c);
    map_node_exprs(out, fn, walk);
    return out;
  };
  return walk(plan);
}

/// Remaps column references that point `level` subquery boundaries above
/// the expression's owner (level 0: the owner's own input row).
Expr remap(const Expr& e, const Perm& perm, std::size_t level);

PlanNode remap_plan(const PlanNode& p, const Perm& perm, std::size_t level) {
  PlanNode out = p;
  for (PlanNode& c : out.children) c = remap_plan(c, perm, level);
  for (Expr& e : out.exprs) e = remap(e, perm, level);
  for (Expr& e : out.keys) e = remap(e, perm, level);
  return out;
}

Expr remap(const Expr& e, const Perm& perm, std::size_t level) {
  Expr out = e;
  if (out.kind == ExprKind::column && out.level == level && out.ordinal < perm.size()) {
    out.ordinal = perm[out.ordinal];
  }
  for (Expr& a : out.args) a = remap(a, perm, level);
  for (Expr& p : out.partition) p = remap(p, perm, level);
  for (Expr& o : out.order) o = remap(o, perm, level);
  for (PlanNode& s : out.subplans) s = remap_plan(s, perm, level + 1);
  return out;
}

/// Replaces level-`level` column i with `values[i]`, shifting the inserted
/// expression's own references into the substitution context.
Expr substitute(const Expr& e, const std::vector<Expr>& values, std::size_t level) {
  if (e.kind == ExprKind::column && e.level == level) return values.at(e.ordinal);
  Expr out = e;
  for (Expr& a : out.args) a = substitute(a, values, level);
  for (Expr& p : out.partition) p = substitute(p, values, level);
  for (Expr& o : out.order) o = substitute(o, values, level);
  return out;
}

bool refers_at_level(const Expr& e, std::size_t level);

bool plan_refers_at_level(const PlanNode& p, std::size_t level) {
  auto any = [&](const std::vector<Expr>& v) {
    return std::any_of(v.begin(), v.end(), [&](const Expr& x) { return refers_at_level(x, level); });
  };
  if (any(p.exprs) || any(p.keys)) return true;
  return std::any_of(p.children.begin(), p.children.end(),
                     [&](const PlanNode& c) { return plan_refers_at_level(c, level); });
}

bool refers_at_level(const Expr& e, std::size_t level) {
  if (e.kind == ExprKind::column && e.level == level) return true;
  auto any = [&](const std::vector<Expr>& v) {
    return std::any_of(v.begin(), v.end(), [&](const Expr& x) { return refers_at_level(x, level); });
  };
  if (any(e.args) || any(e.partition) || any(e.order)) return true;
  return std::any_of(e.subplans.begin(), e.subplans.end(),
                     [&](const PlanNode& s) { return plan_refers_at_level(s, level + 1); });
}

// ---------------------------------------------------------- R2: flatten/sort

Expr flatten_sort(Expr e) {
  if (e.kind != ExprKind::op || (e.name != "AND" && e.name != "OR")) return e;
  std::vector<Expr> flat;
  for (Expr& a : e.args) {
    if (is_op(a, e.name)) {
      for (Expr& inner : a.args) flat.push_back(std::move(inner));
    } else {
      flat.push_back(std::move(a));
    }
  }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const Expr& a, const Expr& b) { return render(a) < render(b); });
  e.args = std::move(flat);
  return e;
}

// ----------------------------------------------------------- R3: constants

Expr fold(Expr e) {
  if (e.kind != ExprKind::op) return e;
  const std::string& op = e.name;
  if ((op == "+" || op == "-" || op == "*") && e.args.size() == 2) {
    auto a = int_literal(e.args[0]);
    auto b = int_literal(e.args[1]);
    if (a && b) {
      long long r = 0;
      bool overflow = false;
      if (op == "+") overflow = __builtin_add_overflow(*a, *b, &r);
      if (op == "-") overflow = __builtin_sub_overflow(*a, *b, &r);
      if (op == "*") overflow = __builtin_mul_overflow(*a, *b, &r);
      if (!overflow) return Expr::literal(std::to_string(r));
    }
    return e;
  }
  if (comparison(op) && e.args.size() == 2) {
    const Expr& l = e.args[0];
    const Expr& r = e.args[1];
    std::optional<int> cmp;
    if (auto a = int_literal(l), b = int_literal(r); a && b) {
      cmp = *a < *b ? -1 : (*a > *b ? 1 : 0);
    } else if (is_string_literal(l) && is_string_literal(r) && (op == "=" || op == "<>")) {
      cmp = l.name == r.name ? 0 : 1;
    }
    if (!cmp) return e;
    const int c = *cmp;
    if (op == "=") return bool_literal(c == 0);
    if (op == "<>") return bool_literal(c != 0);
    if (op == "<") return bool_literal(c < 0);
    if (op == ">") return bool_literal(c > 0);
    if (op == "<=") return bool_literal(c <= 0);
    return bool_literal(c >= 0);
  }
  if (op == "NOT" && e.args.size() == 1) {
    if (is_literal(e.args[0], "TRUE")) return bool_literal(false);
    if (is_literal(e.args[0], "FALSE")) return bool_literal(true);
    return e;
  }
  if (op == "AND" || op == "OR") {
    const bool is_and = op == "AND";
    const char* identity = is_and ? "TRUE" : "FALSE";
    const char* absorbing = is_and ? "FALSE" : "TRUE";
    std::vector<Expr> kept;
    for (Expr& a : e.args) {
      if (is_literal(a, absorbing)) return Expr::literal(absorbing);
      if (!is_literal(a, identity)) kept.push_back(std::move(a));
    }
    if (kept.empty()) return Expr::literal(identity);
    if (kept.size() == 1) return std::move(kept[0]);
    e.args = std::move(kept);
  }
  return e;
}

// ------------------------------------------------------------ R6: NOT push

Expr push_not(Expr e) {
  if (!is_op(e, "NOT") || e.args.size() != 1) return e;
  Expr& inner = e.args[0];
  if (is_op(inner, "NOT") && inner.args.size() == 1) return std::move(inner.args[0]);
  if (inner.kind == ExprKind::op || inner.kind == ExprKind::subquery) {
    if (auto neg = negation(inner.name)) {
      Expr out = std::move(inner);
      out.name = *neg;
      return out;
    }
  }
  return e;
}

// --------------------------------------------- R4: operand canonicalization

Expr order_operands(Expr e) {
  if (e.kind != ExprKind::op || e.args.size() != 2) {
    if (e.kind == ExprKind::op && (e.name == "+" || e.name == "*") && e.args.size() > 2) {
      std::stable_sort(e.args.begin(), e.args.end(),
                       [](const Expr& a, const Expr& b) { return render(a) < render(b); });
    }
    return e;
  }
  const std::string& op = e.name;
  const bool symmetric = op == "=" || op == "<>" || op == "<=>" || op == "+" || op == "*";
  const bool orientable = op == "<" || op == ">" || op == "<=" || op == ">=";
  if ((symmetric || orientable) && render(e.args[1]) < render(e.args[0])) {
    std::swap(e.args[0], e.args[1]);
    e.name = flip(op);
  }
  if (op == "+" || op == "*") {
    // flatten nested chains of the same operator, then order
    std::vector<Expr> flat;
    for (Expr& a : e.args) {
      if (is_op(a, e.name)) {
        for (Expr& inner : a.args) flat.push_back(std::move(inner));
      } else {
        flat.push_back(std::move(a));
      }
    }
    std::stable_sort(flat.begin(), flat.end(),
                     [](const Expr& a, const Expr& b) { return render(a) < render(b); });
    e.args = std::move(flat);
  }
  return e;
}

Perm identity(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

struct Canon {
  PlanNode node;
  Perm perm;
};

std::string line(const PlanNode& p) {
  // single-line form of a subtree, via a Values wrapper-free serialization
  std::string text = serialize(p);
  std::replace(text.begin(), text.end(), '\n', '|');
  return text;
}

Canon canon(const PlanNode& plan);

Expr canon_expr(const Expr& e) {
  Expr out = e;
  for (Expr& a : out.args) a = canon_expr(a);
  for (Expr& p : out.partition) p = canon_expr(p);
  for (Expr& o : out.order) o = canon_expr(o);
  for (PlanNode& s : out.subplans) s = canon(s).node;
  return order_operands(flatten_sort(std::move(out)));
}

void canon_exprs(PlanNode& node) {
  for (Expr& e : node.exprs) e = canon_expr(e);
  for (Expr& e : node.keys) e = canon_expr(e);
}

Canon canon(const PlanNode& plan) {
  PlanNode node = plan;
  std::vector<Perm> perms;
  for (PlanNode& c : node.children) {
    Canon cc = canon(c);
    c = std::move(cc.node);
    perms.push_back(std::move(cc.perm));
  }
  Perm input;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    const std::size_t offset = input.size();
    for (std::size_t v : perms[i]) input.push_back(offset + v);
    if (node.kind != PlanKind::Join) break;  // only joins concatenate inputs
  }
  if (node.kind == PlanKind::Union) input.clear();  // union refers to no inputs

  for (Expr& e : node.exprs) e = remap(e, input, 0);
  for (Expr& e : node.keys) e = remap(e, input, 0);
  canon_exprs(node);

  switch (node.kind) {
    case PlanKind::Filter:
    case PlanKind::Sort:
    case PlanKind::Limit:
    case PlanKind::Distinct: return {std::move(node), std::move(input)};
    case PlanKind::Window:
    case PlanKind::LateralView: {
      Perm out = input;
      for (std::size_t i = input.size(); i < node.arity; ++i) out.push_back(i);
      return {std::move(node), std::move(out)};
    }
    case PlanKind::Aggregate: {
      // grouping keys and aggregates are sets: order each by render
      const std::size_t nk = node.keys.size();
      std::vector<std::size_t> korder = identity(nk);
      std::vector<std::size_t> aorder = identity(node.exprs.size());
      std::stable_sort(korder.begin(), korder.end(), [&](std::size_t a, std::size_t b) {
        return render(node.keys[a]) < render(node.keys[b]);
      });
      std::stable_sort(aorder.begin(), aorder.end(), [&](std::size_t a, std::size_t b) {
        return render(node.exprs[a]) < render(node.exprs[b]);
      });
      Perm out(node.arity);
      std::vector<Expr> keys;
      std::vector<Expr> aggs;
      for (std::size_t i = 0; i < korder.size(); ++i) {
        out[korder[i]] = i;
        keys.push_back(node.keys[korder[i]]);
      }
      for (std::size_t i = 0; i < aorder.size(); ++i) {
        out[nk + aorder[i]] = nk + i;
        aggs.push_back(node.exprs[aorder[i]]);
      }
      node.keys = std::move(keys);
      node.exprs = std::move(aggs);
      return {std::move(node), std::move(out)};
    }
    case PlanKind::Join: {
      const std::size_t la = node.children[0].arity;
      const bool commutative = node.detail == "INNER" || node.detail == "CROSS";
      if (node.detail == "LEFT SEMI") input.resize(la);
      if (!commutative) return {std::move(node), std::move(input)};
      const std::size_t ra = node.children[1].arity;
      PlanNode swapped = node;
      std::swap(swapped.children[0], swapped.children[1]);
      Perm swap_perm(la + ra);
      for (std::size_t i = 0; i < la; ++i) swap_perm[i] = ra + i;
      for (std::size_t j = 0; j < ra; ++j) swap_perm[la + j] = j;
      for (Expr& e : swapped.exprs) e = remap(e, swap_perm, 0);
      canon_exprs(swapped);
      const std::string l = line(node.children[0]);
      const std::string r = line(node.children[1]);
      const bool take_swapped = r < l || (r == l && line(swapped) < line(node));
      if (!take_swapped) return {std::move(node), std::move(input)};
      Perm out(input.size());
      for (std::size_t i = 0; i < input.size(); ++i) out[i] = swap_perm[input[i]];
      return {std::move(swapped), std::move(out)};
    }
    default: return {std::move(node), identity(node.arity)};
  }
}

// --------------------------------------------------------- plan-level rules

bool identity_project(const PlanNode& p) {
  if (p.kind != PlanKind::Project || p.children.size() != 1) return false;
  if (p.exprs.size() != p.children[0].arity) return false;
  for (std::size_t i = 0; i < p.exprs.size(); ++i) {
    const Expr& e = p.exprs[i];
    if (e.kind != ExprKind::column || e.level != 0 || e.ordinal != i) return false;
  }
  return true;
}

/// A projection whose outputs are plain references to its own input row.
bool column_selection(const PlanNode& p) {
  if (p.kind != PlanKind::Project || p.children.size() != 1) return false;
  return std::all_of(p.exprs.begin(), p.exprs.end(),
                     [](const Expr& e) { return e.kind == ExprKind::column && e.level == 0; });
}

/// Remaps the node's own expressions (not its children) through `perm`.
PlanNode remap_plan_exprs(const PlanNode& p, const Perm& perm) {
  PlanNode out = p;
  for (Expr& e : out.exprs) e = remap(e, perm, 0);
  for (Expr& e : out.keys) e = remap(e, perm, 0);
  return out;
}

PlanNode apply_plan_rule(const PlanNode& plan, Rule rule, bool is_root);

PlanNode rule_on_subplans(const PlanNode& plan, Rule rule) {
  auto expr_id = [](Expr e) { return e; };
  auto sub = [&](const PlanNode& p) { return apply_plan_rule(p, rule, true); };
  PlanNode out = plan;
  map_node_exprs(out, expr_id, sub);
  return out;
}

PlanNode apply_plan_rule(const PlanNode& plan, Rule rule, bool is_root) {
  PlanNode node = rule_on_subplans(plan, rule);
  for (PlanNode& c : node.children) c = apply_plan_rule(c, rule, false);
  switch (rule) {
    case Rule::inline_passthrough:
      if (!is_root && identity_project(node)) return std::move(node.children[0]);
      if (node.kind == PlanKind::Aggregate && column_selection(node.children[0])) {
        // The aggregate reads through a pure column selection: point its
        // references at the selection's input instead.
        Perm perm;
        for (const Expr& e : node.children[0].exprs) perm.push_back(e.ordinal);
        PlanNode out = remap_plan_exprs(node, perm);
        out.children[0] = std::move(node.children[0].children[0]);
        return out;
      }
      if (node.kind == PlanKind::Filter && column_selection(node.children[0])) {
        // Filter below the selection so adjacent projections can collapse.
        PlanNode selection = std::move(node.children[0]);
        Perm perm;
        for (const Expr& e : selection.exprs) perm.push_back(e.ordinal);
        PlanNode filter = remap_plan_exprs(node, perm);
        filter.arity = selection.children[0].arity;
        filter.children[0] = std::move(selection.children[0]);
        selection.children[0] = std::move(filter);
        return selection;
      }
      return node;
    case Rule::merge_filters:
      if (node.kind == PlanKind::Filter && node.children[0].kind == PlanKind::Filter) {
        PlanNode inner = std::move(node.children[0]);
        inner.exprs[0] = Expr::op("AND", {std::move(inner.exprs[0]), std::move(node.exprs[0])});
        return inner;
      }
      return node;
    case Rule::collapse_projects:
      if (node.kind == PlanKind::Project && node.children[0].kind == PlanKind::Project) {
        const PlanNode& inner = node.children[0];
        const auto subq = [](const std::vector<Expr>& v) {
          return std::any_of(v.begin(), v.end(), contains_subquery);
        };
        if (subq(node.exprs) || subq(inner.exprs)) return node;
        PlanNode out = inner;
        out.exprs.clear();
        for (const Expr& e : node.exprs) out.exprs.push_back(substitute(e, inner.exprs, 0));
        out.arity = node.arity;
        return out;
      }
      return node;
    case Rule::fold_constants:
      if (node.kind == PlanKind::Filter && is_literal(node.exprs[0], "TRUE")) {
        return std::move(node.children[0]);
      }
      return node;
    default: return node;
  }
}

PlanNode apply(const PlanNode& plan, Rule rule) {
  switch (rule) {
    case Rule::flatten_and_sort: return rewrite_exprs(plan, flatten_sort);
    case Rule::fold_constants:
      return apply_plan_rule(rewrite_exprs(plan, [](Expr e) { return fold(flatten_sort(std::move(e))); }),
                             rule, true);
    case Rule::push_not: return rewrite_exprs(plan, push_not);
    case Rule::commutative_order: return canon(plan).node;
    default: return apply_plan_rule(plan, rule, true);
  }
}

}  // namespace

PlanNode apply_rule(const PlanNode& plan, Rule rule) { return apply(plan, rule); }

PlanNode normalize(const PlanNode& plan) {
  static constexpr Rule kOrder[] = {Rule::inline_passthrough, Rule::merge_filters,
                                    Rule::collapse_projects,  Rule::push_not,
                                    Rule::fold_constants,     Rule::flatten_and_sort,
                                    Rule::commutative_order};
  PlanNode current = plan;
  for (int i = 0; i < kMaxIterations; ++i) {
    PlanNode next = current;
    for (Rule r : kOrder) next = apply(next, r);
    if (next == current) return next;
    current = std::move(next);
  }
  return current;
}

CanonicalPlan normalize(const ScriptPlan& plan) {
  CanonicalPlan out;
  for (const PlanNode& s : plan.statements) out.plan.statements.push_back(normalize(s));
  out.text = serialize(out.plan);
  out.digest = sha256_hex(out.text);
  return out;
}

}  // namespace sqldebug
