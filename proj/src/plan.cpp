#include "sqldebug/plan.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace sqldebug {

std::string_view to_string(ExprKind kind) {
  switch (kind) {
    case ExprKind::literal: return "literal";
    case ExprKind::column: return "column";
    case ExprKind::call: return "call";
    case ExprKind::op: return "op";
    case ExprKind::case_: return "case";
    case ExprKind::cast: return "cast";
    case ExprKind::subquery: return "subquery";
    case ExprKind::window: return "window";
    case ExprKind::sort_key: return "sort_key";
  }
  return "?";
}

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::Scan: return "Scan";
    case PlanKind::Values: return "Values";
    case PlanKind::Project: return "Project";
    case PlanKind::Filter: return "Filter";
    case PlanKind::Join: return "Join";
    case PlanKind::Aggregate: return "Aggregate";
    case PlanKind::Window: return "Window";
    case PlanKind::Sort: return "Sort";
    case PlanKind::Limit: return "Limit";
    case PlanKind::Union: return "Union";
    case PlanKind::Distinct: return "Distinct";
    case PlanKind::LateralView: return "LateralView";
    case PlanKind::Insert: return "Insert";
    case PlanKind::CreateTable: return "CreateTable";
  }
  return "?";
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::flatten_and_sort: return "R2 flatten_and_sort";
    case Rule::fold_constants: return "R3 fold_constants";
    case Rule::commutative_order: return "R4 commutative_order";
    case Rule::inline_passthrough: return "R5 inline_passthrough";
    case Rule::push_not: return "R6 push_not";
    case Rule::merge_filters: return "R7 merge_filters";
    case Rule::collapse_projects: return "R8 collapse_projects";
  }
  return "?";
}

Expr Expr::literal(std::string text) {
  Expr e;
  e.kind = ExprKind::literal;
  e.name = std::move(text);
  return e;
}

Expr Expr::column(std::size_t ordinal, std::size_t level) {
  Expr e;
  e.kind = ExprKind::column;
  e.ordinal = ordinal;
  e.level = level;
  return e;
}

Expr Expr::op(std::string name, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::op;
  e.name = std::move(name);
  e.args = std::move(args);
  return e;
}

Expr Expr::call(std::string name, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::call;
  e.name = std::move(name);
  e.args = std::move(args);
  return e;
}

bool Expr::operator==(const Expr& o) const {
  return kind == o.kind && name == o.name && detail == o.detail && ordinal == o.ordinal &&
         level == o.level && args == o.args && partition == o.partition && order == o.order &&
         subplans == o.subplans;
}

bool PlanNode::operator==(const PlanNode& o) const {
  return kind == o.kind && detail == o.detail && arity == o.arity && exprs == o.exprs &&
         keys == o.keys && children == o.children;
}

namespace {

std::string join(const std::vector<Expr>& exprs, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    if (i > 0) out += sep;
    out += render(exprs[i]);
  }
  return out;
}

bool infix(const std::string& op) {
  static constexpr std::array<std::string_view, 20> kInfix = {
      "AND", "OR", "=", "<>", "<", ">", "<=", ">=", "<=>", "+", "-", "*", "/", "%", "DIV",
      "||",  "LIKE", "NOT LIKE", "RLIKE", "NOT RLIKE"};
  for (auto k : kInfix) {
    if (k == op) return true;
  }
  return false;
}

std::string render_line(const PlanNode& node);

std::string node_head(const PlanNode& node) {
  std::string out(to_string(node.kind));
  if (!node.detail.empty()) out += " " + node.detail;
  if (!node.keys.empty()) out += " keys[" + join(node.keys) + "]";
  if (!node.exprs.empty()) out += " [" + join(node.exprs) + "]";
  out += " /" + std::to_string(node.arity);
  return out;
}

std::string render_line(const PlanNode& node) {
  std::string out = node_head(node);
  if (!node.children.empty()) {
    out += " (";
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i > 0) out += ", ";
      out += render_line(node.children[i]);
    }
    out += ")";
  }
  return out;
}

void serialize_into(const PlanNode& node, int depth, std::string& out) {
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ') + node_head(node) + "\n";
  for (const PlanNode& c : node.children) serialize_into(c, depth + 1, out);
}

}  // namespace

std::string render(const Expr& e) {
  switch (e.kind) {
    case ExprKind::literal: return e.name;
    case ExprKind::column:
      return (e.level == 0 ? "" : "^" + std::to_string(e.level)) + "#" + std::to_string(e.ordinal);
    case ExprKind::call:
      return e.name + "(" + (e.detail.empty() ? "" : e.detail + " ") + join(e.args) + ")";
    case ExprKind::op:
      if (e.args.size() >= 2 && infix(e.name)) {
        return "(" + join(e.args, (" " + e.name + " ").c_str()) + ")";
      }
      return e.name + "(" + join(e.args) + ")";
    case ExprKind::case_:
      return e.name + (e.detail.empty() ? "" : " " + e.detail) + "(" + join(e.args) + ")";
    case ExprKind::cast: return "CAST(" + join(e.args) + " AS " + e.name + ")";
    case ExprKind::subquery: {
      std::string out = e.name + "(";
      if (!e.args.empty()) out += join(e.args) + ", ";
      for (const PlanNode& p : e.subplans) out += "{" + render_line(p) + "}";
      return out + ")";
    }
    case ExprKind::window: {
      std::string out = e.name + "(" + join(e.args) + ") OVER(";
      if (!e.partition.empty()) out += "PARTITION BY " + join(e.partition);
      if (!e.order.empty()) out += std::string(e.partition.empty() ? "" : " ") + "ORDER BY " + join(e.order);
      if (!e.detail.empty()) out += " " + e.detail;
      return out + ")";
    }
    case ExprKind::sort_key:
      return render(e.args.at(0)) + (e.name.empty() ? "" : " " + e.name);
  }
  return "?";
}

std::string serialize(const PlanNode& plan) {
  std::string out;
  serialize_into(plan, 0, out);
  return out;
}

std::string serialize(const ScriptPlan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.statements.size(); ++i) {
    out += "statement " + std::to_string(i + 1) + "\n";
    serialize_into(plan.statements[i], 1, out);
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string canonical_digest(const CanonicalPlan& plan) { return sha256_hex(plan.text); }

bool plans_isomorphic(const CanonicalPlan& a, const CanonicalPlan& b) {
  return a.digest == b.digest && a.plan == b.plan;
}

}  // namespace sqldebug
