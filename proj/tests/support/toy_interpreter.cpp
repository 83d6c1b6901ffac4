#include "toy_interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>

namespace toy {

using sqldebug::Expr;
using sqldebug::ExprKind;
using sqldebug::PlanKind;
using sqldebug::PlanNode;

std::string Value::render() const {
  switch (type) {
    case Type::null: return "NULL";
    case Type::integer: return std::to_string(i);
    case Type::text: return "'" + s + "'";
    case Type::boolean: return b ? "TRUE" : "FALSE";
  }
  return "?";
}

namespace {

using Env = std::vector<const Row*>;  // outermost first; back() is the current row

[[noreturn]] void unsupported(const std::string& what) { throw std::runtime_error("toy interpreter: " + what); }

std::string row_key(const Row& row) {
  std::string key;
  for (const Value& v : row) key += v.render() + "\x1f";
  return key;
}

Rows distinct_rows(const Rows& rows) {
  Rows out;
  std::set<std::string> seen;
  for (const Row& r : rows) {
    if (seen.insert(row_key(r)).second) out.push_back(r);
  }
  return out;
}

/// Three-way comparison of two non-null values of the same type.
int compare(const Value& a, const Value& b) {
  if (a.type != b.type) unsupported("comparison of " + a.render() + " and " + b.render());
  switch (a.type) {
    case Value::Type::integer: return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
    case Value::Type::text: return a.s < b.s ? -1 : (a.s > b.s ? 1 : 0);
    case Value::Type::boolean: return static_cast<int>(a.b) - static_cast<int>(b.b);
    case Value::Type::null: break;
  }
  return 0;
}

bool like(const std::string& text, const std::string& pattern, std::size_t ti = 0, std::size_t pi = 0) {
  if (pi == pattern.size()) return ti == text.size();
  if (pattern[pi] == '%') {
    for (std::size_t k = ti; k <= text.size(); ++k) {
      if (like(text, pattern, k, pi + 1)) return true;
    }
    return false;
  }
  if (ti == text.size()) return false;
  if (pattern[pi] != '_' && pattern[pi] != text[ti]) return false;
  return like(text, pattern, ti + 1, pi + 1);
}

Value literal(const std::string& text) {
  if (text == "NULL") return Value::null();
  if (text == "TRUE") return Value::boolean(true);
  if (text == "FALSE") return Value::boolean(false);
  if (text.size() >= 2 && text.front() == '\'' && text.back() == '\'') {
    std::string s;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      s += text[i];
      if (text[i] == '\'' && i + 2 < text.size() && text[i + 1] == '\'') ++i;
    }
    return Value::text(s);
  }
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return Value::integer(v);
  } catch (const std::exception&) {
  }
  unsupported("literal " + text);
}

Value tri(std::optional<bool> v) { return v ? Value::boolean(*v) : Value::null(); }

std::optional<bool> truth(const Value& v) {
  if (v.is_null()) return std::nullopt;
  if (v.type != Value::Type::boolean) unsupported("non-boolean predicate " + v.render());
  return v.b;
}

class Evaluator {
 public:
  explicit Evaluator(const Database& db) : db_(db) {}

  Rows plan(const PlanNode& p, const Env& outer) {
    switch (p.kind) {
      case PlanKind::Scan: {
        const auto it = db_.find(p.detail);
        if (it == db_.end()) unsupported("no data for table " + p.detail);
        return it->second;
      }
      case PlanKind::Values: {
        Row row;
        for (const Expr& e : p.exprs) row.push_back(expr(e, outer, Row{}));
        return {row};
      }
      case PlanKind::Project: {
        Rows out;
        for (const Row& r : plan(p.children.at(0), outer)) {
          Row o;
          for (const Expr& e : p.exprs) o.push_back(expr(e, outer, r));
          out.push_back(std::move(o));
        }
        return out;
      }
      case PlanKind::Filter: {
        Rows out;
        for (const Row& r : plan(p.children.at(0), outer)) {
          if (truth(expr(p.exprs.at(0), outer, r)).value_or(false)) out.push_back(r);
        }
        return out;
      }
      case PlanKind::Join: return join(p, outer);
      case PlanKind::Aggregate: return aggregate(p, outer);
      case PlanKind::Sort: return plan(p.children.at(0), outer);  // bags are unordered
      case PlanKind::Distinct: return distinct_rows(plan(p.children.at(0), outer));
      case PlanKind::Union: {
        Rows out;
        for (const PlanNode& c : p.children) {
          Rows part = plan(c, outer);
          out.insert(out.end(), part.begin(), part.end());
        }
        return p.detail == "ALL" ? out : distinct_rows(out);
      }
      case PlanKind::Insert: return plan(p.children.at(0), outer);
      default: unsupported("plan node " + std::string(sqldebug::to_string(p.kind)));
    }
  }

 private:
  Rows join(const PlanNode& p, const Env& outer) {
    const Rows left = plan(p.children.at(0), outer);
    const Rows right = plan(p.children.at(1), outer);
    const std::size_t left_arity = p.children[0].arity;
    const std::size_t right_arity = p.children[1].arity;
    const std::string& kind = p.detail;
    auto matches = [&](const Row& row) {
      return p.exprs.empty() || truth(expr(p.exprs[0], outer, row)).value_or(false);
    };
    Rows out;
    std::vector<bool> right_used(right.size(), false);
    for (const Row& l : left) {
      bool any = false;
      for (std::size_t j = 0; j < right.size(); ++j) {
        Row combined = l;
        combined.insert(combined.end(), right[j].begin(), right[j].end());
        if (!matches(combined)) continue;
        any = true;
        right_used[j] = true;
        if (kind == "LEFT SEMI") break;
        out.push_back(std::move(combined));
      }
      if (kind == "LEFT SEMI" && any) out.push_back(l);
      if (!any && (kind == "LEFT" || kind == "FULL")) {
        Row padded = l;
        padded.resize(left_arity + right_arity);
        out.push_back(std::move(padded));
      }
    }
    if (kind == "RIGHT" || kind == "FULL") {
      for (std::size_t j = 0; j < right.size(); ++j) {
        if (right_used[j]) continue;
        Row padded(left_arity);
        padded.insert(padded.end(), right[j].begin(), right[j].end());
        out.push_back(std::move(padded));
      }
    }
    return out;
  }

  Rows aggregate(const PlanNode& p, const Env& outer) {
    const Rows input = plan(p.children.at(0), outer);
    std::vector<std::string> order;
    std::map<std::string, std::pair<Row, Rows>> groups;
    for (const Row& r : input) {
      Row key;
      for (const Expr& k : p.keys) key.push_back(expr(k, outer, r));
      const std::string id = row_key(key);
      auto [it, fresh] = groups.try_emplace(id, key, Rows{});
      if (fresh) order.push_back(id);
      it->second.second.push_back(r);
    }
    if (p.keys.empty() && groups.empty()) {
      groups.try_emplace("", Row{}, Rows{});
      order.push_back("");
    }
    Rows out;
    for (const std::string& id : order) {
      const auto& [key, rows] = groups.at(id);
      Row o = key;
      for (const Expr& a : p.exprs) o.push_back(aggregate_call(a, rows, outer));
      out.push_back(std::move(o));
    }
    return out;
  }

  Value aggregate_call(const Expr& call, const Rows& rows, const Env& outer) {
    if (call.kind != ExprKind::call) unsupported("aggregate expression " + sqldebug::render(call));
    const bool star = call.args.size() == 1 && call.args[0].kind == ExprKind::literal && call.args[0].name == "*";
    std::vector<Value> values;
    for (const Row& r : rows) {
      if (star) {
        values.push_back(Value::integer(1));
        continue;
      }
      Value v = expr(call.args.at(0), outer, r);
      if (!v.is_null()) values.push_back(std::move(v));
    }
    if (call.detail == "DISTINCT") {
      Rows as_rows;
      for (const Value& v : values) as_rows.push_back({v});
      values.clear();
      for (const Row& r : distinct_rows(as_rows)) values.push_back(r[0]);
    }
    if (call.name == "count") return Value::integer(static_cast<std::int64_t>(values.size()));
    if (values.empty()) return Value::null();
    if (call.name == "sum") {
      std::int64_t total = 0;
      for (const Value& v : values) total += v.i;
      return Value::integer(total);
    }
    if (call.name == "min" || call.name == "max") {
      Value best = values[0];
      for (const Value& v : values) {
        const int c = compare(v, best);
        if ((call.name == "min" && c < 0) || (call.name == "max" && c > 0)) best = v;
      }
      return best;
    }
    unsupported("aggregate " + call.name);
  }

  Value column(const Expr& e, const Env& outer, const Row& row) {
    const Row* source = &row;
    if (e.level > 0) {
      if (e.level > outer.size()) unsupported("column level out of range");
      source = outer[outer.size() - e.level];
    }
    if (e.ordinal >= source->size()) unsupported("column ordinal out of range");
    return (*source)[e.ordinal];
  }

  Value expr(const Expr& e, const Env& outer, const Row& row) {
    switch (e.kind) {
      case ExprKind::literal: return literal(e.name);
      case ExprKind::column: return column(e, outer, row);
      case ExprKind::op: return op(e, outer, row);
      case ExprKind::call: return call(e, outer, row);
      case ExprKind::case_: return case_expr(e, outer, row);
      case ExprKind::cast: return cast(e, outer, row);
      case ExprKind::subquery: return subquery(e, outer, row);
      default: unsupported("expression " + std::string(sqldebug::to_string(e.kind)));
    }
  }

  Value op(const Expr& e, const Env& outer, const Row& row) {
    const std::string& name = e.name;
    auto arg = [&](std::size_t i) { return expr(e.args.at(i), outer, row); };
    if (name == "AND" || name == "OR") {
      const bool is_and = name == "AND";
      bool unknown = false;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        const auto t = truth(arg(i));
        if (!t) {
          unknown = true;
        } else if (*t != is_and) {
          return Value::boolean(!is_and);
        }
      }
      return unknown ? Value::null() : Value::boolean(is_and);
    }
    if (name == "NOT") {
      const auto t = truth(arg(0));
      return tri(t ? std::optional<bool>(!*t) : std::nullopt);
    }
    if (name == "IS NULL") return Value::boolean(arg(0).is_null());
    if (name == "IS NOT NULL") return Value::boolean(!arg(0).is_null());
    if (name == "-" && e.args.size() == 1) {
      const Value v = arg(0);
      return v.is_null() ? v : Value::integer(-v.i);
    }
    if (name == "IN" || name == "NOT IN") {
      const Value lhs = arg(0);
      std::vector<Value> list;
      for (std::size_t i = 1; i < e.args.size(); ++i) list.push_back(arg(i));
      return in_list(lhs, list, name == "NOT IN");
    }
    if (name == "BETWEEN" || name == "NOT BETWEEN") {
      const Value v = arg(0), lo = arg(1), hi = arg(2);
      if (v.is_null() || lo.is_null() || hi.is_null()) return Value::null();
      const bool inside = compare(v, lo) >= 0 && compare(v, hi) <= 0;
      return Value::boolean(name == "BETWEEN" ? inside : !inside);
    }
    if (name == "LIKE" || name == "NOT LIKE") {
      const Value v = arg(0), pattern = arg(1);
      if (v.is_null() || pattern.is_null()) return Value::null();
      const bool m = like(v.s, pattern.s);
      return Value::boolean(name == "LIKE" ? m : !m);
    }
    if (e.args.size() != 2) unsupported("operator " + name);
    const Value a = arg(0), b = arg(1);
    if (a.is_null() || b.is_null()) return Value::null();
    if (name == "=") return Value::boolean(compare(a, b) == 0);
    if (name == "<>") return Value::boolean(compare(a, b) != 0);
    if (name == "<") return Value::boolean(compare(a, b) < 0);
    if (name == "<=") return Value::boolean(compare(a, b) <= 0);
    if (name == ">") return Value::boolean(compare(a, b) > 0);
    if (name == ">=") return Value::boolean(compare(a, b) >= 0);
    if (a.type != Value::Type::integer || b.type != Value::Type::integer) unsupported("arithmetic on " + name);
    if (name == "+") return Value::integer(a.i + b.i);
    if (name == "-") return Value::integer(a.i - b.i);
    if (name == "*") return Value::integer(a.i * b.i);
    unsupported("operator " + name);
  }

  static Value in_list(const Value& lhs, const std::vector<Value>& list, bool negated) {
    if (lhs.is_null()) return Value::null();
    bool unknown = false;
    for (const Value& v : list) {
      if (v.is_null()) {
        unknown = true;
      } else if (compare(lhs, v) == 0) {
        return Value::boolean(!negated);
      }
    }
    return unknown ? Value::null() : Value::boolean(negated);
  }

  Value call(const Expr& e, const Env& outer, const Row& row) {
    std::vector<Value> args;
    for (const Expr& a : e.args) args.push_back(expr(a, outer, row));
    if (e.name == "coalesce" || e.name == "nvl") {
      for (const Value& v : args) {
        if (!v.is_null()) return v;
      }
      return Value::null();
    }
    if (e.name == "upper" || e.name == "lower") {
      if (args.at(0).is_null()) return Value::null();
      std::string s = args[0].s;
      for (char& c : s) c = static_cast<char>(e.name == "upper" ? std::toupper(c) : std::tolower(c));
      return Value::text(s);
    }
    if (e.name == "concat") {
      std::string s;
      for (const Value& v : args) {
        if (v.is_null()) return Value::null();
        s += v.type == Value::Type::text ? v.s : v.render();
      }
      return Value::text(s);
    }
    if (e.name == "abs") return args.at(0).is_null() ? args[0] : Value::integer(std::abs(args[0].i));
    if (e.name == "if") {
      return truth(args.at(0)).value_or(false) ? args.at(1) : args.at(2);
    }
    unsupported("function " + e.name);
  }

  Value case_expr(const Expr& e, const Env& outer, const Row& row) {
    const bool simple = e.name == "CASE SIMPLE";
    const bool has_else = e.detail == "ELSE";
    std::size_t i = 0;
    Value operand;
    if (simple) operand = expr(e.args.at(i++), outer, row);
    const std::size_t end = e.args.size() - (has_else ? 1 : 0);
    for (; i + 1 < end; i += 2) {
      const Value when = expr(e.args[i], outer, row);
      const bool hit = simple ? (!operand.is_null() && !when.is_null() && compare(operand, when) == 0)
                              : truth(when).value_or(false);
      if (hit) return expr(e.args[i + 1], outer, row);
    }
    return has_else ? expr(e.args.back(), outer, row) : Value::null();
  }

  Value cast(const Expr& e, const Env& outer, const Row& row) {
    const Value v = expr(e.args.at(0), outer, row);
    if (v.is_null()) return v;
    if (e.name == "string") return v.type == Value::Type::text ? v : Value::text(v.render());
    if (e.name == "int" || e.name == "bigint") {
      if (v.type == Value::Type::integer) return v;
      try {
        return Value::integer(std::stoll(v.s));
      } catch (const std::exception&) {
        return Value::null();
      }
    }
    unsupported("cast to " + e.name);
  }

  Value subquery(const Expr& e, const Env& outer, const Row& row) {
    Env inner = outer;
    inner.push_back(&row);
    const Rows rows = plan(e.subplans.at(0), inner);
    if (e.name == "EXISTS") return Value::boolean(!rows.empty());
    if (e.name == "NOT EXISTS") return Value::boolean(rows.empty());
    if (e.name == "SCALAR") {
      if (rows.size() > 1) unsupported("scalar subquery returned several rows");
      return rows.empty() ? Value::null() : rows[0].at(0);
    }
    if (e.name == "IN" || e.name == "NOT IN") {
      std::vector<Value> list;
      for (const Row& r : rows) list.push_back(r.at(0));
      return in_list(expr(e.args.at(0), outer, row), list, e.name == "NOT IN");
    }
    unsupported("subquery " + e.name);
  }

  const Database& db_;
};

}  // namespace

Rows evaluate(const PlanNode& plan, const Database& db) { return Evaluator(db).plan(plan, {}); }

std::vector<std::string> bag(const Rows& rows) {
  std::vector<std::string> out;
  for (const Row& r : rows) out.push_back(row_key(r));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace toy
