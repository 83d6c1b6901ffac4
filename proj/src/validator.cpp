#include "sqldebug/validator.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "sql_functions.hpp"
#include "sqldebug/parser.hpp"

namespace sqldebug {

std::string_view to_string(Severity severity) {
  return severity == Severity::error ? "error" : "warning";
}

namespace {

using detail::is_aggregate_function;
using detail::is_table_function;

struct RelColumn {
  std::string name;
  std::optional<ColumnType> type;
  std::string type_text;
  bool partition = false;
};

/// Output columns of a query. `opaque` means the shape is not fully known
/// (it reads from a table that failed to resolve), so arity checks skip it.
struct Shape {
  std::vector<RelColumn> columns;
  bool opaque = false;
};

struct Relation {
  std::string alias;
  std::string table;
  Shape shape;
};

struct Scope {
  std::vector<Relation> relations;
  std::vector<std::string> output_names;  // visible to ORDER BY / GROUP BY
};

enum class Clause { select, where, having, on, group, order, other };

struct ExprCtx {
  Clause clause = Clause::other;
  bool in_aggregate = false;
  bool udtf_ok = false;
};

struct ExprInfo {
  std::optional<ColumnType> type;
  bool partition = false;
  bool literal = false;
  bool null_literal = false;
  bool numeric_string = false;
};

struct Resolved {
  enum State { found, missing, ambiguous } state = missing;
  RelColumn column;
  std::size_t scope_depth = 0;
  std::string key;  // identity of the bound column within its scope
  std::string message;
};

bool is_comparison(std::string_view op) {
  return op == "=" || op == "<>" || op == "!=" || op == "<" || op == ">" || op == "<=" ||
         op == ">=" || op == "<=>";
}

std::vector<std::string> split_dotted(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = name.find('.', start);
    parts.push_back(name.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return parts;
}

/// Top-level generic arguments of a type spelling: `map<string,int>` ->
/// {"string", "int"}.
std::vector<std::string> type_arguments(const std::string& text) {
  std::vector<std::string> out;
  const auto open = text.find('<');
  if (open == std::string::npos || text.back() != '>') return out;
  int depth = 0;
  std::string cur;
  for (std::size_t i = open + 1; i + 1 < text.size(); ++i) {
    const char c = text[i];
    if (c == '<') ++depth;
    if (c == '>') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

RelColumn column_of_type(std::string name, const std::string& type_text) {
  RelColumn c;
  c.name = std::move(name);
  c.type_text = type_text;
  try {
    c.type = parse_column_type(type_text);
  } catch (const Error&) {
    // struct field names and the like: leave untyped
  }
  return c;
}

/// Structural signature of an expression subtree, used to match projection
/// expressions against GROUP BY keys.
std::string signature(const SyntaxTree& tree, NodeId id) {
  std::string out = std::string(to_string(tree[id].kind)) + "[" + tree[id].label + "](";
  for (NodeId c : tree[id].children) out += signature(tree, c) + ",";
  return out + ")";
}

std::vector<NodeId> call_arguments(const SyntaxTree& tree, NodeId call) {
  std::vector<NodeId> args;
  for (NodeId c : tree[call].children) {
    const NodeKind k = tree[c].kind;
    if (k != NodeKind::Over && k != NodeKind::Distinct) args.push_back(c);
  }
  return args;
}

class Checker {
 public:
  Checker(const SyntaxTree& tree, const Catalog& catalog) : t_(tree), catalog_(catalog) {}

  std::vector<Diagnostic> run() {
    if (t_.empty()) return {};
    for (NodeId stmt : t_[t_.root()].children) {
      switch (t_[stmt].kind) {
        case NodeKind::Query: check_query(stmt); break;
        case NodeKind::Insert: check_insert(stmt); break;
        case NodeKind::CreateTable: check_create(stmt); break;
        case NodeKind::Raw: check_raw(stmt); break;
        default: break;
      }
    }
    std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return a.span.begin < b.span.begin;
    });
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

 private:
  // ------------------------------------------------------------ reporting
  void report(NodeId at, TaxonomyPath path, std::string message, Severity severity) {
    out_.push_back({std::move(path), std::move(message), t_[at].span, severity});
  }
  void error(NodeId at, TaxonomyPath path, std::string message) {
    report(at, std::move(path), std::move(message), Severity::error);
  }
  void warn(NodeId at, TaxonomyPath path, std::string message) {
    report(at, std::move(path), std::move(message), Severity::warning);
  }

  // ------------------------------------------------------------ statements
  void check_raw(NodeId raw) {
    const Node& n = t_[raw];
    ParseError err;
    err.message = "unparsable statement";
    err.span = {0, n.label.size()};
    try {
      parse_script(SqlScript(n.label));
    } catch (const ParseFailure& failure) {
      err = failure.error();
    }
    const Span span{n.span.begin + err.span.begin, n.span.begin + err.span.end};
    // the taxonomy already names the fault; keep only the detail
    std::string message = err.message;
    if (auto pos = message.find(": expected "); pos != std::string::npos) {
      message = message.substr(pos + 2);
    } else if (auto at = message.find(" at "); at != std::string::npos) {
      message = "unexpected input" + message.substr(at);
    }
    out_.push_back({fault_taxonomy(err.fault), message, span, Severity::error});
  }

  void check_create(NodeId create) {
    const Node& n = t_[create];
    const bool if_not_exists = t_.find_child(create, NodeKind::Flag) >= 0;
    const std::string key = to_lower(n.label);
    if (!if_not_exists && (catalog_.find(key) != nullptr || local_tables_.count(key) != 0)) {
      error(create, tax::table_creation_error(), "table '" + n.label + "' already exists");
    }
    Shape shape;
    std::set<std::string> names;
    auto add_def = [&](NodeId def, bool partition) {
      const Node& d = t_[def];
      const Node* type = t_.child(def, 0);
      RelColumn c;
      c.name = d.label;
      c.partition = partition;
      if (type != nullptr) {
        c.type_text = type->label;
        try {
          c.type = parse_column_type(type->label);
        } catch (const Error&) {
          error(def, tax::table_creation_error(), "unknown column type '" + type->label + "'");
        }
      }
      if (!names.insert(to_lower(d.label)).second) {
        error(def, tax::duplicate_name(), "duplicate column '" + d.label + "' in table '" + n.label + "'");
      }
      shape.columns.push_back(std::move(c));
    };
    for (NodeId k : n.children) {
      if (t_[k].kind == NodeKind::ColumnDef) add_def(k, false);
      if (t_[k].kind == NodeKind::PartitionedBy) {
        for (NodeId p : t_[k].children) add_def(p, true);
      }
      if (t_[k].kind == NodeKind::Query) {
        Shape q = check_query(k);
        check_unique_outputs(k, q, "table '" + n.label + "'");
        for (RelColumn& c : q.columns) shape.columns.push_back(std::move(c));
        shape.opaque = q.opaque;
      }
    }
    local_tables_[key] = std::move(shape);
  }

  void check_insert(NodeId insert) {
    const Node& n = t_[insert];
    ctes_.emplace_back();
    std::optional<Shape> target;
    NodeId target_ref = 0;
    std::vector<NodeId> dynamic_parts;
    std::optional<NodeId> column_list;
    std::optional<NodeId> body;
    for (NodeId k : n.children) {
      switch (t_[k].kind) {
        case NodeKind::With: check_with(k); break;
        case NodeKind::TableRef:
          target_ref = k;
          target = lookup_table(t_[k].label);
          if (!target) error(k, tax::field_not_exist(), "table '" + t_[k].label + "' does not exist");
          break;
        case NodeKind::PartitionSpec:
          for (NodeId item : t_[k].children) {
            if (t_[item].children.empty()) dynamic_parts.push_back(item);
            if (!target || target->opaque) continue;
            const bool ok = std::any_of(
                target->columns.begin(), target->columns.end(), [&](const RelColumn& c) {
                  return c.partition && to_lower(c.name) == to_lower(t_[item].label);
                });
            if (!ok) {
              error(item, tax::field_not_exist(),
                    "partition column '" + t_[item].label + "' does not exist in '" +
                        t_[target_ref].label + "'");
            }
          }
          break;
        case NodeKind::ColumnList:
          column_list = k;
          break;
        default:
          body = k;
          break;
      }
    }
    if (!body) {
      ctes_.pop_back();
      return;
    }
    const Shape produced = check_body(*body);
    if (target && !target->opaque && !produced.opaque) {
      std::size_t expected = 0;
      if (column_list) {
        for (NodeId c : t_[*column_list].children) {
          const bool known =
              std::any_of(target->columns.begin(), target->columns.end(),
                          [&](const RelColumn& rc) { return to_lower(rc.name) == t_[c].label; });
          if (!known) {
            error(c, tax::field_not_exist(),
                  "column '" + t_[c].label + "' does not exist in '" + t_[target_ref].label + "'");
          }
        }
        expected = t_[*column_list].children.size() + dynamic_parts.size();
      } else if (t_.find_child(insert, NodeKind::PartitionSpec) >= 0) {
        expected = static_cast<std::size_t>(
                       std::count_if(target->columns.begin(), target->columns.end(),
                                     [](const RelColumn& c) { return !c.partition; })) +
                   dynamic_parts.size();
      } else {
        expected = target->columns.size();
      }
      if (produced.columns.size() != expected) {
        error(*body, tax::insert_column_count(),
              "INSERT into '" + t_[target_ref].label + "' expects " + std::to_string(expected) +
                  " columns but the query produces " + std::to_string(produced.columns.size()));
      }
    }
    ctes_.pop_back();
  }

  // --------------------------------------------------------------- queries
  Shape check_query(NodeId query) {
    ctes_.emplace_back();
    Shape shape;
    for (NodeId k : t_[query].children) {
      if (t_[k].kind == NodeKind::With) {
        check_with(k);
      } else {
        shape = check_body(k);
      }
    }
    ctes_.pop_back();
    return shape;
  }

  void check_with(NodeId with) {
    for (NodeId cte : t_[with].children) {
      const Node& c = t_[cte];
      Shape shape;
      std::optional<NodeId> columns;
      for (NodeId k : c.children) {
        if (t_[k].kind == NodeKind::ColumnList) columns = k;
        if (t_[k].kind == NodeKind::Query) shape = check_query(k);
      }
      if (columns) {
        const auto& names = t_[*columns].children;
        if (!shape.opaque && names.size() != shape.columns.size()) {
          error(*columns, tax::union_arity(),
                "CTE '" + c.label + "' lists " + std::to_string(names.size()) +
                    " columns but its query produces " + std::to_string(shape.columns.size()));
        }
        for (std::size_t i = 0; i < names.size() && i < shape.columns.size(); ++i) {
          shape.columns[i].name = t_[names[i]].label;
        }
      }
      check_unique_outputs(cte, shape, "CTE '" + c.label + "'");
      if (ctes_.back().count(c.label) != 0) {
        error(cte, tax::duplicate_name(), "duplicate CTE name '" + c.label + "'");
      }
      ctes_.back()[c.label] = std::move(shape);
    }
  }

  void check_unique_outputs(NodeId at, const Shape& shape, const std::string& what) {
    std::set<std::string> seen;
    for (const RelColumn& c : shape.columns) {
      if (!seen.insert(to_lower(c.name)).second) {
        error(at, tax::duplicate_name(), "duplicate column name '" + c.name + "' in " + what);
      }
    }
  }

  Shape check_body(NodeId body) {
    const Node& n = t_[body];
    if (n.kind == NodeKind::Query) return check_query(body);
    if (n.kind == NodeKind::SetOp) {
      Shape left = check_body(n.children[0]);
      Shape right = check_body(n.children[1]);
      if (!left.opaque && !right.opaque && left.columns.size() != right.columns.size()) {
        error(body, tax::union_arity(),
              n.label + " branches have " + std::to_string(left.columns.size()) + " and " +
                  std::to_string(right.columns.size()) + " columns");
      }
      left.opaque = left.opaque || right.opaque;
      return left;
    }
    return check_select(body);
  }

  Shape check_select(NodeId select) {
    Scope scope;
    std::optional<NodeId> proj, where, group, having, order;
    for (NodeId k : t_[select].children) {
      switch (t_[k].kind) {
        case NodeKind::From: build_from(k, scope); break;
        case NodeKind::ProjList: proj = k; break;
        case NodeKind::Where: where = k; break;
        case NodeKind::GroupBy: group = k; break;
        case NodeKind::Having: having = k; break;
        case NodeKind::OrderBy: order = k; break;
        default: break;
      }
    }
    scopes_.push_back(&scope);

    if (where) check_expr(t_[*where].children[0], {Clause::where});

    Shape shape;
    if (proj) {
      const auto& items = t_[*proj].children;
      for (std::size_t i = 0; i < items.size(); ++i) {
        const NodeId item = items[i];
        if (t_[item].kind == NodeKind::Star) {
          expand_star(item, scope, shape);
          continue;
        }
        const NodeId expr = t_[item].kind == NodeKind::Alias ? t_[item].children[0] : item;
        ExprCtx ctx{Clause::select};
        ctx.udtf_ok = items.size() == 1;
        const ExprInfo info = check_expr(expr, ctx);
        if (t_[item].kind == NodeKind::Alias && t_[item].label.find(',') != std::string::npos) {
          // AS (k, v) after a table function: one output per name
          for (const std::string& name : split_commas(t_[item].label)) {
            shape.columns.push_back({name, std::nullopt, "", false});
          }
          continue;
        }
        RelColumn c;
        c.name = detail::output_name(t_, item, i);
        c.type = info.type;
        shape.columns.push_back(std::move(c));
      }
    }
    for (const RelColumn& c : shape.columns) scope.output_names.push_back(to_lower(c.name));

    if (group) {
      for (NodeId key : t_[*group].children) check_expr(key, {Clause::group});
    }
    if (having) check_expr(t_[*having].children[0], {Clause::having});
    if (proj) check_grouping(*proj, group, having);
    if (order) {
      for (NodeId key : t_[*order].children) check_expr(t_[key].children[0], {Clause::order});
    }
    shape.opaque = shape.opaque || std::any_of(scope.relations.begin(), scope.relations.end(),
                                               [](const Relation& r) { return r.shape.opaque; });
    scopes_.pop_back();
    return shape;
  }

  static std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  void expand_star(NodeId star, const Scope& scope, Shape& shape) {
    const std::string& label = t_[star].label;
    if (label == "*") {
      for (const Relation& r : scope.relations) {
        shape.columns.insert(shape.columns.end(), r.shape.columns.begin(), r.shape.columns.end());
        shape.opaque = shape.opaque || r.shape.opaque;
      }
      return;
    }
    const std::string qualifier = label.substr(0, label.size() - 2);
    for (const Relation& r : scope.relations) {
      if (r.alias == qualifier) {
        shape.columns.insert(shape.columns.end(), r.shape.columns.begin(), r.shape.columns.end());
        shape.opaque = shape.opaque || r.shape.opaque;
        return;
      }
    }
    error(star, tax::field_not_exist(), "unknown table or alias '" + qualifier + "'");
    shape.opaque = true;
  }

  // ------------------------------------------------------------------ FROM
  std::optional<Shape> lookup_table(const std::string& name) {
    for (auto it = ctes_.rbegin(); it != ctes_.rend(); ++it) {
      if (auto f = it->find(name); f != it->end()) return f->second;
    }
    if (auto f = local_tables_.find(to_lower(name)); f != local_tables_.end()) return f->second;
    if (const Table* table = catalog_.find(name)) {
      Shape shape;
      for (const Column& c : table->columns) {
        RelColumn rc = column_of_type(c.name, c.type_text.empty() ? std::string(to_string(c.type))
                                                                  : c.type_text);
        rc.partition = table->is_partition(c.name);
        shape.columns.push_back(std::move(rc));
      }
      return shape;
    }
    return std::nullopt;
  }

  void build_from(NodeId from, Scope& scope) {
    const auto& kids = t_[from].children;
    add_table_expr(kids[0], scope);
    for (std::size_t i = 1; i < kids.size(); ++i) add_lateral_view(kids[i], scope);
  }

  void add_relation(NodeId at, Relation rel, Scope& scope) {
    const bool clash = std::any_of(scope.relations.begin(), scope.relations.end(),
                                   [&](const Relation& r) { return r.alias == rel.alias; });
    if (clash) error(at, tax::duplicate_name(), "duplicate table alias '" + rel.alias + "'");
    scope.relations.push_back(std::move(rel));
  }

  void add_table_expr(NodeId te, Scope& scope) {
    const Node& n = t_[te];
    if (n.kind == NodeKind::TableRef) {
      Relation rel;
      rel.table = n.label;
      const long alias = t_.find_child(te, NodeKind::TableAlias);
      rel.alias = alias >= 0 ? t_[static_cast<NodeId>(alias)].label
                             : n.label.substr(n.label.rfind('.') + 1);
      if (auto shape = lookup_table(n.label)) {
        rel.shape = std::move(*shape);
      } else {
        error(te, tax::field_not_exist(), "table '" + n.label + "' does not exist");
        rel.shape.opaque = true;
      }
      add_relation(te, std::move(rel), scope);
      return;
    }
    if (n.kind == NodeKind::DerivedTable) {
      Relation rel;
      rel.shape = check_query(n.children[0]);
      check_unique_outputs(te, rel.shape, "derived table");
      const long alias = t_.find_child(te, NodeKind::TableAlias);
      rel.alias = alias >= 0 ? t_[static_cast<NodeId>(alias)].label : "";
      add_relation(te, std::move(rel), scope);
      return;
    }
    // Join
    add_table_expr(n.children[0], scope);
    add_table_expr(n.children[1], scope);
    const long on = t_.find_child(te, NodeKind::On);
    if (on >= 0) {
      scopes_.push_back(&scope);
      check_expr(t_[static_cast<NodeId>(on)].children[0], {Clause::on});
      scopes_.pop_back();
    } else {
      warn(te, tax::cartesian_product(),
           n.label == "CROSS" || n.label == "COMMA"
               ? "join without a condition produces a Cartesian product"
               : n.label + " JOIN without ON produces a Cartesian product");
    }
  }

  void add_lateral_view(NodeId lv, Scope& scope) {
    const auto& kids = t_[lv].children;
    const NodeId call = kids[0];
    scopes_.push_back(&scope);
    const std::vector<NodeId> args = call_arguments(t_, call);
    std::vector<ExprInfo> infos;
    for (NodeId a : args) infos.push_back(check_expr(a, {Clause::select}));
    scopes_.pop_back();
    check_function_rules(call, args, infos);

    Relation rel;
    rel.alias = t_[kids[1]].label;
    std::vector<std::string> aliases;
    for (std::size_t i = 2; i < kids.size(); ++i) aliases.push_back(t_[kids[i]].label);
    const std::string& fn = t_[call].label;
    if ((fn == "explode" || fn == "posexplode") && args.size() == 1 && infos[0].type) {
      const ColumnType arg = *infos[0].type;
      const std::size_t want = (arg == ColumnType::map ? 2u : 1u) + (fn == "posexplode" ? 1u : 0u);
      if ((arg == ColumnType::map || arg == ColumnType::array) && aliases.size() != want) {
        error(lv, tax::explode_map_aliases(),
              fn + "(" + std::string(to_string(arg)) + ") requires " + std::to_string(want) +
                  (want == 1 ? " alias" : " aliases") + ", got " + std::to_string(aliases.size()));
      }
    }
    // element types of the generated columns, when the argument is a typed column
    std::vector<std::string> element_types;
    if (args.size() == 1 && t_[args[0]].kind == NodeKind::ColRef) {
      const Resolved r = resolve_silently(t_[args[0]].label);
      if (r.state == Resolved::found) element_types = type_arguments(r.column.type_text);
    }
    if (fn == "posexplode") element_types.insert(element_types.begin(), "int");
    for (std::size_t i = 0; i < aliases.size(); ++i) {
      rel.shape.columns.push_back(
          i < element_types.size() ? column_of_type(aliases[i], element_types[i])
                                   : RelColumn{aliases[i], std::nullopt, "", false});
    }
    add_relation(lv, std::move(rel), scope);
  }

  // ------------------------------------------------------------- resolving
  Resolved resolve_silently(const std::string& name, bool output_aliases = false) const {
    const std::vector<std::string> parts = split_dotted(name);
    Resolved res;
    for (std::size_t depth = scopes_.size(); depth-- > 0;) {
      const Scope& scope = *scopes_[depth];
      if (parts.size() == 1) {
        if (output_aliases && depth + 1 == scopes_.size()) {
          const auto& outs = scope.output_names;
          if (std::find(outs.begin(), outs.end(), parts[0]) != outs.end()) {
            res.state = Resolved::found;
            res.scope_depth = depth;
            res.key = "out:" + parts[0];
            return res;
          }
        }
        int hits = 0;
        bool opaque = false;
        for (std::size_t r = 0; r < scope.relations.size(); ++r) {
          const Relation& rel = scope.relations[r];
          opaque = opaque || rel.shape.opaque;
          for (std::size_t c = 0; c < rel.shape.columns.size(); ++c) {
            if (to_lower(rel.shape.columns[c].name) != parts[0]) continue;
            ++hits;
            res.column = rel.shape.columns[c];
            res.key = std::to_string(depth) + ":" + std::to_string(r) + ":" + std::to_string(c);
          }
        }
        if (hits > 1) {
          res.state = Resolved::ambiguous;
          res.message = "column '" + parts[0] + "' is ambiguous; qualify it with a table alias";
          return res;
        }
        if (hits == 1 || opaque) {
          res.state = Resolved::found;
          res.scope_depth = depth;
          if (hits == 0) res.column = {};
          return res;
        }
        continue;
      }
      for (std::size_t r = 0; r < scope.relations.size(); ++r) {
        const Relation& rel = scope.relations[r];
        if (rel.alias != parts[0] && to_lower(rel.table) != parts[0] + "." + parts[1]) continue;
        const bool via_table = rel.alias != parts[0];
        if (via_table && parts.size() < 3) continue;
        const std::string& col = parts[via_table ? 2 : 1];
        res.scope_depth = depth;
        if (rel.shape.opaque) {
          res.state = Resolved::found;
          return res;
        }
        for (std::size_t c = 0; c < rel.shape.columns.size(); ++c) {
          if (to_lower(rel.shape.columns[c].name) == col) {
            res.state = Resolved::found;
            res.column = rel.shape.columns[c];
            res.key = std::to_string(depth) + ":" + std::to_string(r) + ":" + std::to_string(c);
            const std::size_t used = via_table ? 3 : 2;
            if (parts.size() > used) res.column = {};  // struct field access
            return res;
          }
        }
        res.state = Resolved::missing;
        res.message = "column '" + col + "' does not exist in '" + parts[0] + "'";
        return res;
      }
    }
    if (parts.size() > 1) {
      // not a known qualifier: maybe struct field access on a column
      const Resolved base = resolve_silently(parts[0]);
      if (base.state == Resolved::found &&
          (!base.column.type || *base.column.type == ColumnType::struct_ ||
           *base.column.type == ColumnType::map)) {
        Resolved field = base;
        field.column = {};
        return field;
      }
      res.state = Resolved::missing;
      res.message = "unknown table or alias '" + parts[0] + "'";
      return res;
    }
    res.state = Resolved::missing;
    res.message = "column '" + parts[0] + "' does not exist";
    return res;
  }

  Resolved resolve(NodeId colref, bool output_aliases) {
    Resolved r = resolve_silently(t_[colref].label, output_aliases);
    if (r.state == Resolved::missing) error(colref, tax::field_not_exist(), r.message);
    if (r.state == Resolved::ambiguous) error(colref, tax::ambiguous_column(), r.message);
    return r;
  }

  // ----------------------------------------------------------- expressions
  ExprInfo check_expr(NodeId e, const ExprCtx& ctx) {
    const Node& n = t_[e];
    ExprInfo info;
    switch (n.kind) {
      case NodeKind::ColRef: {
        const bool aliases = ctx.clause == Clause::order || ctx.clause == Clause::group;
        const Resolved r = resolve(e, aliases);
        if (r.state == Resolved::found) {
          info.type = r.column.type;
          info.partition = r.column.partition;
        }
        return info;
      }
      case NodeKind::Literal:
        info.literal = true;
        info.type = detail::literal_type(n.label);
        info.null_literal = n.label == "NULL";
        info.numeric_string =
            info.type == ColumnType::string && detail::string_is_numeric(n.label);
        return info;
      case NodeKind::FunctionCall: return check_call(e, ctx);
      case NodeKind::Cast: {
        check_expr(n.children[0], child_ctx(ctx));
        try {
          info.type = parse_column_type(n.label);
        } catch (const Error&) {
          error(e, tax::type_mismatch(), "unknown type '" + n.label + "' in CAST");
        }
        return info;
      }
      case NodeKind::BinaryOp: {
        const ExprInfo l = check_expr(n.children[0], child_ctx(ctx));
        const ExprInfo r = check_expr(n.children[1], child_ctx(ctx));
        if (is_comparison(n.label)) {
          check_comparison(e, n.label, l, r);
          info.type = ColumnType::boolean;
        } else if (n.label == "AND" || n.label == "OR") {
          info.type = ColumnType::boolean;
        } else if (n.label == "||") {
          info.type = ColumnType::string;
        } else if (l.type && r.type && is_numeric(*l.type) && is_numeric(*r.type)) {
          info.type = (*l.type == ColumnType::double_ || *r.type == ColumnType::double_)
                          ? ColumnType::double_
                          : *l.type;
        }
        return info;
      }
      case NodeKind::Between: {
        const ExprInfo v = check_expr(n.children[0], child_ctx(ctx));
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          check_comparison(e, ">=", v, check_expr(n.children[i], child_ctx(ctx)));
        }
        info.type = ColumnType::boolean;
        return info;
      }
      case NodeKind::InList: {
        const ExprInfo v = check_expr(n.children[0], child_ctx(ctx));
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          check_comparison(e, "IN", v, check_expr(n.children[i], child_ctx(ctx)));
        }
        info.type = ColumnType::boolean;
        return info;
      }
      case NodeKind::InSubquery: {
        check_expr(n.children[0], child_ctx(ctx));
        const Shape sub = check_query(n.children[1]);
        if (!sub.opaque && sub.columns.size() != 1) {
          error(e, {"Query Validation & Rules", "Conditional Logic", "IN subquery returns multiple columns"},
                "IN subquery must return exactly one column, got " + std::to_string(sub.columns.size()));
        }
        info.type = ColumnType::boolean;
        return info;
      }
      case NodeKind::Exists:
        check_query(n.children[0]);
        info.type = ColumnType::boolean;
        return info;
      case NodeKind::ScalarSubquery: {
        const Shape sub = check_query(n.children[0]);
        if (sub.columns.size() == 1) info.type = sub.columns[0].type;
        return info;
      }
      case NodeKind::IsNull:
      case NodeKind::Like:
      case NodeKind::UnaryOp: {
        ExprInfo inner;
        for (NodeId c : n.children) inner = check_expr(c, child_ctx(ctx));
        info.type = n.kind == NodeKind::UnaryOp && n.label != "NOT" ? inner.type : ColumnType::boolean;
        return info;
      }
      case NodeKind::Case: {
        for (NodeId c : n.children) {
          if (t_[c].kind == NodeKind::When) {
            check_expr(t_[c].children[0], child_ctx(ctx));
            info.type = check_expr(t_[c].children[1], child_ctx(ctx)).type;
          } else if (t_[c].kind == NodeKind::Else) {
            check_expr(t_[c].children[0], child_ctx(ctx));
          } else {
            check_expr(c, child_ctx(ctx));
          }
        }
        return info;
      }
      default:
        for (NodeId c : n.children) check_expr(c, child_ctx(ctx));
        return info;
    }
  }

  static ExprCtx child_ctx(const ExprCtx& ctx) {
    ExprCtx c = ctx;
    c.udtf_ok = false;
    return c;
  }

  void check_comparison(NodeId at, const std::string& op, const ExprInfo& l, const ExprInfo& r) {
    if ((op == "=" || op == "<>" || op == "!=") && (l.null_literal || r.null_literal)) {
      warn(at, tax::null_equality(), "comparison with NULL using " + op + " is never true; use IS NULL");
      return;
    }
    const ExprInfo* col = nullptr;
    const ExprInfo* lit = nullptr;
    if (!l.literal && r.literal) {
      col = &l;
      lit = &r;
    } else if (l.literal && !r.literal) {
      col = &r;
      lit = &l;
    }
    if (col == nullptr || !col->type || !lit->type) return;
    const ColumnType ct = *col->type;
    const ColumnType lt = *lit->type;
    if (is_temporal(ct) && is_numeric(lt)) {
      error(at, tax::type_mismatch(),
            "cannot compare " + std::string(to_string(ct)) + " column with numeric literal");
    } else if (is_numeric(ct) && lt == ColumnType::string && !lit->numeric_string) {
      error(at, tax::type_mismatch(), "cannot compare numeric column with non-numeric string");
    } else if (ct == ColumnType::string && is_numeric(lt)) {
      if (col->partition) {
        error(at, tax::partition_numeric_compare(),
              "string partition column compared with a numeric literal; quote the value");
      } else {
        warn(at, tax::implicit_cast(), "string column compared with a number: implicit cast");
      }
    }
  }

  ExprInfo check_call(NodeId call, const ExprCtx& ctx) {
    const Node& n = t_[call];
    const std::string& name = n.label;
    const bool window = detail::has_over(t_, call);
    const bool aggregate = is_aggregate_function(name) && !window;
    ExprInfo info;

    if (window && (ctx.clause == Clause::where || ctx.clause == Clause::having)) {
      error(call, tax::window_in_where(),
            "window function " + name + " is not allowed in " +
                (ctx.clause == Clause::where ? "WHERE" : "HAVING"));
    } else if (aggregate && ctx.clause == Clause::where) {
      error(call, tax::aggregate_in_where(),
            "aggregate " + name + " is not allowed in WHERE; filter groups with HAVING");
    } else if (aggregate && ctx.in_aggregate) {
      error(call, tax::nested_aggregate(), "aggregate " + name + " cannot be nested inside another aggregate");
    }
    if (is_table_function(name) && !ctx.udtf_ok) {
      error(call, tax::missing_lateral_view(),
            name + " generates rows and must be used with LATERAL VIEW");
    }
    check_dialect(call);

    ExprCtx arg_ctx = child_ctx(ctx);
    if (aggregate) arg_ctx.in_aggregate = true;
    if (window) arg_ctx.in_aggregate = false;
    const std::vector<NodeId> args = call_arguments(t_, call);
    std::vector<ExprInfo> infos;
    for (NodeId a : args) {
      infos.push_back(t_[a].kind == NodeKind::Star ? ExprInfo{} : check_expr(a, arg_ctx));
    }
    if (window) {
      const NodeId over = static_cast<NodeId>(t_.find_child(call, NodeKind::Over));
      ExprCtx over_ctx = child_ctx(ctx);
      over_ctx.in_aggregate = false;
      for (NodeId part : t_[over].children) {
        if (t_[part].kind == NodeKind::PartitionBy) {
          for (NodeId k : t_[part].children) check_expr(k, over_ctx);
        } else if (t_[part].kind == NodeKind::OrderBy) {
          for (NodeId k : t_[part].children) check_expr(t_[k].children[0], over_ctx);
        }
      }
    }
    check_function_rules(call, args, infos);

    if (name == "count") info.type = ColumnType::bigint;
    if (name == "concat" || name == "concat_ws" || name == "get_json_object" || name == "date_add" ||
        name == "date_sub") {
      info.type = ColumnType::string;
    }
    if (name == "datediff" || name == "row_number" || name == "rank" || name == "dense_rank") {
      info.type = ColumnType::int_;
    }
    if ((name == "sum" || name == "max" || name == "min") && infos.size() == 1) info.type = infos[0].type;
    if (name == "avg") info.type = ColumnType::double_;
    if (name == "collect_set" || name == "collect_list" || name == "split") info.type = ColumnType::array;
    return info;
  }

  void check_dialect(NodeId call) {
    const std::string& name = t_[call].label;
    if (name == "wm_concat" || name == "group_concat" || name == "listagg" || name == "string_agg") {
      error(call, tax::unsupported_wm_concat(),
            name + " is not supported in the current SQL dialect; use concat_ws with collect_list");
      return;
    }
    if (name == "transform") {
      error(call, tax::unsupported_transform(), "TRANSFORM with a lambda expression is not supported");
      return;
    }
    if (detail::is_known_function(name)) return;
    struct Target {
      const char* name;
      TaxonomyPath (*path)();
    };
    static constexpr Target kTargets[] = {
        {"concat_ws", tax::concat_ws_typo},
        {"date_add", tax::date_add_parameter},
        {"datediff", tax::datediff_error},
        {"to_unix_timestamp", tax::to_unix_timestamp_typo},
    };
    for (const Target& target : kTargets) {
      if (detail::levenshtein(name, target.name) <= 2) {
        error(call, target.path(),
              "unknown function '" + name + "'; did you mean '" + target.name + "'?");
        return;
      }
    }
  }

  void check_function_rules(NodeId call, const std::vector<NodeId>& args,
                            const std::vector<ExprInfo>& infos) {
    const std::string& name = t_[call].label;
    auto type_of = [&](std::size_t i) -> std::optional<ColumnType> {
      return i < infos.size() ? infos[i].type : std::nullopt;
    };
    const std::string count = std::to_string(args.size());
    if (name == "explode" || name == "posexplode") {
      if (args.empty()) {
        error(call, tax::explode_missing_parameter(), name + " requires one argument");
      } else if (args.size() > 1) {
        error(call, tax::explode_bad_parameter(), name + " takes exactly one argument, got " + count);
      } else if (auto t = type_of(0); t && *t != ColumnType::array && *t != ColumnType::map) {
        error(call, tax::explode_bad_parameter(),
              name + " expects an array or map argument, got " + std::string(to_string(*t)));
      }
    } else if (name == "date_add" || name == "date_sub") {
      if (args.size() != 2) {
        error(call, tax::date_add_parameter(), name + " requires a date and a day count, got " + count +
                                                   (args.size() == 1 ? " argument" : " arguments"));
      }
    } else if (name == "datediff") {
      if (args.size() != 2) {
        error(call, tax::datediff_error(), "datediff requires two date arguments, got " + count);
      }
    } else if (name == "array_contains") {
      if (args.size() != 2) {
        error(call, tax::array_contains_type(), "array_contains requires an array and a value, got " +
                                                    count + " arguments");
      } else if (auto t = type_of(0); t && *t != ColumnType::array) {
        error(call, tax::array_contains_type(),
              "array_contains expects an array as first argument, got " + std::string(to_string(*t)));
      }
    } else if (name == "get_json_object") {
      if (args.size() != 2) {
        error(call, tax::get_json_object_type(), "get_json_object requires a JSON string and a path");
      } else if (auto t = type_of(0); t && *t != ColumnType::string) {
        error(call, tax::get_json_object_type(),
              "get_json_object expects a string JSON argument, got " + std::string(to_string(*t)));
      } else if (auto p = type_of(1); infos[1].literal && p && *p != ColumnType::string) {
        error(call, tax::get_json_object_type(), "get_json_object path must be a string such as '$.key'");
      }
    } else if (name == "from_json") {
      if (args.size() != 2) {
        error(call, tax::from_json_type(), "from_json requires a JSON string and a schema");
      } else if (auto t = type_of(0); t && *t != ColumnType::string) {
        error(call, tax::from_json_type(),
              "from_json expects a string JSON argument, got " + std::string(to_string(*t)));
      } else if (auto s = type_of(1); !infos[1].literal || (s && *s != ColumnType::string)) {
        error(call, tax::from_json_type(), "from_json schema must be a string literal");
      }
    } else if (name == "concat_ws") {
      if (args.size() < 2) {
        error(call, tax::concat_ws_typo(), "concat_ws requires a separator and at least one value");
      }
    }
  }

  // -------------------------------------------------------------- grouping
  /// With GROUP BY or aggregates present, every column referenced outside
  /// an aggregate in the SELECT list and HAVING must be a grouping key.
  void check_grouping(NodeId proj, std::optional<NodeId> group, std::optional<NodeId> having) {
    bool has_aggregate = false;
    auto scan_aggregates = [&](NodeId root) {
      t_.walk(root, [&](NodeId id) {
        const Node& n = t_[id];
        if (n.kind == NodeKind::Query) return false;
        if (n.kind == NodeKind::FunctionCall && is_aggregate_function(n.label) &&
            !detail::has_over(t_, id)) {
          has_aggregate = true;
          return false;
        }
        return true;
      });
    };
    scan_aggregates(proj);
    if (having) scan_aggregates(*having);
    if (!group && !has_aggregate) return;

    const std::size_t depth = scopes_.size() - 1;
    std::set<std::string> key_columns;
    std::set<std::string> key_signatures;
    if (group) {
      for (NodeId key : t_[*group].children) {
        key_signatures.insert(signature(t_, key));
        if (t_[key].kind == NodeKind::ColRef) {
          const Resolved r = resolve_silently(t_[key].label, true);
          if (r.state == Resolved::found) key_columns.insert(r.key);
          // GROUP BY on an output alias groups the aliased expression
          if (r.key.rfind("out:", 0) == 0) key_signatures.insert("alias:" + r.key.substr(4));
        }
      }
    }
    auto report_free_columns = [&](NodeId root) {
      t_.walk(root, [&](NodeId id) {
        const Node& n = t_[id];
        if (n.kind == NodeKind::Query) return false;
        if (key_signatures.count(signature(t_, id)) != 0) return false;
        if (n.kind == NodeKind::FunctionCall && is_aggregate_function(n.label) &&
            !detail::has_over(t_, id)) {
          return false;
        }
        if (n.kind != NodeKind::ColRef) return true;
        const Resolved r = resolve_silently(n.label);
        if (r.state != Resolved::found || r.key.empty() || r.scope_depth != depth) return false;
        if (key_columns.count(r.key) != 0) return false;
        if (group) {
          error(id, tax::missing_grouping_column(),
                "column '" + n.label + "' must appear in GROUP BY or be aggregated");
        } else {
          error(id, tax::non_aggregated_column(),
                "column '" + n.label + "' is not aggregated and there is no GROUP BY");
        }
        return false;
      });
    };
    for (NodeId item : t_[proj].children) {
      if (t_[item].kind == NodeKind::Alias &&
          key_signatures.count("alias:" + t_[item].label) != 0) {
        continue;
      }
      report_free_columns(item);
    }
    if (having) report_free_columns(t_[*having].children[0]);
  }

  const SyntaxTree& t_;
  const Catalog& catalog_;
  std::vector<Diagnostic> out_;
  std::vector<std::map<std::string, Shape>> ctes_;
  std::vector<Scope*> scopes_;
  std::map<std::string, Shape> local_tables_;
};

}  // namespace

std::vector<Diagnostic> validate(const SyntaxTree& tree, const Catalog& catalog) {
  return Checker(tree, catalog).run();
}

bool passes(const SyntaxTree& tree, const Catalog& catalog) {
  const auto diags = validate(tree, catalog);
  return std::none_of(diags.begin(), diags.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::vector<Diagnostic> lint(const SqlScript& script, const Catalog& catalog) {
  const ParseResult parsed = parse_recovering(script);
  if (script.blank()) {
    return {{fault_taxonomy(GrammarFault::empty_script), parsed.errors.front().message,
             parsed.errors.front().span, Severity::error}};
  }
  return validate(parsed.tree, catalog);
}

std::string first_error_message(const std::vector<Diagnostic>& diagnostics) {
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::error) return d.taxonomy.level3 + ": " + d.message;
  }
  return "";
}

}  // namespace sqldebug
