#include <algorithm>
#include <map>
#include <optional>

#include "sql_functions.hpp"
#include "sqldebug/plan.hpp"

namespace sqldebug {
namespace {

using detail::has_over;
using detail::is_aggregate_function;

struct NamedColumn {
  std::string qualifier;
  std::string table;
  std::string name;
};

struct Relation {
  PlanNode plan;
  std::vector<NamedColumn> columns;
};

struct CteDef {
  NodeId query = 0;
  std::optional<NodeId> column_list;
  std::vector<std::map<std::string, CteDef>> visible;  // CTEs in scope at the definition
};

[[noreturn]] void unsupported(NodeKind kind) {
  throw Error("unsupported construct: " + std::string(to_string(kind)));
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

std::string normalize_literal(const std::string& text) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    std::string body = text.substr(1, text.size() - 2);
    std::string out = "'";
    for (char c : body) {
      out += c;
      if (c == '\'') out += '\'';
    }
    return out + "'";
  }
  return text;
}

bool is_aggregate_call(const SyntaxTree& t, NodeId id) {
  return t[id].kind == NodeKind::FunctionCall && is_aggregate_function(t[id].label) && !has_over(t, id);
}

Expr replace(const Expr& e, const std::map<std::string, Expr>& map) {
  if (auto it = map.find(render(e)); it != map.end()) return it->second;
  Expr out = e;
  for (Expr& a : out.args) a = replace(a, map);
  for (Expr& p : out.partition) p = replace(p, map);
  for (Expr& o : out.order) o = replace(o, map);
  return out;
}

class Lowerer {
 public:
  Lowerer(const SyntaxTree& tree, const Catalog& catalog) : t_(tree), catalog_(catalog) {}

  ScriptPlan run() {
    ScriptPlan plan;
    for (NodeId stmt : t_[t_.root()].children) {
      switch (t_[stmt].kind) {
        case NodeKind::Comment: break;
        case NodeKind::Query: plan.statements.push_back(lower_query(stmt).plan); break;
        case NodeKind::Insert: plan.statements.push_back(lower_insert(stmt)); break;
        case NodeKind::CreateTable: plan.statements.push_back(lower_create(stmt)); break;
        default: unsupported(t_[stmt].kind);
      }
    }
    return plan;
  }

 private:
  // ------------------------------------------------------------ statements
  PlanNode lower_insert(NodeId insert) {
    ctes_.emplace_back();
    PlanNode node;
    node.kind = PlanKind::Insert;
    std::string target;
    std::string columns;
    for (NodeId k : t_[insert].children) {
      const Node& n = t_[k];
      switch (n.kind) {
        case NodeKind::With: register_ctes(k); break;
        case NodeKind::TableRef: target = table_name(n.label); break;
        case NodeKind::PartitionSpec:
          for (NodeId item : n.children) {
            std::string spec = t_[item].label;
            if (!t_[item].children.empty()) {
              spec += "=" + normalize_literal(t_[t_[item].children[0]].label);
            }
            node.keys.push_back(Expr::literal(spec));
          }
          break;
        case NodeKind::ColumnList:
          columns = " (";
          for (std::size_t i = 0; i < n.children.size(); ++i) {
            columns += (i > 0 ? ", " : "") + t_[n.children[i]].label;
          }
          columns += ")";
          break;
        default: node.children.push_back(lower_body(k).plan); break;
      }
    }
    node.detail = t_[insert].label + " " + target + columns;
    ctes_.pop_back();
    return node;
  }

  PlanNode lower_create(NodeId create) {
    const Node& n = t_[create];
    PlanNode node;
    node.kind = PlanKind::CreateTable;
    std::string spec;
    std::string partitioned;
    std::vector<std::string> names;
    for (NodeId k : n.children) {
      const Node& c = t_[k];
      if (c.kind == NodeKind::ColumnDef) {
        spec += (spec.empty() ? "" : ", ") + c.label + " " + t_[c.children[0]].label;
        names.push_back(c.label);
      } else if (c.kind == NodeKind::PartitionedBy) {
        for (NodeId p : c.children) {
          partitioned += (partitioned.empty() ? "" : ", ") + t_[p].label + " " +
                         t_[t_[p].children[0]].label;
          names.push_back(t_[p].label);
        }
      } else if (c.kind == NodeKind::Query) {
        Relation q = lower_query(k);
        for (const NamedColumn& col : q.columns) names.push_back(col.name);
        node.children.push_back(std::move(q.plan));
      }
    }
    node.detail = n.label + " (" + spec + ")";
    if (!partitioned.empty()) node.detail += " PARTITIONED BY (" + partitioned + ")";
    local_tables_[to_lower(n.label)] = names;
    return node;
  }

  std::string table_name(const std::string& label) const {
    if (const Table* t = catalog_.find(label)) return to_lower(t->name);
    return to_lower(label);
  }

  // --------------------------------------------------------------- queries
  void register_ctes(NodeId with) {
    for (NodeId cte : t_[with].children) {
      CteDef def;
      def.visible = ctes_;
      for (NodeId k : t_[cte].children) {
        if (t_[k].kind == NodeKind::ColumnList) def.column_list = k;
        if (t_[k].kind == NodeKind::Query) def.query = k;
      }
      ctes_.back()[t_[cte].label] = std::move(def);
    }
  }

  Relation lower_query(NodeId query) {
    ctes_.emplace_back();
    Relation out;
    for (NodeId k : t_[query].children) {
      if (t_[k].kind == NodeKind::With) {
        register_ctes(k);
      } else {
        out = lower_body(k);
      }
    }
    ctes_.pop_back();
    return out;
  }

  Relation lower_body(NodeId body) {
    const Node& n = t_[body];
    switch (n.kind) {
      case NodeKind::Query: return lower_query(body);
      case NodeKind::Select: return lower_select(body);
      case NodeKind::SetOp: {
        Relation left = lower_body(n.children[0]);
        Relation right = lower_body(n.children[1]);
        PlanNode u;
        u.kind = PlanKind::Union;
        u.detail = n.label == "UNION ALL" ? "ALL" : "DISTINCT";
        u.arity = left.plan.arity;
        u.children.push_back(std::move(left.plan));
        u.children.push_back(std::move(right.plan));
        for (NamedColumn& c : left.columns) c.qualifier.clear();
        return {std::move(u), std::move(left.columns)};
      }
      default: unsupported(n.kind);
    }
  }

  // ------------------------------------------------------------------ FROM
  Relation lower_table_ref(NodeId ref) {
    const Node& n = t_[ref];
    const long alias_id = t_.find_child(ref, NodeKind::TableAlias);
    const std::string short_name = n.label.substr(n.label.rfind('.') + 1);
    const std::string alias = alias_id >= 0 ? t_[static_cast<NodeId>(alias_id)].label : short_name;

    for (auto it = ctes_.rbegin(); it != ctes_.rend(); ++it) {
      auto found = it->find(n.label);
      if (found == it->end()) continue;
      const CteDef def = found->second;
      auto saved_ctes = std::move(ctes_);
      auto saved_frames = std::move(frames_);
      ctes_ = def.visible;
      frames_.clear();
      Relation rel = lower_query(def.query);
      ctes_ = std::move(saved_ctes);
      frames_ = std::move(saved_frames);
      for (std::size_t i = 0; i < rel.columns.size(); ++i) {
        rel.columns[i].qualifier = alias;
        rel.columns[i].table = n.label;
        if (def.column_list && i < t_[*def.column_list].children.size()) {
          rel.columns[i].name = t_[t_[*def.column_list].children[i]].label;
        }
      }
      return rel;
    }

    Relation rel;
    rel.plan.kind = PlanKind::Scan;
    std::vector<std::string> names;
    if (auto local = local_tables_.find(to_lower(n.label)); local != local_tables_.end()) {
      names = local->second;
      rel.plan.detail = to_lower(n.label);
    } else if (const Table* table = catalog_.find(n.label)) {
      for (const Column& c : table->columns) names.push_back(to_lower(c.name));
      rel.plan.detail = to_lower(table->name);
    } else {
      throw Error("unknown table '" + n.label + "'");
    }
    rel.plan.arity = names.size();
    for (const std::string& name : names) rel.columns.push_back({alias, to_lower(n.label), name});
    return rel;
  }

  Relation lower_table_expr(NodeId te) {
    const Node& n = t_[te];
    if (n.kind == NodeKind::TableRef) return lower_table_ref(te);
    if (n.kind == NodeKind::DerivedTable) {
      Relation rel = lower_query(n.children[0]);
      const long alias = t_.find_child(te, NodeKind::TableAlias);
      for (NamedColumn& c : rel.columns) {
        c.qualifier = alias >= 0 ? t_[static_cast<NodeId>(alias)].label : "";
        c.table.clear();
      }
      return rel;
    }
    if (n.kind != NodeKind::Join) unsupported(n.kind);
    Relation left = lower_table_expr(n.children[0]);
    Relation right = lower_table_expr(n.children[1]);
    PlanNode join;
    join.kind = PlanKind::Join;
    join.detail = n.label == "COMMA" ? "CROSS" : n.label;
    std::vector<NamedColumn> both = left.columns;
    both.insert(both.end(), right.columns.begin(), right.columns.end());
    const long on = t_.find_child(te, NodeKind::On);
    if (on >= 0) {
      frames_.push_back(both);
      join.exprs.push_back(lower_expr(t_[static_cast<NodeId>(on)].children[0]));
      frames_.pop_back();
    } else if (join.detail == "INNER") {
      join.detail = "CROSS";
    }
    const bool semi = join.detail == "LEFT SEMI";
    join.arity = semi ? left.plan.arity : left.plan.arity + right.plan.arity;
    join.children.push_back(std::move(left.plan));
    join.children.push_back(std::move(right.plan));
    return {std::move(join), semi ? left.columns : both};
  }

  Relation lower_lateral_view(NodeId lv, Relation input) {
    const auto& kids = t_[lv].children;
    frames_.push_back(input.columns);
    Expr call = lower_expr(kids[0]);
    frames_.pop_back();
    const std::string alias = t_[kids[1]].label;
    PlanNode node;
    node.kind = PlanKind::LateralView;
    const std::size_t k = kids.size() - 2;
    node.detail = (t_[lv].label.empty() ? "" : t_[lv].label + " ") + std::to_string(k);
    node.exprs.push_back(std::move(call));
    node.arity = input.plan.arity + k;
    node.children.push_back(std::move(input.plan));
    for (std::size_t i = 2; i < kids.size(); ++i) {
      input.columns.push_back({alias, "", t_[kids[i]].label});
    }
    return {std::move(node), std::move(input.columns)};
  }

  // ---------------------------------------------------------------- SELECT
  Relation lower_select(NodeId select) {
    std::optional<NodeId> from, proj, where, group, having, order, limit;
    bool distinct = false;
    for (NodeId k : t_[select].children) {
      switch (t_[k].kind) {
        case NodeKind::Distinct: distinct = true; break;
        case NodeKind::ProjList: proj = k; break;
        case NodeKind::From: from = k; break;
        case NodeKind::Where: where = k; break;
        case NodeKind::GroupBy: group = k; break;
        case NodeKind::Having: having = k; break;
        case NodeKind::OrderBy: order = k; break;
        case NodeKind::Limit: limit = k; break;
        default: unsupported(t_[k].kind);
      }
    }

    Relation base;
    if (from) {
      const auto& kids = t_[*from].children;
      base = lower_table_expr(kids[0]);
      for (std::size_t i = 1; i < kids.size(); ++i) base = lower_lateral_view(kids[i], std::move(base));
    } else {
      base.plan.kind = PlanKind::Values;
      base.plan.detail = "1 row";
    }
    frames_.push_back(base.columns);
    PlanNode plan = std::move(base.plan);

    if (where) plan = wrap(PlanKind::Filter, std::move(plan), {lower_expr(t_[*where].children[0])});

    // projection items, expanded
    struct Item {
      std::optional<NodeId> expr;
      std::optional<std::size_t> star_column;
      std::string name;
    };
    std::vector<Item> items;
    const auto& proj_items = t_[*proj].children;
    for (std::size_t i = 0; i < proj_items.size(); ++i) {
      const NodeId item = proj_items[i];
      const Node& n = t_[item];
      if (n.kind == NodeKind::Star) {
        const std::string q = n.label == "*" ? "" : n.label.substr(0, n.label.size() - 2);
        for (std::size_t c = 0; c < base.columns.size(); ++c) {
          if (q.empty() || base.columns[c].qualifier == q) {
            items.push_back({std::nullopt, c, base.columns[c].name});
          }
        }
        continue;
      }
      items.push_back({n.kind == NodeKind::Alias ? n.children[0] : item, std::nullopt,
                       detail::output_name(t_, item, i)});
    }

    // a lone table function in the SELECT list behaves like a LATERAL VIEW
    if (items.size() == 1 && items[0].expr && t_[*items[0].expr].kind == NodeKind::FunctionCall &&
        detail::is_table_function(t_[*items[0].expr].label)) {
      const NodeId call = *items[0].expr;
      const Node& alias = t_[proj_items[0]];
      std::size_t k = 1;
      if (alias.kind == NodeKind::Alias) {
        k = static_cast<std::size_t>(std::count(alias.label.begin(), alias.label.end(), ',')) + 1;
      }
      const std::size_t input_arity = plan.arity;
      PlanNode lv = wrap(PlanKind::LateralView, std::move(plan), {lower_expr(call)});
      lv.detail = std::to_string(k);
      lv.arity = input_arity + k;
      std::vector<Expr> outs;
      for (std::size_t i = 0; i < k; ++i) outs.push_back(Expr::column(input_arity + i));
      PlanNode project = wrap(PlanKind::Project, std::move(lv), std::move(outs));
      project.arity = k;
      frames_.pop_back();
      std::vector<NamedColumn> cols;
      for (std::size_t i = 0; i < k; ++i) cols.push_back({"", "", "_c" + std::to_string(i)});
      return finish(std::move(project), std::move(cols), distinct, order, limit, {}, {});
    }

    // aggregation
    bool aggregated = group.has_value();
    std::vector<NodeId> agg_nodes;
    auto collect_aggs = [&](NodeId root) {
      t_.walk(root, [&](NodeId id) {
        if (t_[id].kind == NodeKind::Query) return false;
        if (is_aggregate_call(t_, id)) {
          agg_nodes.push_back(id);
          return false;
        }
        return true;
      });
    };
    for (const Item& it : items) {
      if (it.expr) collect_aggs(*it.expr);
    }
    if (having) collect_aggs(*having);
    if (order) collect_aggs(*order);
    aggregated = aggregated || !agg_nodes.empty();

    std::map<std::string, Expr> post;  // pre-aggregation render -> column of the aggregate
    if (aggregated) {
      PlanNode agg;
      agg.kind = PlanKind::Aggregate;
      if (group) {
        for (NodeId key : t_[*group].children) {
          Expr e = lower_group_key(key, items.size(), [&](const std::string& name) -> std::optional<NodeId> {
            for (const Item& it : items) {
              if (it.expr && it.name == name && t_[*it.expr].kind != NodeKind::ColRef) return it.expr;
            }
            return std::nullopt;
          });
          const std::string r = render(e);
          if (post.count(r) != 0) continue;
          post[r] = Expr::column(agg.keys.size());
          agg.keys.push_back(std::move(e));
        }
      }
      std::vector<Expr> aggs;
      for (NodeId a : agg_nodes) {
        Expr e = lower_expr(a);
        const std::string r = render(e);
        if (post.count(r) != 0) continue;
        aggs.push_back(std::move(e));
        post[r] = Expr::column(agg.keys.size() + aggs.size() - 1);
      }
      agg.exprs = std::move(aggs);
      agg.arity = agg.keys.size() + agg.exprs.size();
      agg.children.push_back(std::move(plan));
      plan = std::move(agg);
    }
    auto lower_post = [&](NodeId e) { return aggregated ? replace(lower_expr(e), post) : lower_expr(e); };

    if (having) plan = wrap(PlanKind::Filter, std::move(plan), {lower_post(t_[*having].children[0])});

    // windows
    std::vector<NodeId> window_nodes;
    auto collect_windows = [&](NodeId root) {
      t_.walk(root, [&](NodeId id) {
        if (t_[id].kind == NodeKind::Query) return false;
        if (t_[id].kind == NodeKind::FunctionCall && has_over(t_, id)) {
          window_nodes.push_back(id);
          return false;
        }
        return true;
      });
    };
    for (const Item& it : items) {
      if (it.expr) collect_windows(*it.expr);
    }
    if (order) collect_windows(*order);
    std::map<std::string, Expr> window_map;
    if (!window_nodes.empty()) {
      PlanNode win;
      win.kind = PlanKind::Window;
      const std::size_t input_arity = plan.arity;
      for (NodeId w : window_nodes) {
        Expr raw = lower_expr(w);
        const std::string r = render(raw);
        if (window_map.count(r) != 0) continue;
        Expr stored = aggregated ? replace_children(raw, post) : raw;
        window_map[r] = Expr::column(input_arity + win.exprs.size());
        win.exprs.push_back(std::move(stored));
      }
      win.arity = input_arity + win.exprs.size();
      win.children.push_back(std::move(plan));
      plan = std::move(win);
    }
    std::map<std::string, Expr> final_map = post;
    final_map.insert(window_map.begin(), window_map.end());
    auto lower_final = [&](NodeId e) { return replace(lower_expr(e), final_map); };

    std::vector<Expr> outputs;
    std::vector<NamedColumn> out_columns;
    for (const Item& it : items) {
      outputs.push_back(it.expr ? lower_final(*it.expr) : replace(Expr::column(*it.star_column), final_map));
      out_columns.push_back({"", "", it.name});
    }
    const PlanNode pre_project = plan;
    (void)pre_project;
    PlanNode project = wrap(PlanKind::Project, std::move(plan), outputs);
    project.arity = outputs.size();
    frames_.pop_back();

    // ORDER BY keys: against the outputs when possible, otherwise below the projection
    std::vector<Expr> above;
    std::vector<Expr> below;
    bool all_above = true;
    if (order) {
      frames_.push_back(base.columns);
      for (NodeId key : t_[*order].children) {
        const NodeId e = t_[key].children[0];
        Expr sort;
        sort.kind = ExprKind::sort_key;
        sort.name = t_[key].label;
        std::optional<std::size_t> out_index;
        std::optional<Expr> lowered;
        if (t_[e].kind == NodeKind::ColRef && t_[e].label.find('.') == std::string::npos) {
          for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i].name == t_[e].label) {
              out_index = i;
              break;
            }
          }
        }
        if (!out_index) {
          lowered = lower_final(e);
          for (std::size_t i = 0; i < outputs.size(); ++i) {
            if (outputs[i] == *lowered) {
              out_index = i;
              break;
            }
          }
        }
        Expr a = sort;
        if (out_index) {
          a.args.push_back(Expr::column(*out_index));
        } else {
          all_above = false;
        }
        Expr b = sort;
        b.args.push_back(out_index && !lowered ? outputs[*out_index] : *lowered);
        above.push_back(std::move(a));
        below.push_back(std::move(b));
      }
      frames_.pop_back();
    }
    if (order && !all_above) {
      // re-project over a sorted input
      PlanNode input = std::move(project.children[0]);
      const std::size_t arity = input.arity;
      PlanNode sorted = wrap(PlanKind::Sort, std::move(input), std::move(below));
      sorted.arity = arity;
      project.children[0] = std::move(sorted);
      order.reset();
    }
    return finish(std::move(project), std::move(out_columns), distinct, order, limit, above, {});
  }

  Relation finish(PlanNode plan, std::vector<NamedColumn> columns, bool distinct,
                  std::optional<NodeId> order, std::optional<NodeId> limit, std::vector<Expr> sort_keys,
                  std::vector<Expr> /*unused*/) {
    const std::size_t arity = plan.arity;
    if (distinct) plan = wrap(PlanKind::Distinct, std::move(plan), {});
    if (order && !sort_keys.empty()) plan = wrap(PlanKind::Sort, std::move(plan), std::move(sort_keys));
    if (limit) {
      plan = wrap(PlanKind::Limit, std::move(plan), {});
      plan.detail = t_[*limit].label;
    }
    plan.arity = arity;
    return {std::move(plan), std::move(columns)};
  }

  static Expr replace_children(const Expr& e, const std::map<std::string, Expr>& map) {
    Expr out = e;
    for (Expr& a : out.args) a = replace(a, map);
    for (Expr& p : out.partition) p = replace(p, map);
    for (Expr& o : out.order) o = replace(o, map);
    return out;
  }

  static PlanNode wrap(PlanKind kind, PlanNode child, std::vector<Expr> exprs) {
    PlanNode node;
    node.kind = kind;
    node.arity = child.arity;
    node.exprs = std::move(exprs);
    node.children.push_back(std::move(child));
    return node;
  }

  template <typename AliasLookup>
  Expr lower_group_key(NodeId key, std::size_t /*items*/, AliasLookup&& alias_lookup) {
    if (t_[key].kind == NodeKind::ColRef && t_[key].label.find('.') == std::string::npos &&
        !resolvable(t_[key].label)) {
      if (auto item = alias_lookup(t_[key].label)) return lower_expr(*item);
    }
    return lower_expr(key);
  }

  // ----------------------------------------------------------- expressions
  bool resolvable(const std::string& label) const {
    for (const NamedColumn& c : frames_.back()) {
      if (c.name == label) return true;
    }
    return false;
  }

  Expr lower_column(const std::string& label) const {
    const std::vector<std::string> parts = split_dotted(label);
    for (std::size_t depth = frames_.size(); depth-- > 0;) {
      const auto& cols = frames_[depth];
      const std::size_t level = frames_.size() - 1 - depth;
      auto field_access = [&](Expr base, std::size_t used) {
        for (std::size_t i = used; i < parts.size(); ++i) {
          base = Expr::op(".", {std::move(base), Expr::literal("'" + parts[i] + "'")});
        }
        return base;
      };
      if (parts.size() >= 2) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (cols[c].qualifier == parts[0] && cols[c].name == parts[1]) {
            return field_access(Expr::column(c, level), 2);
          }
        }
        if (parts.size() >= 3) {
          for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].table == parts[0] + "." + parts[1] && cols[c].name == parts[2]) {
              return field_access(Expr::column(c, level), 3);
            }
          }
        }
      }
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].name == parts[0]) {
          const bool qualifier_elsewhere =
              parts.size() >= 2 && std::any_of(cols.begin(), cols.end(), [&](const NamedColumn& x) {
                return x.qualifier == parts[0];
              });
          if (!qualifier_elsewhere) return field_access(Expr::column(c, level), 1);
        }
      }
    }
    throw Error("unresolved column '" + label + "'");
  }

  std::vector<Expr> lower_all(const std::vector<NodeId>& ids) {
    std::vector<Expr> out;
    for (NodeId id : ids) out.push_back(lower_expr(id));
    return out;
  }

  Expr lower_expr(NodeId id) {
    const Node& n = t_[id];
    switch (n.kind) {
      case NodeKind::ColRef: return lower_column(n.label);
      case NodeKind::Literal: return Expr::literal(normalize_literal(n.label));
      case NodeKind::Star: return Expr::literal("*");
      case NodeKind::BinaryOp: {
        std::string op = n.label;
        if (op == "!=") op = "<>";
        if (op == "==") op = "=";
        return Expr::op(op, lower_all(n.children));
      }
      case NodeKind::UnaryOp:
        if (n.label == "+") return lower_expr(n.children[0]);
        return Expr::op(n.label, lower_all(n.children));
      case NodeKind::InList:
      case NodeKind::Between:
      case NodeKind::Like:
      case NodeKind::IsNull: return Expr::op(n.label, lower_all(n.children));
      case NodeKind::Subscript: return Expr::op(n.label.empty() ? "[]" : n.label, lower_all(n.children));
      case NodeKind::Cast: {
        Expr e;
        e.kind = ExprKind::cast;
        e.name = to_lower(n.label);
        e.args = lower_all(n.children);
        return e;
      }
      case NodeKind::Case: {
        Expr e;
        e.kind = ExprKind::case_;
        e.name = n.label.empty() ? "CASE" : "CASE " + n.label;
        for (NodeId c : n.children) {
          if (t_[c].kind == NodeKind::When) {
            e.args.push_back(lower_expr(t_[c].children[0]));
            e.args.push_back(lower_expr(t_[c].children[1]));
          } else if (t_[c].kind == NodeKind::Else) {
            e.detail = "ELSE";
            e.args.push_back(lower_expr(t_[c].children[0]));
          } else {
            e.args.push_back(lower_expr(c));
          }
        }
        return e;
      }
      case NodeKind::FunctionCall: return lower_call(id);
      case NodeKind::InSubquery:
      case NodeKind::Exists:
      case NodeKind::ScalarSubquery: {
        Expr e;
        e.kind = ExprKind::subquery;
        e.name = n.kind == NodeKind::ScalarSubquery ? "SCALAR" : n.label;
        NodeId query = n.children.back();
        if (n.kind == NodeKind::InSubquery) e.args.push_back(lower_expr(n.children[0]));
        e.subplans.push_back(lower_query(query).plan);
        return e;
      }
      default: unsupported(n.kind);
    }
  }

  Expr lower_call(NodeId id) {
    const Node& n = t_[id];
    Expr e;
    e.name = n.label;
    std::optional<NodeId> over;
    for (NodeId c : n.children) {
      if (t_[c].kind == NodeKind::Distinct) {
        e.detail = "DISTINCT";
      } else if (t_[c].kind == NodeKind::Over) {
        over = c;
      } else {
        e.args.push_back(lower_expr(c));
      }
    }
    if (!over) {
      e.kind = ExprKind::call;
      return e;
    }
    e.kind = ExprKind::window;
    if (!e.detail.empty()) e.name += " DISTINCT";
    e.detail.clear();
    for (NodeId part : t_[*over].children) {
      const Node& p = t_[part];
      if (p.kind == NodeKind::PartitionBy) {
        e.partition = lower_all(p.children);
      } else if (p.kind == NodeKind::OrderBy) {
        for (NodeId key : p.children) {
          Expr k;
          k.kind = ExprKind::sort_key;
          k.name = t_[key].label;
          k.args.push_back(lower_expr(t_[key].children[0]));
          e.order.push_back(std::move(k));
        }
      } else if (p.kind == NodeKind::Frame) {
        e.detail = p.label;
      }
    }
    return e;
  }

  const SyntaxTree& t_;
  const Catalog& catalog_;
  std::vector<std::map<std::string, CteDef>> ctes_;
  std::vector<std::vector<NamedColumn>> frames_;
  std::map<std::string, std::vector<std::string>> local_tables_;
};

}  // namespace

ScriptPlan lower(const SyntaxTree& tree, const Catalog& catalog) {
  if (tree.empty()) throw Error("cannot lower an empty tree");
  return Lowerer(tree, catalog).run();
}

}  // namespace sqldebug
