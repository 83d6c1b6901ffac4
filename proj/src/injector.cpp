#include "sqldebug/injector.hpp"

#include <algorithm>
#include <tuple>

#include "sql_functions.hpp"
#include "sqldebug/parser.hpp"
#include "sqldebug/plan.hpp"

namespace sqldebug {
namespace {

// ---------------------------------------------------------------- helpers

std::vector<NodeId> nodes_of(const SyntaxTree& t, NodeKind kind) {
  std::vector<NodeId> out;
  t.walk(t.root(), [&](NodeId id) {
    if (t[id].kind == kind) out.push_back(id);
    return true;
  });
  std::stable_sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return t[a].span.begin < t[b].span.begin; });
  return out;
}

/// Index of the first token starting at or after `pos`.
std::size_t token_at(const std::vector<Token>& toks, std::size_t pos) {
  auto it = std::lower_bound(toks.begin(), toks.end(), pos,
                             [](const Token& t, std::size_t p) { return t.span.begin < p; });
  return static_cast<std::size_t>(it - toks.begin());
}

/// First significant token at or after `pos` (toks.size() when none).
std::size_t sig_at(const std::vector<Token>& toks, std::size_t pos) {
  std::size_t i = token_at(toks, pos);
  while (i < toks.size() && toks[i].is_trivia()) ++i;
  return i;
}

/// Significant tokens whose start lies in [begin, end).
std::vector<std::size_t> sig_between(const std::vector<Token>& toks, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t i = token_at(toks, begin); i < toks.size() && toks[i].span.begin < end; ++i) {
    if (!toks[i].is_trivia()) out.push_back(i);
  }
  return out;
}

/// Span from token `i` up to the next significant token (the token plus the
/// whitespace after it).
Span token_with_trailing(const std::vector<Token>& toks, std::size_t i) {
  std::size_t j = i + 1;
  while (j < toks.size() && toks[j].kind == TokenKind::whitespace) ++j;
  return {toks[i].span.begin, j < toks.size() ? toks[j].span.begin : toks[i].span.end};
}

std::string last_segment(const std::string& dotted) { return dotted.substr(dotted.rfind('.') + 1); }

bool is_comparison(const std::string& op) {
  return op == "=" || op == "<>" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=";
}

bool is_date_literal(const std::string& text) {
  if (text.size() != 12 || text.front() != '\'' || text.back() != '\'') return false;
  for (std::size_t i = 1; i <= 10; ++i) {
    const char c = text[i];
    if (i == 5 || i == 8) {
      if (c != '-') return false;
    } else if (c < '0' || c > '9') {
      return false;
    }
  }
  return true;
}

bool temporal_column(const Catalog* catalog, const std::string& name) {
  if (catalog == nullptr) return false;
  const std::string col = to_lower(last_segment(name));
  for (const auto& [key, t] : catalog->tables()) {
    for (const Column& c : t.columns) {
      if (to_lower(c.name) == col && is_temporal(c.type)) return true;
    }
  }
  return false;
}

/// Function calls without OVER, in source order.
std::vector<NodeId> plain_calls(const SyntaxTree& t, std::string_view name = {}) {
  std::vector<NodeId> out;
  for (NodeId id : nodes_of(t, NodeKind::FunctionCall)) {
    if (detail::has_over(t, id)) continue;
    if (!name.empty() && t[id].label != name) continue;
    out.push_back(id);
  }
  return out;
}

/// Arguments of a call (children other than DISTINCT / OVER markers).
std::vector<NodeId> call_args(const SyntaxTree& t, NodeId call) {
  std::vector<NodeId> out;
  for (NodeId c : t[call].children) {
    if (t[c].kind != NodeKind::Distinct && t[c].kind != NodeKind::Over) out.push_back(c);
  }
  return out;
}

/// `a.x = b.y` join conditions with qualified column references on both sides.
std::vector<NodeId> qualified_equi_conditions(const SyntaxTree& t) {
  std::vector<NodeId> out;
  for (NodeId on : nodes_of(t, NodeKind::On)) {
    t.walk(t[on].children[0], [&](NodeId id) {
      const Node& n = t[id];
      if (n.kind == NodeKind::BinaryOp && n.label == "AND") return true;
      if (n.kind == NodeKind::BinaryOp && n.label == "=" && t[n.children[0]].kind == NodeKind::ColRef &&
          t[n.children[1]].kind == NodeKind::ColRef && t[n.children[0]].label.find('.') != std::string::npos &&
          t[n.children[1]].label.find('.') != std::string::npos) {
        out.push_back(id);
      }
      return false;
    });
  }
  return out;
}

std::string qualifier_of(const std::string& dotted) { return dotted.substr(0, dotted.rfind('.')); }

// --------------------------------------------------------- syntax operators

std::vector<Edit> delete_lateral_view(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId lv : nodes_of(c.tree, NodeKind::LateralView)) {
    if (!c.tree[lv].label.empty()) continue;  // LATERAL VIEW OUTER
    const std::size_t lateral = sig_at(c.tokens, c.tree[lv].span.begin);
    const std::size_t view = sig_at(c.tokens, c.tokens[lateral].span.end);
    if (!c.tokens[lateral].is_keyword("LATERAL") || !c.tokens[view].is_word("VIEW")) continue;
    out.push_back({{c.tokens[lateral].span.begin, token_with_trailing(c.tokens, view).end}, ""});
  }
  return out;
}

std::vector<Edit> cast_multiple_as(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId cast : nodes_of(c.tree, NodeKind::Cast)) {
    // the target type is the text between AS and the closing parenthesis
    const std::size_t as = sig_at(c.tokens, c.tree[c.tree[cast].children[0]].span.end);
    const std::size_t close = token_at(c.tokens, c.tree[cast].span.end) - 1;
    if (!c.tokens[as].is_keyword("AS") || !c.tokens[close].is_punct(')')) continue;
    const std::size_t type = sig_at(c.tokens, c.tokens[as].span.end);
    std::size_t type_end = close;
    while (type_end > type && c.tokens[type_end - 1].is_trivia()) --type_end;
    const std::size_t begin = c.tokens[type].span.begin;
    const std::size_t end = c.tokens[type_end - 1].span.end;
    out.push_back({{end, end}, " AS " + c.tree.source().substr(begin, end - begin)});
  }
  return out;
}

std::vector<Edit> date_add_missing_argument(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId call : plain_calls(c.tree)) {
    const std::string& name = c.tree[call].label;
    if (name != "date_add" && name != "date_sub") continue;
    const auto args = call_args(c.tree, call);
    if (args.size() != 2) continue;
    out.push_back({{c.tree[args[0]].span.end, c.tree[args[1]].span.end}, ""});
  }
  return out;
}

std::vector<Edit> case_missing_end(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId cs : nodes_of(c.tree, NodeKind::Case)) {
    const Span s = c.tree[cs].span;
    const std::size_t end = token_at(c.tokens, s.end) - 1;
    if (!c.tokens[end].is_keyword("END")) continue;
    std::size_t begin = end;
    while (begin > 0 && c.tokens[begin - 1].kind == TokenKind::whitespace) --begin;
    out.push_back({{c.tokens[begin].span.begin, c.tokens[end].span.end}, ""});
  }
  return out;
}

std::vector<Edit> drop_group_key(const SiteContext& c) {
  std::vector<Edit> out;
  const SyntaxTree& t = c.tree;
  for (NodeId select : nodes_of(t, NodeKind::Select)) {
    const long group = t.find_child(select, NodeKind::GroupBy);
    const long proj = t.find_child(select, NodeKind::ProjList);
    if (group < 0 || proj < 0) continue;
    const auto& keys = t[static_cast<NodeId>(group)].children;
    if (keys.size() < 2) continue;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (t[keys[i]].kind != NodeKind::ColRef) continue;
      const auto& items = t[static_cast<NodeId>(proj)].children;
      const bool selected = std::any_of(items.begin(), items.end(), [&](NodeId item) {
        return t[item].kind == NodeKind::ColRef && t[item].label == t[keys[i]].label;
      });
      if (!selected) continue;
      const Span s = i == 0 ? Span{t[keys[0]].span.begin, t[keys[1]].span.begin}
                            : Span{t[keys[i - 1]].span.end, t[keys[i]].span.end};
      out.push_back({s, ""});
    }
  }
  return out;
}

std::vector<Edit> delete_where_connector(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId where : nodes_of(c.tree, NodeKind::Where)) {
    const Node& pred = c.tree[c.tree[where].children[0]];
    if (pred.kind != NodeKind::BinaryOp || pred.label != "AND") continue;
    const Span l = c.tree[pred.children[0]].span;
    const Span r = c.tree[pred.children[1]].span;
    for (std::size_t i : sig_between(c.tokens, l.end, r.begin)) {
      if (c.tokens[i].is_keyword("AND")) out.push_back({token_with_trailing(c.tokens, i), ""});
    }
  }
  return out;
}

std::vector<Edit> delete_closing_paren(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId call : plain_calls(c.tree)) {
    const Span s = c.tree[call].span;
    const std::size_t close = token_at(c.tokens, s.end) - 1;
    if (!c.tokens[close].is_punct(')') || call_args(c.tree, call).empty()) continue;
    out.push_back({c.tokens[close].span, ""});
  }
  return out;
}

std::vector<Edit> column_typo(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId proj : nodes_of(c.tree, NodeKind::ProjList)) {
    c.tree.walk(proj, [&](NodeId id) {
      if (c.tree[id].kind == NodeKind::Query) return false;
      if (c.tree[id].kind == NodeKind::ColRef) {
        const Span s = c.tree[id].span;
        const char last = c.tree.source()[s.end - 1];
        if ((last >= 'a' && last <= 'z') || (last >= 'A' && last <= 'Z')) {
          out.push_back({{s.end, s.end}, std::string(1, last)});
        }
      }
      return true;
    });
  }
  std::stable_sort(out.begin(), out.end(), [](const Edit& a, const Edit& b) { return a.span.begin < b.span.begin; });
  return out;
}

std::vector<Edit> unqualify_join_column(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId eq : qualified_equi_conditions(c.tree)) {
    const Node& l = c.tree[c.tree[eq].children[0]];
    const Node& r = c.tree[c.tree[eq].children[1]];
    if (to_lower(last_segment(l.label)) != to_lower(last_segment(r.label))) continue;
    out.push_back({{l.span.begin, l.span.begin + qualifier_of(l.label).size() + 1}, ""});
  }
  return out;
}

std::vector<Edit> double_comma(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId proj : nodes_of(c.tree, NodeKind::ProjList)) {
    const auto& items = c.tree[proj].children;
    if (items.size() < 2) continue;
    for (std::size_t i : sig_between(c.tokens, c.tree[items[0]].span.end, c.tree[items[1]].span.begin)) {
      if (c.tokens[i].is_punct(',')) out.push_back({{c.tokens[i].span.end, c.tokens[i].span.end}, ","});
    }
  }
  return out;
}

std::vector<Edit> delete_statement_semicolon(const SiteContext& c) {
  std::vector<Edit> out;
  std::vector<NodeId> stmts;
  for (NodeId s : c.tree[c.tree.root()].children) {
    if (c.tree[s].kind != NodeKind::Comment) stmts.push_back(s);
  }
  for (std::size_t k = 0; k + 1 < stmts.size(); ++k) {
    for (std::size_t i : sig_between(c.tokens, c.tree[stmts[k]].span.end, c.tree[stmts[k + 1]].span.begin)) {
      if (c.tokens[i].is_punct(';')) {
        out.push_back({c.tokens[i].span, ""});
        break;
      }
    }
  }
  return out;
}

std::vector<Edit> insert_drop_last_column(const SiteContext& c) {
  std::vector<Edit> out;
  const SyntaxTree& t = c.tree;
  for (NodeId insert : nodes_of(t, NodeKind::Insert)) {
    NodeId body = t[insert].children.back();
    while (t[body].kind == NodeKind::Query) body = t[body].children.back();
    if (t[body].kind != NodeKind::Select) continue;
    const long proj = t.find_child(body, NodeKind::ProjList);
    const auto& items = t[static_cast<NodeId>(proj)].children;
    if (items.size() < 2) continue;
    const bool star = std::any_of(items.begin(), items.end(), [&](NodeId i) { return t[i].kind == NodeKind::Star; });
    if (star) continue;
    out.push_back({{t[items[items.size() - 2]].span.end, t[items.back()].span.end}, ""});
  }
  return out;
}

std::vector<Edit> concat_ws_to_wm_concat(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId call : plain_calls(c.tree, "concat_ws")) {
    const std::size_t name = sig_at(c.tokens, c.tree[call].span.begin);
    out.push_back({c.tokens[name].span, "wm_concat"});
  }
  return out;
}

std::vector<Edit> date_literal_as_number(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId op : nodes_of(c.tree, NodeKind::BinaryOp)) {
    const Node& n = c.tree[op];
    if (!is_comparison(n.label)) continue;
    for (int side = 0; side < 2; ++side) {
      const Node& col = c.tree[n.children[static_cast<std::size_t>(side)]];
      const Node& lit = c.tree[n.children[static_cast<std::size_t>(1 - side)]];
      if (col.kind != NodeKind::ColRef || lit.kind != NodeKind::Literal) continue;
      if (!is_date_literal(lit.label) || !temporal_column(c.catalog, col.label)) continue;
      std::string digits;
      for (char ch : lit.label) {
        if (ch >= '0' && ch <= '9') digits += ch;
      }
      out.push_back({lit.span, digits});
    }
  }
  return out;
}

// ------------------------------------------------------- semantic operators

std::vector<Edit> union_all_to_union(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId set : nodes_of(c.tree, NodeKind::SetOp)) {
    if (c.tree[set].label != "UNION ALL") continue;
    const auto& kids = c.tree[set].children;
    for (std::size_t i : sig_between(c.tokens, c.tree[kids[0]].span.end, c.tree[kids[1]].span.begin)) {
      if (c.tokens[i].is_keyword("ALL")) {
        std::size_t prev = i;
        while (prev > 0 && c.tokens[prev - 1].kind == TokenKind::whitespace) --prev;
        out.push_back({{c.tokens[prev].span.begin, c.tokens[i].span.end}, ""});
      }
    }
  }
  return out;
}

std::vector<Edit> is_null_to_equals_null(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId id : nodes_of(c.tree, NodeKind::IsNull)) {
    if (c.tree[id].label != "IS NULL") continue;
    out.push_back({{c.tree[c.tree[id].children[0]].span.end, c.tree[id].span.end}, " = NULL"});
  }
  return out;
}

std::vector<Edit> row_number_to_rank(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId call : nodes_of(c.tree, NodeKind::FunctionCall)) {
    if (c.tree[call].label != "row_number") continue;
    out.push_back({c.tokens[sig_at(c.tokens, c.tree[call].span.begin)].span, "rank"});
  }
  return out;
}

std::vector<Edit> left_join_to_inner(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId join : nodes_of(c.tree, NodeKind::Join)) {
    if (c.tree[join].label != "LEFT") continue;
    const auto& kids = c.tree[join].children;
    const auto toks = sig_between(c.tokens, c.tree[kids[0]].span.end, c.tree[kids[1]].span.begin);
    if (toks.empty() || !c.tokens[toks.front()].is_keyword("LEFT")) continue;
    const std::size_t join_kw = toks.back();
    out.push_back({{c.tokens[toks.front()].span.begin, c.tokens[join_kw].span.begin}, "INNER "});
  }
  return out;
}

std::vector<Edit> change_concat_ws_separator(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId call : plain_calls(c.tree, "concat_ws")) {
    const auto args = call_args(c.tree, call);
    if (args.empty() || c.tree[args[0]].kind != NodeKind::Literal || c.tree[args[0]].label != "','") continue;
    out.push_back({c.tree[args[0]].span, "';'"});
  }
  return out;
}

std::vector<Edit> drop_select_distinct(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId select : nodes_of(c.tree, NodeKind::Select)) {
    const long d = c.tree.find_child(select, NodeKind::Distinct);
    if (d < 0) continue;
    const std::size_t i = sig_at(c.tokens, c.tree[static_cast<NodeId>(d)].span.begin);
    out.push_back({token_with_trailing(c.tokens, i), ""});
  }
  return out;
}

std::vector<Edit> drop_cast(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId cast : nodes_of(c.tree, NodeKind::Cast)) {
    out.push_back({c.tree[cast].span, std::string(c.tree.text(c.tree[cast].children[0]))});
  }
  return out;
}

std::vector<Edit> wrong_join_qualifier(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId eq : qualified_equi_conditions(c.tree)) {
    const Node& l = c.tree[c.tree[eq].children[0]];
    const Node& r = c.tree[c.tree[eq].children[1]];
    const std::string lq = qualifier_of(l.label);
    const std::string rq = qualifier_of(r.label);
    if (lq == rq) continue;
    out.push_back({{l.span.begin, l.span.begin + lq.size()}, rq});
  }
  return out;
}

std::vector<Edit> like_drop_leading_wildcard(const SiteContext& c) {
  std::vector<Edit> out;
  for (NodeId like : nodes_of(c.tree, NodeKind::Like)) {
    if (c.tree[like].label != "LIKE") continue;
    const Node& pattern = c.tree[c.tree[like].children[1]];
    if (pattern.kind != NodeKind::Literal || pattern.label.size() < 4 || pattern.label.rfind("'%", 0) != 0) continue;
    out.push_back({{pattern.span.begin + 1, pattern.span.begin + 2}, ""});
  }
  return out;
}

std::vector<MutationOperator> build_operators() {
  using T = TaskType;
  return {
      {"delete_lateral_view", tax::missing_lateral_view(), T::syntax, "LATERAL VIEW keywords removed",
       delete_lateral_view},
      {"cast_multiple_as", tax::multiple_as_in_cast(), T::syntax, "CAST with a repeated AS clause", cast_multiple_as},
      {"date_add_missing_argument", tax::date_add_parameter(), T::syntax, "date_add called without its day count",
       date_add_missing_argument},
      {"case_missing_end", tax::case_missing_end(), T::syntax, "CASE expression without END", case_missing_end},
      {"drop_group_key", tax::missing_grouping_column(), T::syntax, "selected column missing from GROUP BY",
       drop_group_key},
      {"delete_where_connector", tax::missing_connector(), T::syntax, "WHERE conditions without AND",
       delete_where_connector},
      {"delete_closing_paren", tax::missing_closing_paren(), T::syntax, "function call without closing parenthesis",
       delete_closing_paren},
      {"column_typo", tax::field_not_exist(), T::syntax, "misspelled column name", column_typo},
      {"unqualify_join_column", tax::ambiguous_column(), T::syntax, "unqualified column in a join condition",
       unqualify_join_column},
      {"double_comma", tax::punctuation_error(), T::syntax, "doubled comma in the select list", double_comma},
      {"delete_statement_semicolon", tax::missing_semicolon(), T::syntax, "statements not separated by a semicolon",
       delete_statement_semicolon},
      {"insert_drop_last_column", tax::insert_column_count(), T::syntax, "INSERT selecting too few columns",
       insert_drop_last_column},
      {"concat_ws_to_wm_concat", tax::unsupported_wm_concat(), T::syntax, "wm_concat used instead of concat_ws",
       concat_ws_to_wm_concat},
      {"date_literal_as_number", tax::type_mismatch(), T::syntax, "date column compared with a number",
       date_literal_as_number},
      {"union_all_to_union", tax::union_misuse(), T::semantic, "UNION deduplicates rows that should be kept",
       union_all_to_union},
      {"is_null_to_equals_null", tax::null_equality_semantic(), T::semantic, "NULL check written with =",
       is_null_to_equals_null},
      {"row_number_to_rank", tax::rank_misuse(), T::semantic, "rank used where row_number is needed",
       row_number_to_rank},
      {"left_join_to_inner", tax::inner_instead_of_left(), T::semantic, "INNER JOIN drops unmatched rows",
       left_join_to_inner},
      {"change_concat_ws_separator", tax::separator_rule(), T::semantic, "list joined with the wrong separator",
       change_concat_ws_separator},
      {"drop_select_distinct", tax::incorrect_output(), T::semantic, "duplicate rows in the output",
       drop_select_distinct},
      {"drop_cast", tax::implicit_cast_semantics(), T::semantic, "value left in its original type", drop_cast},
      {"wrong_join_qualifier", tax::wrong_qualifier(), T::semantic, "join condition compares a table with itself",
       wrong_join_qualifier},
      {"like_drop_leading_wildcard", tax::incorrect_like(), T::semantic, "LIKE pattern misses leading matches",
       like_drop_leading_wildcard},
  };
}

bool overlaps(const Span& site, const Span& other) {
  if (site.size() == 0) return other.begin < site.begin && site.begin < other.end;
  return site.begin < other.end && other.begin < site.end;
}

}  // namespace

bool MutationOperator::applicable(const FeatureSet& features) const {
  const auto it = features.operator_sites.find(id);
  return it != features.operator_sites.end() && it->second > 0;
}

const std::vector<MutationOperator>& mutation_operators() {
  static const std::vector<MutationOperator> ops = build_operators();
  return ops;
}

const MutationOperator& find_operator(std::string_view id) {
  for (const MutationOperator& op : mutation_operators()) {
    if (op.id == id) return op;
  }
  throw Error("unknown mutation operator '" + std::string(id) + "'");
}

std::string apply_edit(std::string_view text, const Edit& edit) {
  if (edit.span.begin > edit.span.end || edit.span.end > text.size()) throw Error("edit outside the text");
  std::string out(text.substr(0, edit.span.begin));
  out += edit.replacement;
  out += text.substr(edit.span.end);
  return out;
}

FeatureSet structural_profile(const SyntaxTree& tree, const Catalog* catalog) {
  FeatureSet f;
  if (tree.empty()) return f;
  for (NodeId s : tree[tree.root()].children) {
    if (tree[s].kind != NodeKind::Comment) ++f.statements;
  }
  tree.walk(tree.root(), [&](NodeId id) {
    const Node& n = tree[id];
    switch (n.kind) {
      case NodeKind::Case: f.has_case = true; break;
      case NodeKind::SetOp: f.has_union_all = f.has_union_all || n.label == "UNION ALL"; break;
      case NodeKind::LateralView: f.has_lateral_view = true; break;
      case NodeKind::Over: f.has_window = true; break;
      case NodeKind::GroupBy: f.has_group_by = true; break;
      case NodeKind::Insert: f.has_insert = true; break;
      case NodeKind::With: f.has_cte = true; break;
      case NodeKind::Distinct: f.has_distinct = true; break;
      case NodeKind::Cast: f.has_cast = true; break;
      case NodeKind::Like: f.has_like = true; break;
      case NodeKind::IsNull: ++f.null_comparison_sites; break;
      case NodeKind::Join: ++f.joins[n.label]; break;
      case NodeKind::FunctionCall: ++f.functions[n.label]; break;
      default: break;
    }
    return true;
  });
  const std::vector<Token> tokens = tokenize(tree.source());
  const SiteContext ctx{tree, tokens, catalog};
  for (const MutationOperator& op : mutation_operators()) {
    const std::size_t n = op.sites(ctx).size();
    if (n > 0) f.operator_sites[op.id] = n;
  }
  return f;
}

std::vector<const MutationOperator*> candidate_bugs(const FeatureSet& features, const TaxonomyRegistry& registry,
                                                    std::size_t k, std::optional<TaskType> only) {
  std::vector<const MutationOperator*> out;
  for (const MutationOperator& op : mutation_operators()) {
    if (only && op.bug_class != *only) continue;
    if (op.applicable(features)) out.push_back(&op);
  }
  auto key = [&](const MutationOperator* op) {
    const TaxonomyEntry* e = registry.find(op->taxonomy);
    const int count = e != nullptr ? e->count() : 0;
    return std::make_tuple(-count, features.operator_sites.at(op->id), op->taxonomy, op->id);
  };
  std::stable_sort(out.begin(), out.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
  if (out.size() > k) out.resize(k);
  return out;
}

Verification verify_injection(const InjectionResult& result, const SqlScript& reference, const Catalog& catalog,
                              double budget) {
  const auto fail = [](std::string reason) { return Verification{false, std::move(reason)}; };
  const auto is_error = [](const Diagnostic& x) { return x.severity == Severity::error; };
  const auto ref_diags = lint(reference, catalog);
  if (std::any_of(ref_diags.begin(), ref_diags.end(), is_error)) return fail("reference fails validation");
  if (result.site_span.end > reference.text.size() ||
      apply_edit(reference.text, {result.site_span, result.replacement}) != result.issue_sql.text) {
    return fail("bytes outside the site changed");
  }
  for (const Token& t : tokenize_lenient(reference.text).tokens) {
    if (t.kind == TokenKind::comment && overlaps(result.site_span, t.span)) return fail("comment modified");
  }
  const ScriptDistance d = script_distance(result.issue_sql, reference);
  if (d.distance.value() > budget) return fail("budget exceeded");

  const auto diags = lint(result.issue_sql, catalog);
  const bool has_error = std::any_of(diags.begin(), diags.end(), is_error);
  if (result.bug_class == TaskType::syntax) {
    if (!has_error) return fail("issue passes validation");
    // The first error becomes the instance's error message, so it must carry
    // the operator's category.
    const auto first = std::find_if(diags.begin(), diags.end(), is_error);
    if (first->taxonomy.level1 != result.taxonomy.level1) return fail("diagnostic level1 mismatch");
    return {true, "ok"};
  }
  if (has_error) return fail("issue fails validation");
  const auto issue_plan = canonical_plan(result.issue_sql, catalog);
  const auto ref_plan = canonical_plan(reference, catalog);
  if (!issue_plan || !ref_plan) return fail("issue does not lower");
  if (plans_isomorphic(*issue_plan, *ref_plan)) return fail("no semantic effect");
  return {true, "ok"};
}

InjectionResult inject(const SqlScript& reference, const MutationOperator& op, const Catalog& catalog, double budget) {
  const SyntaxTree tree = parse_script(reference);
  const std::vector<Token> tokens = tokenize(reference.text);
  const auto sites = op.sites({tree, tokens, &catalog});
  if (sites.empty()) throw Error("operator " + op.id + ": no applicable site");
  std::string last_reason;
  for (const Edit& edit : sites) {
    InjectionResult r;
    r.operator_id = op.id;
    r.issue_sql = SqlScript(apply_edit(reference.text, edit), reference.dialect);
    r.taxonomy = op.taxonomy;
    r.bug_class = op.bug_class;
    r.site_span = edit.span;
    r.replacement = edit.replacement;
    const Verification v = verify_injection(r, reference, catalog, budget);
    if (!v.ok) {
      last_reason = v.reason;
      continue;
    }
    const ScriptDistance d = script_distance(r.issue_sql, reference);
    r.distance = d.distance;
    r.fallback_used = d.fallback_used;
    r.diagnostics = lint(r.issue_sql, catalog);
    return r;
  }
  throw Error("operator " + op.id + ": no site accepted (" + last_reason + ")");
}

}  // namespace sqldebug
