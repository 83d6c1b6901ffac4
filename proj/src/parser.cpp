#include "sqldebug/parser.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "sql_functions.hpp"

namespace sqldebug {
namespace {

constexpr std::array kClauseKeywords = {"FROM",  "WHERE", "GROUP", "HAVING", "ORDER",
                                        "LIMIT", "UNION", "SELECT", "JOIN",  "ON"};

constexpr std::array kStatementStarts = {"SELECT", "WITH", "INSERT", "CREATE"};

bool near_keyword(const Token& tok) {
  if (tok.kind != TokenKind::identifier) return false;
  const std::string up = to_upper(tok.text);
  if (up.size() < 4) return false;
  return std::any_of(kClauseKeywords.begin(), kClauseKeywords.end(), [&](const char* kw) {
    return detail::levenshtein(up, kw) == 1;
  });
}

std::string describe(const Token* tok) {
  if (tok == nullptr) return "end of input";
  return "'" + tok->text + "'";
}

std::string_view fault_title(GrammarFault fault) {
  switch (fault) {
    case GrammarFault::missing_select_list: return "Missing column list after SELECT";
    case GrammarFault::missing_select: return "Missing SELECT before FROM clause";
    case GrammarFault::missing_from_source: return "Missing FROM clause source";
    case GrammarFault::multiple_where: return "Multiple WHERE";
    case GrammarFault::clause_order: return "Incorrect clause ordering";
    case GrammarFault::missing_connector: return "Missing logical connector";
    case GrammarFault::with_not_first: return "WITH AS not first";
    case GrammarFault::cte_trailing_comma: return "Trailing comma after last view";
    case GrammarFault::keyword_spelling: return "Keyword spelling error";
    case GrammarFault::spaced_not_equal: return "Space in !=";
    case GrammarFault::missing_closing_paren: return "Missing closing parenthesis";
    case GrammarFault::redundant_as: return "Redundant AS";
    case GrammarFault::case_missing_end: return "Missing END or THEN in CASE WHEN";
    case GrammarFault::case_multiple_end: return "Multiple END in CASE WHEN";
    case GrammarFault::in_missing_argument: return "Missing argument in IN";
    case GrammarFault::cast_multiple_as: return "Multiple AS in CAST";
    case GrammarFault::missing_lateral_view: return "Missing LATERAL VIEW";
    case GrammarFault::lateral_view_alias: return "Missing alias for LATERAL VIEW function output";
    case GrammarFault::punctuation: return "Punctuation error";
    case GrammarFault::quoted_alias: return "Incorrect quote type for alias";
    case GrammarFault::missing_semicolon: return "Missing semicolon between statements";
    case GrammarFault::create_table: return "Table creation error";
    case GrammarFault::insert_syntax: return "Insert error";
    case GrammarFault::empty_script: return "Empty script";
    case GrammarFault::unterminated_literal: return "Unterminated literal";
    case GrammarFault::unexpected_end: return "Unexpected end of input";
    case GrammarFault::unexpected_token: return "Syntax error";
  }
  return "Syntax error";
}

class Parser {
 public:
  Parser(std::string source, std::vector<Token> tokens, std::ptrdiff_t lex_error_index,
         std::string lex_error_message)
      : source_(std::move(source)),
        tokens_(std::move(tokens)),
        lex_error_index_(lex_error_index),
        lex_error_message_(std::move(lex_error_message)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!tokens_[i].is_trivia()) sig_.push_back(i);
    }
  }

  SyntaxTree parse(bool recover, std::vector<ParseError>* errors) {
    std::vector<NodeId> statements;
    while (pos_ < sig_.size()) {
      if (cur().is_punct(';')) {
        ++pos_;
        continue;
      }
      const std::size_t start = pos_;
      const std::size_t mark = nodes_.size();
      try {
        NodeId stmt = parse_statement();
        if (pos_ < sig_.size() && !cur().is_punct(';')) {
          const Token& t = cur();
          const bool starts_stmt = std::any_of(kStatementStarts.begin(), kStatementStarts.end(),
                                               [&](const char* kw) { return t.is_keyword(kw); });
          if (starts_stmt) fail(GrammarFault::missing_semicolon, {"';'"});
          fail(GrammarFault::unexpected_token, {"';'", "end of input"});
        }
        statements.push_back(stmt);
      } catch (const ParseFailure& failure) {
        if (!recover) throw;
        nodes_.resize(mark);
        errors->push_back(failure.error());
        std::size_t end = start;
        while (end < sig_.size() && !tok(end).is_punct(';')) ++end;
        Node raw;
        raw.kind = NodeKind::Raw;
        raw.span = {tok(start).span.begin, tok(end - 1).span.end};
        raw.label = source_.substr(raw.span.begin, raw.span.size());
        nodes_.push_back(std::move(raw));
        statements.push_back(static_cast<NodeId>(nodes_.size() - 1));
        pos_ = end;
      }
    }
    for (const Token& t : tokens_) {
      if (t.kind != TokenKind::comment) continue;
      Node c;
      c.kind = NodeKind::Comment;
      c.label = t.text;
      c.span = t.span;
      nodes_.push_back(std::move(c));
      statements.push_back(static_cast<NodeId>(nodes_.size() - 1));
    }
    std::stable_sort(statements.begin(), statements.end(), [&](NodeId a, NodeId b) {
      return nodes_[a].span.begin < nodes_[b].span.begin;
    });
    Node root;
    root.kind = NodeKind::Script;
    root.children = std::move(statements);
    root.span = {0, source_.size()};
    nodes_.push_back(std::move(root));
    const auto root_id = static_cast<NodeId>(nodes_.size() - 1);
    return SyntaxTree(std::move(source_), std::move(nodes_), root_id);
  }

 private:
  // ---------------------------------------------------------------- tokens
  [[nodiscard]] bool at_end() const { return pos_ >= sig_.size(); }
  [[nodiscard]] const Token& tok(std::size_t sig_index) const { return tokens_[sig_[sig_index]]; }
  [[nodiscard]] const Token& cur() const { return tok(pos_); }
  [[nodiscard]] const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < sig_.size() ? &tok(pos_ + ahead) : nullptr;
  }
  [[nodiscard]] bool kw(std::string_view upper, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t != nullptr && t->is_keyword(upper);
  }
  [[nodiscard]] bool word(std::string_view upper, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t != nullptr && t->is_word(upper);
  }
  [[nodiscard]] bool punct(char c, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t != nullptr && t->is_punct(c);
  }
  [[nodiscard]] bool op(std::string_view o, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t != nullptr && t->is_op(o);
  }

  const Token& advance() {
    if (at_end()) fail(GrammarFault::unexpected_end, {});
    if (lex_error_index_ >= 0 && sig_[pos_] == static_cast<std::size_t>(lex_error_index_)) {
      ParseError err;
      err.message = lex_error_message_;
      err.span = cur().span;
      err.fault = GrammarFault::unterminated_literal;
      throw ParseFailure(std::move(err));
    }
    return tokens_[sig_[pos_++]];
  }

  bool accept_kw(std::string_view upper) {
    if (!kw(upper)) return false;
    advance();
    return true;
  }
  bool accept_word(std::string_view upper) {
    if (!word(upper)) return false;
    advance();
    return true;
  }
  bool accept_punct(char c) {
    if (!punct(c)) return false;
    advance();
    return true;
  }
  void expect_kw(std::string_view upper, GrammarFault fault = GrammarFault::unexpected_token) {
    if (!accept_kw(upper)) fail(fault, {std::string(upper)});
  }
  void expect_punct(char c, GrammarFault fault = GrammarFault::unexpected_token) {
    if (!accept_punct(c)) fail(fault, {std::string("'") + c + "'"});
  }

  [[noreturn]] void fail(GrammarFault fault, std::vector<std::string> expected) {
    const Token* found = peek();
    if (fault == GrammarFault::unexpected_token || fault == GrammarFault::unexpected_end) {
      if (context_fault_) {
        fault = *context_fault_;
      } else if (found != nullptr && found->is_keyword("END")) {
        fault = GrammarFault::case_multiple_end;
      } else if (pos_ > 0 && near_keyword(tok(pos_ - 1))) {
        fault = GrammarFault::keyword_spelling;
      } else if (found != nullptr && found->kind == TokenKind::punctuation) {
        fault = GrammarFault::punctuation;
      }
    }
    ParseError err;
    err.fault = fault;
    err.expected = std::move(expected);
    err.span = found != nullptr ? found->span : Span{source_.size(), source_.size()};
    err.message = std::string(fault_title(fault));
    if (!err.expected.empty()) {
      err.message += ": expected ";
      for (std::size_t i = 0; i < err.expected.size(); ++i) {
        if (i > 0) err.message += i + 1 == err.expected.size() ? " or " : ", ";
        err.message += err.expected[i];
      }
      err.message += ", found " + describe(found);
    } else {
      err.message += " at " + describe(found);
    }
    throw ParseFailure(std::move(err));
  }

  // ----------------------------------------------------------------- nodes
  NodeId make(NodeKind kind, std::string label, std::vector<NodeId> children, std::size_t first) {
    Node n;
    n.kind = kind;
    n.label = std::move(label);
    n.children = std::move(children);
    const std::size_t last = pos_ == 0 ? 0 : pos_ - 1;
    n.span = {tok(first).span.begin, tok(std::max(first, last)).span.end};
    for (NodeId c : n.children) {
      n.span.begin = std::min(n.span.begin, nodes_[c].span.begin);
      n.span.end = std::max(n.span.end, nodes_[c].span.end);
    }
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId leaf(NodeKind kind, std::string label) {
    const std::size_t first = pos_ - 1;
    return make(kind, std::move(label), {}, first);
  }

  static std::string ident_text(const Token& t) {
    if (t.kind == TokenKind::quoted_identifier) return t.text.substr(1, t.text.size() - 2);
    return to_lower(t.text);
  }

  [[nodiscard]] bool is_name(const Token* t) const {
    return t != nullptr &&
           (t->kind == TokenKind::identifier || t->kind == TokenKind::quoted_identifier);
  }

  // ------------------------------------------------------------ statements
  NodeId parse_statement() {
    const std::size_t start = pos_;
    if (kw("WITH")) {
      NodeId with = parse_with();
      if (kw("INSERT")) return parse_insert(start, with);
      NodeId body = parse_query_body();
      return make(NodeKind::Query, "", {with, body}, start);
    }
    if (kw("SELECT") || punct('(')) {
      NodeId body = parse_query_body();
      return make(NodeKind::Query, "", {body}, start);
    }
    if (kw("INSERT")) return parse_insert(start, std::nullopt);
    if (kw("CREATE")) return parse_create();
    if (kw("FROM")) fail(GrammarFault::missing_select, {"SELECT"});
    if (is_name(peek())) fail(GrammarFault::keyword_spelling, {"SELECT", "WITH", "INSERT", "CREATE"});
    fail(GrammarFault::unexpected_token, {"SELECT", "WITH", "INSERT", "CREATE"});
  }

  NodeId parse_with() {
    const std::size_t start = pos_;
    expect_kw("WITH");
    std::vector<NodeId> ctes;
    while (true) {
      const std::size_t cte_start = pos_;
      if (!is_name(peek())) {
        if (!ctes.empty() && (kw("SELECT") || kw("INSERT"))) {
          fail(GrammarFault::cte_trailing_comma, {"identifier"});
        }
        fail(GrammarFault::unexpected_token, {"identifier"});
      }
      std::string name = ident_text(advance());
      std::vector<NodeId> kids;
      if (punct('(')) {
        const std::size_t cl_start = pos_;
        advance();
        std::vector<NodeId> cols;
        do {
          if (!is_name(peek())) fail(GrammarFault::unexpected_token, {"identifier"});
          cols.push_back(leaf_after_advance(NodeKind::Identifier));
        } while (accept_punct(','));
        expect_punct(')', GrammarFault::missing_closing_paren);
        kids.push_back(make(NodeKind::ColumnList, "", std::move(cols), cl_start));
      }
      expect_kw("AS");
      expect_punct('(');
      kids.push_back(parse_query_expr());
      expect_punct(')', GrammarFault::missing_closing_paren);
      ctes.push_back(make(NodeKind::Cte, std::move(name), std::move(kids), cte_start));
      if (!accept_punct(',')) break;
    }
    return make(NodeKind::With, "", std::move(ctes), start);
  }

  NodeId leaf_after_advance(NodeKind kind) {
    const Token& t = advance();
    return leaf(kind, ident_text(t));
  }

  /// [WITH ...] body, wrapped in a Query node.
  NodeId parse_query_expr() {
    const std::size_t start = pos_;
    std::vector<NodeId> kids;
    if (kw("WITH")) kids.push_back(parse_with());
    kids.push_back(parse_query_body());
    return make(NodeKind::Query, "", std::move(kids), start);
  }

  NodeId parse_query_body() {
    const std::size_t start = pos_;
    NodeId left = parse_set_operand();
    while (kw("UNION")) {
      advance();
      std::string label = "UNION";
      if (accept_kw("ALL")) {
        label = "UNION ALL";
      } else {
        accept_kw("DISTINCT");
      }
      NodeId right = parse_set_operand();
      left = make(NodeKind::SetOp, label, {left, right}, start);
    }
    return left;
  }

  NodeId parse_set_operand() {
    if (kw("SELECT")) return parse_select();
    if (punct('(')) {
      advance();
      NodeId q = parse_query_expr();
      expect_punct(')', GrammarFault::missing_closing_paren);
      return q;
    }
    if (kw("FROM")) fail(GrammarFault::missing_select, {"SELECT"});
    if (kw("WITH")) fail(GrammarFault::with_not_first, {"SELECT"});
    fail(GrammarFault::unexpected_token, {"SELECT", "'('"});
  }

  NodeId parse_select() {
    const std::size_t start = pos_;
    expect_kw("SELECT");
    std::vector<NodeId> kids;
    if (accept_kw("DISTINCT")) {
      kids.push_back(leaf(NodeKind::Distinct, "DISTINCT"));
    } else {
      accept_kw("ALL");
    }
    if (at_end() || kw("FROM") || punct(';') || kw("WHERE")) {
      fail(GrammarFault::missing_select_list, {"projection list"});
    }
    kids.push_back(parse_proj_list());
    const bool has_from = kw("FROM");
    if (has_from) kids.push_back(parse_from());

    enum Stage { kNone, kWhere, kGroup, kHaving, kOrder, kLimit };
    Stage stage = kNone;
    while (!at_end()) {
      if (kw("WHERE")) {
        if (stage == kWhere) fail(GrammarFault::multiple_where, {"GROUP BY", "ORDER BY", "';'"});
        if (stage > kWhere) fail(GrammarFault::clause_order, {"';'"});
        const std::size_t c = pos_;
        advance();
        NodeId e = parse_expr();
        check_connector();
        kids.push_back(make(NodeKind::Where, "", {e}, c));
        stage = kWhere;
      } else if (kw("GROUP")) {
        if (stage >= kGroup) fail(GrammarFault::clause_order, {"';'"});
        const std::size_t c = pos_;
        advance();
        expect_kw("BY");
        std::vector<NodeId> keys;
        do {
          keys.push_back(parse_expr());
        } while (accept_punct(','));
        kids.push_back(make(NodeKind::GroupBy, "", std::move(keys), c));
        stage = kGroup;
      } else if (kw("HAVING")) {
        if (stage >= kHaving) fail(GrammarFault::clause_order, {"';'"});
        const std::size_t c = pos_;
        advance();
        NodeId e = parse_expr();
        check_connector();
        kids.push_back(make(NodeKind::Having, "", {e}, c));
        stage = kHaving;
      } else if (kw("ORDER")) {
        if (stage >= kOrder) fail(GrammarFault::clause_order, {"';'"});
        kids.push_back(parse_order_by());
        stage = kOrder;
      } else if (kw("LIMIT")) {
        if (stage >= kLimit) fail(GrammarFault::clause_order, {"';'"});
        const std::size_t c = pos_;
        advance();
        if (!peek() || peek()->kind != TokenKind::number) fail(GrammarFault::unexpected_token, {"number"});
        const Token& n = advance();
        kids.push_back(make(NodeKind::Limit, n.text, {}, c));
        stage = kLimit;
      } else if (stage > kNone && (kw("JOIN") || kw("LEFT") || kw("RIGHT") || kw("INNER") ||
                                   kw("FULL") || kw("CROSS") || kw("LATERAL"))) {
        fail(GrammarFault::clause_order, {"';'"});
      } else if (stage == kNone && !has_from && (kw("JOIN") || kw("LEFT") || kw("INNER"))) {
        fail(GrammarFault::missing_from_source, {"FROM"});
      } else {
        break;
      }
    }
    return make(NodeKind::Select, "", std::move(kids), start);
  }

  /// After a WHERE/HAVING/ON predicate, a token that can only start another
  /// operand means the AND/OR between them is missing.
  void check_connector() {
    const Token* t = peek();
    if (t == nullptr) return;
    const bool operand_start = is_name(t) || t->kind == TokenKind::number ||
                               t->kind == TokenKind::string || t->is_punct('(') ||
                               t->is_keyword("NOT") || t->is_keyword("CASE") ||
                               t->is_keyword("CAST") || t->is_keyword("EXISTS") ||
                               t->is_keyword("NULL") || t->is_keyword("TRUE") ||
                               t->is_keyword("FALSE");
    if (operand_start) fail(GrammarFault::missing_connector, {"AND", "OR"});
  }

  NodeId parse_proj_list() {
    const std::size_t start = pos_;
    std::vector<NodeId> items;
    while (true) {
      items.push_back(parse_proj_item());
      if (!accept_punct(',')) break;
      if (punct(',') || kw("FROM") || at_end()) fail(GrammarFault::punctuation, {"expression"});
    }
    return make(NodeKind::ProjList, "", std::move(items), start);
  }

  NodeId parse_proj_item() {
    const std::size_t start = pos_;
    if (op("*")) {
      advance();
      return leaf(NodeKind::Star, "*");
    }
    if (is_name(peek()) && punct('.', 1) && op("*", 2)) {
      std::string q = ident_text(advance());
      advance();
      advance();
      return make(NodeKind::Star, q + ".*", {}, start);
    }
    NodeId e = parse_expr();
    if (auto alias = parse_column_alias()) {
      return make(NodeKind::Alias, *alias, {e}, start);
    }
    return e;
  }

  std::optional<std::string> parse_column_alias() {
    if (accept_kw("AS")) {
      if (kw("AS")) fail(GrammarFault::redundant_as, {"alias"});
      if (peek() && peek()->kind == TokenKind::string) fail(GrammarFault::quoted_alias, {"identifier"});
      if (punct('(')) {
        // AS (k, v) multi-alias for UDTFs in the select list
        advance();
        std::string joined;
        do {
          if (!is_name(peek())) fail(GrammarFault::unexpected_token, {"identifier"});
          if (!joined.empty()) joined += ",";
          joined += ident_text(advance());
        } while (accept_punct(','));
        expect_punct(')', GrammarFault::missing_closing_paren);
        return joined;
      }
      if (!is_name(peek())) fail(GrammarFault::redundant_as, {"alias"});
      return ident_text(advance());
    }
    if (is_name(peek()) && !punct('(', 1) && !punct('.', 1)) return ident_text(advance());
    return std::nullopt;
  }

  // ------------------------------------------------------------------ FROM
  NodeId parse_from() {
    const std::size_t start = pos_;
    expect_kw("FROM");
    if (at_end() || punct(';') || kw("WHERE") || kw("GROUP") || kw("ORDER")) {
      fail(GrammarFault::missing_from_source, {"table"});
    }
    NodeId left = parse_table_primary();
    std::vector<NodeId> laterals;
    while (!at_end()) {
      const std::size_t jstart = pos_;
      std::string kind;
      if (punct(',')) {
        if (!laterals.empty()) break;
        advance();
        kind = "COMMA";
      } else if (kw("JOIN")) {
        advance();
        kind = "INNER";
      } else if (kw("INNER") && kw("JOIN", 1)) {
        advance();
        advance();
        kind = "INNER";
      } else if (kw("LEFT") || kw("RIGHT") || kw("FULL")) {
        kind = to_upper(advance().text);
        if (kind == "LEFT" && accept_kw("SEMI")) {
          kind = "LEFT SEMI";
        } else {
          accept_kw("OUTER");
        }
        expect_kw("JOIN");
      } else if (kw("CROSS")) {
        advance();
        expect_kw("JOIN");
        kind = "CROSS";
      } else if (kw("LATERAL")) {
        laterals.push_back(parse_lateral_view());
        continue;
      } else if (is_name(peek()) && punct('(', 1)) {
        fail(GrammarFault::missing_lateral_view, {"LATERAL VIEW"});
      } else {
        break;
      }
      if (!laterals.empty()) fail(GrammarFault::clause_order, {"WHERE", "GROUP BY"});
      NodeId right = parse_table_primary();
      std::vector<NodeId> kids{left, right};
      if (kw("ON")) {
        const std::size_t on_start = pos_;
        advance();
        NodeId cond = parse_expr();
        check_connector();
        kids.push_back(make(NodeKind::On, "", {cond}, on_start));
      }
      left = make(NodeKind::Join, kind, std::move(kids), jstart);
      nodes_[left].span.begin = nodes_[kids_front(left)].span.begin;
    }
    std::vector<NodeId> kids{left};
    kids.insert(kids.end(), laterals.begin(), laterals.end());
    return make(NodeKind::From, "", std::move(kids), start);
  }

  NodeId kids_front(NodeId id) const { return nodes_[id].children.front(); }

  NodeId parse_table_primary() {
    const std::size_t start = pos_;
    if (punct('(')) {
      advance();
      NodeId q = parse_query_expr();
      expect_punct(')', GrammarFault::missing_closing_paren);
      std::vector<NodeId> kids{q};
      if (auto alias = parse_table_alias()) kids.push_back(*alias);
      return make(NodeKind::DerivedTable, "", std::move(kids), start);
    }
    if (!is_name(peek())) fail(GrammarFault::missing_from_source, {"table"});
    std::string name = ident_text(advance());
    while (punct('.') && is_name(peek(1))) {
      advance();
      name += "." + ident_text(advance());
    }
    std::vector<NodeId> kids;
    if (auto alias = parse_table_alias()) kids.push_back(*alias);
    return make(NodeKind::TableRef, std::move(name), std::move(kids), start);
  }

  std::optional<NodeId> parse_table_alias() {
    const bool had_as = accept_kw("AS");
    if (had_as && kw("AS")) fail(GrammarFault::redundant_as, {"alias"});
    if (is_name(peek())) {
      if (punct('(', 1)) fail(GrammarFault::missing_lateral_view, {"LATERAL VIEW"});
      advance();
      return leaf(NodeKind::TableAlias, ident_text(tok(pos_ - 1)));
    }
    if (had_as) fail(GrammarFault::redundant_as, {"alias"});
    return std::nullopt;
  }

  NodeId parse_lateral_view() {
    const std::size_t start = pos_;
    expect_kw("LATERAL");
    expect_kw("VIEW");
    std::string label;
    if (accept_kw("OUTER")) label = "OUTER";
    if (!is_name(peek()) || !punct('(', 1)) fail(GrammarFault::unexpected_token, {"function call"});
    std::vector<NodeId> kids{parse_primary()};
    if (!is_name(peek())) fail(GrammarFault::lateral_view_alias, {"table alias"});
    kids.push_back(leaf_after_advance(NodeKind::TableAlias));
    accept_kw("AS");
    if (!is_name(peek())) fail(GrammarFault::lateral_view_alias, {"column alias"});
    kids.push_back(leaf_after_advance(NodeKind::ColumnAlias));
    while (punct(',') && is_name(peek(1)) && !punct('(', 2) && !punct('.', 2)) {
      advance();
      kids.push_back(leaf_after_advance(NodeKind::ColumnAlias));
    }
    return make(NodeKind::LateralView, std::move(label), std::move(kids), start);
  }

  NodeId parse_order_by() {
    const std::size_t start = pos_;
    expect_kw("ORDER");
    expect_kw("BY");
    std::vector<NodeId> keys;
    do {
      const std::size_t k = pos_;
      NodeId e = parse_expr();
      std::string dir;
      if (accept_word("ASC")) {
        dir = "ASC";
      } else if (accept_word("DESC")) {
        dir = "DESC";
      }
      if (word("NULLS")) {
        advance();
        if (accept_word("FIRST")) {
          dir += dir.empty() ? "NULLS FIRST" : " NULLS FIRST";
        } else if (accept_word("LAST")) {
          dir += dir.empty() ? "NULLS LAST" : " NULLS LAST";
        } else {
          fail(GrammarFault::unexpected_token, {"FIRST", "LAST"});
        }
      }
      keys.push_back(make(NodeKind::SortKey, std::move(dir), {e}, k));
    } while (accept_punct(','));
    return make(NodeKind::OrderBy, "", std::move(keys), start);
  }

  // ----------------------------------------------------------- expressions
  NodeId parse_expr() { return parse_or(); }

  NodeId parse_or() {
    const std::size_t start = pos_;
    NodeId left = parse_and();
    while (kw("OR")) {
      advance();
      NodeId right = parse_and();
      left = make(NodeKind::BinaryOp, "OR", {left, right}, start);
    }
    return left;
  }

  NodeId parse_and() {
    const std::size_t start = pos_;
    NodeId left = parse_not();
    while (kw("AND") || op("&&")) {
      advance();
      NodeId right = parse_not();
      left = make(NodeKind::BinaryOp, "AND", {left, right}, start);
    }
    return left;
  }

  NodeId parse_not() {
    const std::size_t start = pos_;
    if (kw("NOT") && !kw("EXISTS", 1)) {
      advance();
      NodeId inner = parse_not();
      return make(NodeKind::UnaryOp, "NOT", {inner}, start);
    }
    if (op("!")) {
      if (op("=", 1)) fail(GrammarFault::spaced_not_equal, {"'!='"});
      advance();
      NodeId inner = parse_not();
      return make(NodeKind::UnaryOp, "NOT", {inner}, start);
    }
    return parse_predicate();
  }

  NodeId parse_predicate() {
    const std::size_t start = pos_;
    NodeId left = parse_additive();
    while (!at_end()) {
      static constexpr std::array<std::string_view, 9> kCompare = {"=", "==", "<>", "!=", "<",
                                                                   ">", "<=", ">=", "<=>"};
      const Token& t = cur();
      if (t.kind == TokenKind::op &&
          std::find(kCompare.begin(), kCompare.end(), t.text) != kCompare.end()) {
        std::string o = t.text == "==" ? "=" : t.text;
        advance();
        NodeId right = parse_additive();
        left = make(NodeKind::BinaryOp, o, {left, right}, start);
        continue;
      }
      if (t.is_op("!")) {
        if (op("=", 1)) fail(GrammarFault::spaced_not_equal, {"'!='"});
        fail(GrammarFault::unexpected_token, {"operator"});
      }
      if (t.is_keyword("IS")) {
        advance();
        const bool neg = accept_kw("NOT");
        expect_kw("NULL");
        left = make(NodeKind::IsNull, neg ? "IS NOT NULL" : "IS NULL", {left}, start);
        continue;
      }
      const bool neg = t.is_keyword("NOT") &&
                       (kw("IN", 1) || kw("BETWEEN", 1) || kw("LIKE", 1) || kw("RLIKE", 1));
      const std::size_t k = neg ? 1 : 0;
      if (kw("IN", k)) {
        if (neg) advance();
        advance();
        left = parse_in_rhs(left, neg, start);
        continue;
      }
      if (kw("BETWEEN", k)) {
        if (neg) advance();
        advance();
        NodeId lo = parse_additive();
        expect_kw("AND");
        NodeId hi = parse_additive();
        left = make(NodeKind::Between, neg ? "NOT BETWEEN" : "BETWEEN", {left, lo, hi}, start);
        continue;
      }
      if (kw("LIKE", k) || kw("RLIKE", k)) {
        if (neg) advance();
        std::string o = to_upper(advance().text);
        NodeId pattern = parse_additive();
        left = make(NodeKind::Like, neg ? "NOT " + o : o, {left, pattern}, start);
        continue;
      }
      break;
    }
    return left;
  }

  NodeId parse_in_rhs(NodeId lhs, bool neg, std::size_t start) {
    const std::string label = neg ? "NOT IN" : "IN";
    if (!punct('(')) fail(GrammarFault::unexpected_token, {"'('"});
    advance();
    if (kw("SELECT") || kw("WITH")) {
      NodeId q = parse_query_expr();
      expect_punct(')', GrammarFault::missing_closing_paren);
      return make(NodeKind::InSubquery, label, {lhs, q}, start);
    }
    if (punct(')')) fail(GrammarFault::in_missing_argument, {"expression"});
    std::vector<NodeId> kids{lhs};
    do {
      if (punct(')') || punct(',')) fail(GrammarFault::in_missing_argument, {"expression"});
      kids.push_back(parse_expr());
    } while (accept_punct(','));
    expect_punct(')', GrammarFault::missing_closing_paren);
    return make(NodeKind::InList, label, std::move(kids), start);
  }

  NodeId parse_additive() {
    const std::size_t start = pos_;
    NodeId left = parse_multiplicative();
    while (op("+") || op("-") || op("||") || op("&") || op("|") || op("^")) {
      std::string o = advance().text;
      NodeId right = parse_multiplicative();
      left = make(NodeKind::BinaryOp, o, {left, right}, start);
    }
    return left;
  }

  NodeId parse_multiplicative() {
    const std::size_t start = pos_;
    NodeId left = parse_unary();
    while (op("*") || op("/") || op("%") || word("DIV")) {
      std::string o = to_upper(advance().text);
      NodeId right = parse_unary();
      left = make(NodeKind::BinaryOp, o, {left, right}, start);
    }
    return left;
  }

  NodeId parse_unary() {
    const std::size_t start = pos_;
    if (op("-") || op("+") || op("~")) {
      std::string o = advance().text;
      if (o == "-" && peek() && peek()->kind == TokenKind::number &&
          tok(pos_ - 1).span.end == peek()->span.begin) {
        const Token& n = advance();
        return make(NodeKind::Literal, "-" + n.text, {}, start);
      }
      NodeId inner = parse_unary();
      return make(NodeKind::UnaryOp, o, {inner}, start);
    }
    return parse_postfix();
  }

  NodeId parse_postfix() {
    const std::size_t start = pos_;
    NodeId e = parse_primary();
    while (true) {
      if (punct('[')) {
        advance();
        NodeId idx = parse_expr();
        expect_punct(']', GrammarFault::missing_closing_paren);
        e = make(NodeKind::Subscript, "", {e, idx}, start);
      } else if (punct('.') && is_name(peek(1)) && nodes_[e].kind == NodeKind::Subscript) {
        advance();
        std::string field = ident_text(advance());
        NodeId f = make(NodeKind::Literal, "'" + field + "'", {}, pos_ - 1);
        e = make(NodeKind::Subscript, ".", {e, f}, start);
      } else {
        return e;
      }
    }
  }

  NodeId parse_primary() {
    const std::size_t start = pos_;
    const Token* t = peek();
    if (t == nullptr) fail(GrammarFault::unexpected_end, {"expression"});
    switch (t->kind) {
      case TokenKind::number:
        advance();
        return leaf(NodeKind::Literal, t->text);
      case TokenKind::string: {
        advance();
        std::string text = t->text;
        return leaf(NodeKind::Literal, text);
      }
      case TokenKind::identifier:
      case TokenKind::quoted_identifier:
        return parse_name_or_call();
      case TokenKind::keyword:
        break;
      default:
        if (t->is_punct('(')) {
          advance();
          if (kw("SELECT") || kw("WITH")) {
            NodeId q = parse_query_expr();
            expect_punct(')', GrammarFault::missing_closing_paren);
            return make(NodeKind::ScalarSubquery, "", {q}, start);
          }
          NodeId inner = parse_expr();
          expect_punct(')', GrammarFault::missing_closing_paren);
          return inner;
        }
        if (t->kind == TokenKind::punctuation) fail(GrammarFault::punctuation, {"expression"});
        fail(GrammarFault::unexpected_token, {"expression"});
    }
    if (t->is_keyword("NULL") || t->is_keyword("TRUE") || t->is_keyword("FALSE")) {
      advance();
      return leaf(NodeKind::Literal, to_upper(t->text));
    }
    if (t->is_keyword("CASE")) return parse_case();
    if (t->is_keyword("CAST")) return parse_cast();
    if (t->is_keyword("EXISTS") || (t->is_keyword("NOT") && kw("EXISTS", 1))) {
      const bool neg = t->is_keyword("NOT");
      if (neg) advance();
      advance();
      expect_punct('(');
      NodeId q = parse_query_expr();
      expect_punct(')', GrammarFault::missing_closing_paren);
      return make(NodeKind::Exists, neg ? "NOT EXISTS" : "EXISTS", {q}, start);
    }
    if ((t->is_keyword("LEFT") || t->is_keyword("RIGHT") || t->is_keyword("IF")) && punct('(', 1)) {
      return parse_call(to_lower(advance().text), start);
    }
    fail(GrammarFault::unexpected_token, {"expression"});
  }

  NodeId parse_name_or_call() {
    const std::size_t start = pos_;
    const Token& first = advance();
    if (first.kind == TokenKind::identifier && first.text.rfind("${", 0) == 0) {
      return leaf(NodeKind::Literal, first.text);
    }
    if (punct('(') && first.kind == TokenKind::identifier) {
      return parse_call(to_lower(first.text), start);
    }
    std::string name = ident_text(first);
    while (punct('.') && is_name(peek(1))) {
      advance();
      name += "." + ident_text(advance());
    }
    return make(NodeKind::ColRef, std::move(name), {}, start);
  }

  NodeId parse_call(std::string name, std::size_t start) {
    expect_punct('(');
    std::vector<NodeId> kids;
    if (accept_kw("DISTINCT")) kids.push_back(leaf(NodeKind::Distinct, "DISTINCT"));
    if (op("*")) {
      advance();
      kids.push_back(leaf(NodeKind::Star, "*"));
    } else if (!punct(')')) {
      while (true) {
        kids.push_back(parse_expr());
        if (accept_punct(',')) {
          if (punct(',') || punct(')')) fail(GrammarFault::punctuation, {"expression"});
          continue;
        }
        break;
      }
    }
    expect_punct(')', GrammarFault::missing_closing_paren);
    if (kw("OVER")) kids.push_back(parse_over());
    return make(NodeKind::FunctionCall, std::move(name), std::move(kids), start);
  }

  NodeId parse_over() {
    const std::size_t start = pos_;
    expect_kw("OVER");
    expect_punct('(');
    std::vector<NodeId> kids;
    if (kw("PARTITION")) {
      const std::size_t p = pos_;
      advance();
      expect_kw("BY");
      std::vector<NodeId> keys;
      do {
        keys.push_back(parse_expr());
      } while (accept_punct(','));
      kids.push_back(make(NodeKind::PartitionBy, "", std::move(keys), p));
    }
    if (kw("ORDER")) kids.push_back(parse_order_by());
    if (word("ROWS") || word("RANGE")) {
      const std::size_t f = pos_;
      std::string text;
      int depth = 0;
      while (!at_end() && !(depth == 0 && punct(')'))) {
        if (punct('(')) ++depth;
        if (punct(')')) --depth;
        if (!text.empty()) text += ' ';
        text += normalized_token_text(advance());
      }
      kids.push_back(make(NodeKind::Frame, to_upper(text), {}, f));
    }
    expect_punct(')', GrammarFault::missing_closing_paren);
    return make(NodeKind::Over, "", std::move(kids), start);
  }

  NodeId parse_case() {
    const std::size_t start = pos_;
    expect_kw("CASE");
    std::vector<NodeId> kids;
    std::string label;
    if (!kw("WHEN")) {
      label = "SIMPLE";
      kids.push_back(parse_expr());
    }
    if (!kw("WHEN")) fail(GrammarFault::case_missing_end, {"WHEN"});
    while (kw("WHEN")) {
      const std::size_t w = pos_;
      advance();
      NodeId cond = parse_expr();
      if (!accept_kw("THEN")) fail(GrammarFault::case_missing_end, {"THEN"});
      NodeId result = parse_expr();
      kids.push_back(make(NodeKind::When, "", {cond, result}, w));
    }
    if (kw("ELSE")) {
      const std::size_t e = pos_;
      advance();
      NodeId value = parse_expr();
      kids.push_back(make(NodeKind::Else, "", {value}, e));
    }
    if (!accept_kw("END")) fail(GrammarFault::case_missing_end, {"WHEN", "ELSE", "END"});
    return make(NodeKind::Case, std::move(label), std::move(kids), start);
  }

  NodeId parse_cast() {
    const std::size_t start = pos_;
    expect_kw("CAST");
    expect_punct('(');
    NodeId value = parse_expr();
    expect_kw("AS");
    std::string type = parse_type_text();
    if (kw("AS")) fail(GrammarFault::cast_multiple_as, {"')'"});
    expect_punct(')', GrammarFault::missing_closing_paren);
    return make(NodeKind::Cast, std::move(type), {value}, start);
  }

  /// Type names: ident, ident(n[,m]), ident<...> with balanced angle brackets.
  std::string parse_type_text() {
    if (!is_name(peek())) fail(GrammarFault::unexpected_token, {"type name"});
    std::string text = to_lower(advance().text);
    if (punct('(')) {
      text += '(';
      advance();
      while (!at_end() && !punct(')')) text += advance().text;
      expect_punct(')', GrammarFault::missing_closing_paren);
      text += ')';
    } else if (op("<")) {
      int depth = 0;
      do {
        const Token& t = advance();
        if (t.is_op("<")) ++depth;
        if (t.is_op(">")) --depth;
        text += t.kind == TokenKind::identifier ? to_lower(t.text) : t.text;
      } while (!at_end() && depth > 0);
      if (depth != 0) fail(GrammarFault::unexpected_end, {"'>'"});
    }
    return text;
  }

  // ------------------------------------------------------------- DML / DDL
  NodeId parse_insert(std::size_t start, std::optional<NodeId> with) {
    context_fault_ = GrammarFault::insert_syntax;
    expect_kw("INSERT");
    std::string mode;
    if (accept_kw("INTO")) {
      mode = "INTO";
    } else if (accept_kw("OVERWRITE")) {
      mode = "OVERWRITE";
    } else {
      fail(GrammarFault::insert_syntax, {"INTO", "OVERWRITE"});
    }
    accept_kw("TABLE");
    std::vector<NodeId> kids;
    if (with) kids.push_back(*with);
    const std::size_t t = pos_;
    if (!is_name(peek())) fail(GrammarFault::insert_syntax, {"table name"});
    std::string name = ident_text(advance());
    while (punct('.') && is_name(peek(1))) {
      advance();
      name += "." + ident_text(advance());
    }
    kids.push_back(make(NodeKind::TableRef, std::move(name), {}, t));
    if (kw("PARTITION")) {
      const std::size_t p = pos_;
      advance();
      expect_punct('(');
      std::vector<NodeId> items;
      do {
        const std::size_t i = pos_;
        if (!is_name(peek())) fail(GrammarFault::insert_syntax, {"partition column"});
        std::string col = ident_text(advance());
        std::vector<NodeId> value;
        if (op("=")) {
          advance();
          context_fault_.reset();
          value.push_back(parse_primary());
          context_fault_ = GrammarFault::insert_syntax;
        }
        items.push_back(make(NodeKind::PartitionItem, std::move(col), std::move(value), i));
      } while (accept_punct(','));
      expect_punct(')', GrammarFault::missing_closing_paren);
      kids.push_back(make(NodeKind::PartitionSpec, "", std::move(items), p));
    }
    if (punct('(') && !kw("SELECT", 1) && !kw("WITH", 1)) {
      const std::size_t c = pos_;
      advance();
      std::vector<NodeId> cols;
      do {
        if (!is_name(peek())) fail(GrammarFault::insert_syntax, {"column name"});
        cols.push_back(leaf_after_advance(NodeKind::Identifier));
      } while (accept_punct(','));
      expect_punct(')', GrammarFault::missing_closing_paren);
      kids.push_back(make(NodeKind::ColumnList, "", std::move(cols), c));
    }
    if (kw("WITH")) fail(GrammarFault::with_not_first, {"SELECT"});
    context_fault_.reset();
    kids.push_back(parse_query_body());
    return make(NodeKind::Insert, std::move(mode), std::move(kids), start);
  }

  NodeId parse_create() {
    const std::size_t start = pos_;
    context_fault_ = GrammarFault::create_table;
    expect_kw("CREATE");
    accept_word("EXTERNAL") || accept_word("TEMPORARY");
    expect_kw("TABLE");
    std::vector<NodeId> kids;
    if (word("IF")) {
      const std::size_t f = pos_;
      advance();
      expect_kw("NOT");
      expect_kw("EXISTS");
      kids.push_back(make(NodeKind::Flag, "IF NOT EXISTS", {}, f));
    }
    if (!is_name(peek())) fail(GrammarFault::create_table, {"table name"});
    std::string name = ident_text(advance());
    while (punct('.') && is_name(peek(1))) {
      advance();
      name += "." + ident_text(advance());
    }
    if (punct('(')) {
      advance();
      do {
        kids.push_back(parse_column_def());
      } while (accept_punct(','));
      expect_punct(')', GrammarFault::create_table);
    }
    if (word("COMMENT")) {
      const std::size_t c = pos_;
      advance();
      if (!peek() || peek()->kind != TokenKind::string) fail(GrammarFault::create_table, {"string"});
      const Token& s = advance();
      NodeId lit = leaf(NodeKind::Literal, s.text);
      kids.push_back(make(NodeKind::TableComment, "", {lit}, c));
    }
    if (word("PARTITIONED")) {
      const std::size_t p = pos_;
      advance();
      expect_kw("BY");
      expect_punct('(');
      std::vector<NodeId> cols;
      do {
        cols.push_back(parse_column_def());
      } while (accept_punct(','));
      expect_punct(')', GrammarFault::create_table);
      kids.push_back(make(NodeKind::PartitionedBy, "", std::move(cols), p));
    }
    const std::size_t opt = pos_;
    std::string options;
    int depth = 0;
    while (!at_end() && !(depth == 0 && punct(';')) &&
           !(depth == 0 && kw("AS") && (kw("SELECT", 1) || kw("WITH", 1)))) {
      if (punct('(')) ++depth;
      if (punct(')')) --depth;
      if (!options.empty()) options += ' ';
      options += normalized_token_text(advance());
    }
    if (!options.empty()) kids.push_back(make(NodeKind::TableOptions, std::move(options), {}, opt));
    context_fault_.reset();
    if (accept_kw("AS")) kids.push_back(parse_query_expr());
    return make(NodeKind::CreateTable, std::move(name), std::move(kids), start);
  }

  NodeId parse_column_def() {
    const std::size_t start = pos_;
    if (!is_name(peek())) fail(GrammarFault::create_table, {"column name"});
    std::string name = ident_text(advance());
    const std::size_t t = pos_;
    std::string type = parse_type_text();
    std::vector<NodeId> kids{make(NodeKind::TypeName, std::move(type), {}, t)};
    if (word("COMMENT")) {
      advance();
      if (!peek() || peek()->kind != TokenKind::string) fail(GrammarFault::create_table, {"string"});
      advance();
      kids.push_back(leaf(NodeKind::Literal, tok(pos_ - 1).text));
    }
    return make(NodeKind::ColumnDef, std::move(name), std::move(kids), start);
  }

  std::string source_;
  std::vector<Token> tokens_;
  std::vector<std::size_t> sig_;
  std::ptrdiff_t lex_error_index_ = -1;
  std::string lex_error_message_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
  std::optional<GrammarFault> context_fault_;
};

ParseError empty_script_error(std::size_t size) {
  ParseError err;
  err.fault = GrammarFault::empty_script;
  err.message = "Empty script: expected at least one statement";
  err.span = {0, size};
  err.expected = {"statement"};
  return err;
}

}  // namespace

std::string_view to_string(GrammarFault fault) {
  switch (fault) {
    case GrammarFault::unexpected_token: return "unexpected_token";
    case GrammarFault::unexpected_end: return "unexpected_end";
    case GrammarFault::empty_script: return "empty_script";
    case GrammarFault::unterminated_literal: return "unterminated_literal";
    case GrammarFault::missing_select_list: return "missing_select_list";
    case GrammarFault::missing_select: return "missing_select";
    case GrammarFault::missing_from_source: return "missing_from_source";
    case GrammarFault::multiple_where: return "multiple_where";
    case GrammarFault::clause_order: return "clause_order";
    case GrammarFault::missing_connector: return "missing_connector";
    case GrammarFault::with_not_first: return "with_not_first";
    case GrammarFault::cte_trailing_comma: return "cte_trailing_comma";
    case GrammarFault::keyword_spelling: return "keyword_spelling";
    case GrammarFault::spaced_not_equal: return "spaced_not_equal";
    case GrammarFault::missing_closing_paren: return "missing_closing_paren";
    case GrammarFault::redundant_as: return "redundant_as";
    case GrammarFault::case_missing_end: return "case_missing_end";
    case GrammarFault::case_multiple_end: return "case_multiple_end";
    case GrammarFault::in_missing_argument: return "in_missing_argument";
    case GrammarFault::cast_multiple_as: return "cast_multiple_as";
    case GrammarFault::missing_lateral_view: return "missing_lateral_view";
    case GrammarFault::lateral_view_alias: return "lateral_view_alias";
    case GrammarFault::punctuation: return "punctuation";
    case GrammarFault::quoted_alias: return "quoted_alias";
    case GrammarFault::missing_semicolon: return "missing_semicolon";
    case GrammarFault::create_table: return "create_table";
    case GrammarFault::insert_syntax: return "insert_syntax";
  }
  return "unknown";
}

SyntaxTree parse_script(const SqlScript& script) {
  if (script.blank()) throw ParseFailure(empty_script_error(script.text.size()));
  auto tokens = tokenize(script.text);
  Parser parser(script.text, std::move(tokens), -1, {});
  return parser.parse(false, nullptr);
}

ParseResult parse_recovering(const SqlScript& script) {
  ParseResult result;
  if (script.blank()) {
    Node root;
    root.kind = NodeKind::Script;
    root.span = {0, script.text.size()};
    result.tree = SyntaxTree(script.text, {root}, 0);
    result.errors.push_back(empty_script_error(script.text.size()));
    return result;
  }
  auto lenient = tokenize_lenient(script.text);
  Parser parser(script.text, std::move(lenient.tokens), lenient.error_index,
                std::move(lenient.error_message));
  result.tree = parser.parse(true, &result.errors);
  return result;
}

bool has_raw(const SyntaxTree& tree) {
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree[id].kind == NodeKind::Raw) return true;
  }
  return false;
}

}  // namespace sqldebug
