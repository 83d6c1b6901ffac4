#include "sqldebug/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace sqldebug {
namespace {

constexpr std::array kReserved = {
    "ALL",    "AND",    "AS",     "BETWEEN", "BY",        "CASE",  "CAST",  "CREATE",
    "CROSS",  "DISTINCT", "ELSE", "END",     "EXISTS",    "FALSE", "FROM",  "FULL",
    "GROUP",  "HAVING", "IN",     "INNER",   "INSERT",    "INTO",  "IS",    "JOIN",
    "LATERAL", "LEFT",  "LIKE",   "LIMIT",   "NOT",       "NULL",  "ON",    "OR",
    "ORDER",  "OUTER",  "OVER",   "OVERWRITE", "PARTITION", "RIGHT", "RLIKE", "SELECT",
    "SEMI",   "TABLE",  "THEN",   "TRUE",    "UNION",     "VIEW",  "WHEN",  "WHERE",
    "WITH",
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  // Returns false on a lexical error; tokens_ holds everything before it.
  bool run() {
    while (pos_ < text_.size()) {
      if (!next()) return false;
    }
    return true;
  }

  std::vector<Token> tokens_;
  std::size_t error_pos_ = 0;
  std::string error_message_;

 private:
  void emit(TokenKind kind, std::size_t end) {
    Token tok;
    tok.kind = kind;
    tok.text = std::string(text_.substr(pos_, end - pos_));
    tok.span = {pos_, end};
    if (kind == TokenKind::identifier && is_reserved_keyword(to_upper(tok.text))) {
      tok.kind = TokenKind::keyword;
    }
    tokens_.push_back(std::move(tok));
    pos_ = end;
  }

  bool fail(std::string message) {
    error_pos_ = pos_;
    error_message_ = std::move(message);
    return false;
  }

  [[nodiscard]] char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  bool next() {
    const auto c = static_cast<unsigned char>(text_[pos_]);
    if (std::isspace(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
      emit(TokenKind::whitespace, end);
      return true;
    }
    if (c == '-' && peek(1) == '-') {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      emit(TokenKind::comment, end);
      return true;
    }
    if (c == '/' && peek(1) == '*') {
      std::size_t close = text_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) return fail("unterminated comment");
      emit(TokenKind::comment, close + 2);
      return true;
    }
    if (c == '\'' || c == '"') return quoted(static_cast<char>(c), TokenKind::string, "unterminated string");
    if (c == '`') return quoted('`', TokenKind::quoted_identifier, "unterminated quoted identifier");
    if (c == '$' && peek(1) == '{') {
      std::size_t close = text_.find('}', pos_);
      if (close == std::string_view::npos) return fail("unterminated variable reference");
      emit(TokenKind::identifier, close + 1);
      return true;
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      if (end < text_.size() && text_[end] == '.') {
        ++end;
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      }
      if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
        std::size_t exp = end + 1;
        if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
        if (exp < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp]))) {
          end = exp;
          while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
        }
      }
      // Hive numeric suffixes: 10L, 3S, 1Y, 2.5BD
      if (end < text_.size()) {
        const char s = static_cast<char>(std::toupper(static_cast<unsigned char>(text_[end])));
        if ((s == 'L' || s == 'S' || s == 'Y') &&
            (end + 1 >= text_.size() || !ident_char(static_cast<unsigned char>(text_[end + 1])))) {
          ++end;
        } else if (s == 'B' && end + 1 < text_.size() &&
                   std::toupper(static_cast<unsigned char>(text_[end + 1])) == 'D' &&
                   (end + 2 >= text_.size() ||
                    !ident_char(static_cast<unsigned char>(text_[end + 2])))) {
          end += 2;
        }
      }
      // 1abc is an identifier in Hive (column names may start with digits)
      if (end < text_.size() && ident_start(static_cast<unsigned char>(text_[end]))) {
        while (end < text_.size() && ident_char(static_cast<unsigned char>(text_[end]))) ++end;
        emit(TokenKind::identifier, end);
        return true;
      }
      emit(TokenKind::number, end);
      return true;
    }
    if (ident_start(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && ident_char(static_cast<unsigned char>(text_[end]))) ++end;
      emit(TokenKind::identifier, end);
      return true;
    }
    static constexpr std::array<std::string_view, 9> kMulti = {"<=>", "<>", "<=", ">=", "!=",
                                                                "==", "||", "&&", "::"};
    for (auto op : kMulti) {
      if (text_.substr(pos_, op.size()) == op) {
        emit(TokenKind::op, pos_ + op.size());
        return true;
      }
    }
    if (std::string_view("(),;.[]{}:").find(static_cast<char>(c)) != std::string_view::npos) {
      emit(TokenKind::punctuation, pos_ + 1);
      return true;
    }
    // Every other byte becomes a single-character operator; the parser
    // rejects the ones it does not know.
    emit(TokenKind::op, pos_ + 1);
    return true;
  }

  bool quoted(char quote, TokenKind kind, const char* message) {
    std::size_t end = pos_ + 1;
    while (end < text_.size()) {
      const char ch = text_[end];
      if (ch == '\\' && quote != '`' && end + 1 < text_.size()) {
        end += 2;
        continue;
      }
      if (ch == quote) {
        if (end + 1 < text_.size() && text_[end + 1] == quote) {
          end += 2;
          continue;
        }
        emit(kind, end + 1);
        return true;
      }
      ++end;
    }
    return fail(message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::quoted_identifier: return "quoted_identifier";
    case TokenKind::number: return "number";
    case TokenKind::string: return "string";
    case TokenKind::op: return "operator";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::comment: return "comment";
    case TokenKind::whitespace: return "whitespace";
  }
  return "?";
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_reserved_keyword(std::string_view upper) {
  return std::find(kReserved.begin(), kReserved.end(), upper) != kReserved.end();
}

bool Token::is_keyword(std::string_view upper) const {
  return kind == TokenKind::keyword && to_upper(text) == upper;
}

bool Token::is_word(std::string_view upper) const {
  return (kind == TokenKind::keyword || kind == TokenKind::identifier) && to_upper(text) == upper;
}

bool SqlScript::blank() const {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::vector<Token> tokenize(std::string_view text) {
  Lexer lexer(text);
  if (!lexer.run()) {
    ParseError err;
    err.message = lexer.error_message_;
    err.span = {lexer.error_pos_, text.size()};
    err.fault = GrammarFault::unterminated_literal;
    throw ParseFailure(std::move(err));
  }
  return std::move(lexer.tokens_);
}

LenientTokens tokenize_lenient(std::string_view text) {
  Lexer lexer(text);
  LenientTokens out;
  const bool ok = lexer.run();
  out.tokens = std::move(lexer.tokens_);
  if (!ok) {
    Token tail;
    tail.kind = TokenKind::string;
    tail.text = std::string(text.substr(lexer.error_pos_));
    tail.span = {lexer.error_pos_, text.size()};
    out.error_index = static_cast<std::ptrdiff_t>(out.tokens.size());
    out.error_message = lexer.error_message_;
    out.tokens.push_back(std::move(tail));
  }
  return out;
}

std::string normalized_token_text(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::keyword: return to_upper(tok.text);
    case TokenKind::identifier: return to_lower(tok.text);
    default: return tok.text;
  }
}

}  // namespace sqldebug
