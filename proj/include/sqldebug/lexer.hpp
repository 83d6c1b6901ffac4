#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqldebug/parse_error.hpp"
#include "sqldebug/span.hpp"

namespace sqldebug {

enum class TokenKind {
  keyword,
  identifier,
  quoted_identifier,
  number,
  string,
  op,
  punctuation,
  comment,
  whitespace,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::whitespace;
  std::string text;
  Span span;

  [[nodiscard]] bool is_trivia() const {
    return kind == TokenKind::whitespace || kind == TokenKind::comment;
  }
  /// Keyword test against an upper-case word, e.g. `tok.is_keyword("SELECT")`.
  [[nodiscard]] bool is_keyword(std::string_view upper) const;
  /// Case-insensitive word test that also accepts non-reserved identifiers
  /// (ROWS, PRECEDING, IF, ...).
  [[nodiscard]] bool is_word(std::string_view upper) const;
  [[nodiscard]] bool is_punct(char c) const {
    return kind == TokenKind::punctuation && text.size() == 1 && text[0] == c;
  }
  [[nodiscard]] bool is_op(std::string_view op) const { return kind == TokenKind::op && text == op; }
  bool operator==(const Token&) const = default;
};

/// Sql source handed to the toolkit. Only one dialect exists today.
enum class Dialect { hive_spark };

struct SqlScript {
  std::string text;
  Dialect dialect = Dialect::hive_spark;

  SqlScript() = default;
  SqlScript(std::string t, Dialect d = Dialect::hive_spark) : text(std::move(t)), dialect(d) {}  // NOLINT
  [[nodiscard]] bool blank() const;
};

bool is_reserved_keyword(std::string_view upper);

/// Lossless tokenization: concatenating every token's text reproduces the
/// input. Throws ParseFailure on an unterminated string, quoted identifier
/// or block comment.
std::vector<Token> tokenize(std::string_view text);

/// Like tokenize(), but never throws. On a lexical error the offending tail
/// becomes one token and `error_index` is set to its position.
struct LenientTokens {
  std::vector<Token> tokens;
  std::ptrdiff_t error_index = -1;
  std::string error_message;
};
LenientTokens tokenize_lenient(std::string_view text);

/// Canonical comparison text of a significant token: keywords upper-case,
/// unquoted identifiers lower-case, everything else verbatim.
std::string normalized_token_text(const Token& tok);

std::string to_upper(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace sqldebug
