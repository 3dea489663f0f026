#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "quest/error.hpp"

namespace quest::sql {

enum class TokenKind {
  keyword,
  identifier,
  string_literal,
  numeric_literal,
  op,
  punctuation,
  star,
};

std::string_view to_string(TokenKind kind) noexcept;

struct Token {
  TokenKind kind = TokenKind::identifier;
  std::string text;   // verbatim lexeme, original casing and quoting
  std::string value;  // keywords: uppercase; quoted lexemes: unescaped body
  SourcePosition position;

  bool is_keyword(std::string_view upper) const noexcept {
    return kind == TokenKind::keyword && value == upper;
  }
  bool is_symbol(std::string_view symbol) const noexcept {
    return (kind == TokenKind::op || kind == TokenKind::punctuation ||
            kind == TokenKind::star) &&
           value == symbol;
  }
};

/// Splits a query into tokens. Whitespace is dropped but recoverable: the
/// bytes between consecutive token spans are exactly the original whitespace.
/// Throws LexError at the first unlexable character or at the opening quote
/// of an unterminated quoted lexeme.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view word);

}  // namespace quest::sql
