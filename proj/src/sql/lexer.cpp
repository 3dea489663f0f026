#include <algorithm>
#include <array>
#include <cctype>

#include "quest/sql/token.hpp"

namespace quest::sql {

namespace {

constexpr std::array<std::string_view, 59> kKeywords = {
    "ALL",     "ALTER",  "AND",       "AS",     "ASC",     "BETWEEN", "BY",
    "CASE",    "CAST",   "CREATE",    "CROSS",  "DELETE",  "DESC",    "DISTINCT",
    "DROP",    "ELSE",   "END",       "ESCAPE", "EXCEPT",  "EXISTS",  "FALSE",
    "FROM",    "FULL",   "GLOB",      "GROUP",  "HAVING",  "IN",      "INNER",
    "INSERT",  "INTERSECT", "INTO",   "IS",     "JOIN",    "LEFT",    "LIKE",
    "LIMIT",   "NATURAL", "NOT",      "NULL",   "OFFSET",  "ON",      "OR",
    "ORDER",   "OUTER",  "OVER",      "PARTITION", "RIGHT", "SELECT", "SET",
    "THEN",    "TRUE",   "UNION",     "UPDATE", "USING",   "VALUES",  "WHEN",
    "WHERE",   "WITH",   "WINDOW",
};

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) != 0 || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_whitespace();
      if (at_end()) break;
      tokens.push_back(next());
    }
    return tokens;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  unsigned char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? static_cast<unsigned char>(text_[pos_ + ahead]) : 0;
  }

  SourcePosition here() const { return {pos_, line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_whitespace() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                         peek() == '\r' || peek() == '\f' || peek() == '\v')) {
      advance();
    }
  }

  Token make(TokenKind kind, SourcePosition start, std::string value) const {
    Token t;
    t.kind = kind;
    t.text = std::string(text_.substr(start.offset, pos_ - start.offset));
    t.value = std::move(value);
    t.position = start;
    return t;
  }

  Token next() {
    const SourcePosition start = here();
    const unsigned char c = peek();

    if (is_ident_start(c)) {
      while (!at_end() && is_ident_char(peek())) advance();
      std::string word(text_.substr(start.offset, pos_ - start.offset));
      std::string up = upper(word);
      if (is_keyword(up)) return make(TokenKind::keyword, start, std::move(up));
      return make(TokenKind::identifier, start, std::move(word));
    }
    if (std::isdigit(c) != 0 || (c == '.' && std::isdigit(peek(1)) != 0)) {
      return number(start);
    }
    switch (c) {
      case '\'':
      case '"':
        return quoted(start, TokenKind::string_literal, static_cast<char>(c));
      case '`':
        return quoted(start, TokenKind::identifier, '`');
      case '[':
        return quoted(start, TokenKind::identifier, ']');
      case '*':
        advance();
        return make(TokenKind::star, start, "*");
      case '(':
      case ')':
      case ',':
      case '.':
      case ';':
        advance();
        return make(TokenKind::punctuation, start, std::string(1, static_cast<char>(c)));
      case '+':
      case '-':
      case '/':
      case '%':
        advance();
        return make(TokenKind::op, start, std::string(1, static_cast<char>(c)));
      case '=':
        advance();
        if (peek() == '=') advance();
        return make(TokenKind::op, start, "=");
      case '!':
        if (peek(1) == '=') {
          advance();
          advance();
          return make(TokenKind::op, start, "<>");
        }
        break;
      case '<':
        advance();
        if (peek() == '=') {
          advance();
          return make(TokenKind::op, start, "<=");
        }
        if (peek() == '>') {
          advance();
          return make(TokenKind::op, start, "<>");
        }
        return make(TokenKind::op, start, "<");
      case '>':
        advance();
        if (peek() == '=') {
          advance();
          return make(TokenKind::op, start, ">=");
        }
        return make(TokenKind::op, start, ">");
      case '|':
        if (peek(1) == '|') {
          advance();
          advance();
          return make(TokenKind::op, start, "||");
        }
        break;
      default:
        break;
    }
    throw LexError(start, std::string("unrecognized character '") +
                              static_cast<char>(c) + "'");
  }

  Token number(SourcePosition start) {
    while (std::isdigit(peek()) != 0) advance();
    if (peek() == '.') {
      advance();
      while (std::isdigit(peek()) != 0) advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(peek(1)) != 0 ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(peek(2)) != 0))) {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      while (std::isdigit(peek()) != 0) advance();
    }
    if (is_ident_start(peek())) {
      throw LexError(here(), "malformed numeric literal");
    }
    return make(TokenKind::numeric_literal, start,
                std::string(text_.substr(start.offset, pos_ - start.offset)));
  }

  // Doubling the closing delimiter escapes it, for both strings and quoted
  // identifiers.
  Token quoted(SourcePosition start, TokenKind kind, char close) {
    advance();
    std::string body;
    while (true) {
      if (at_end()) throw LexError(start, "unterminated quoted literal");
      const char ch = text_[pos_];
      advance();
      if (ch == close) {
        if (!at_end() && text_[pos_] == close) {
          body.push_back(close);
          advance();
          continue;
        }
        break;
      }
      body.push_back(ch);
    }
    return make(kind, start, std::move(body));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::string_literal: return "string-literal";
    case TokenKind::numeric_literal: return "numeric-literal";
    case TokenKind::op: return "operator";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::star: return "star";
  }
  return "unknown";
}

bool is_keyword(std::string_view word) {
  std::string up = upper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), up) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace quest::sql
