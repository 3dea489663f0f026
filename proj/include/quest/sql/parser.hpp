#pragma once

#include <string>
#include <string_view>

#include "quest/sql/ast.hpp"

namespace quest::sql {

/// Parses one SELECT statement (optionally terminated by `;`).
///
/// Throws LexError, ParseError (grammar violation, with the set of tokens
/// that would have been accepted) or UnsupportedFeature (recognized SQL
/// outside the subset: set operations, CTEs, window functions, CASE, ...).
Query parse_query(std::string_view text);

/// Canonical single-line rendering: uppercase keywords, single spaces,
/// parenthesized subqueries. parse_query(print_query(q)) == q.
std::string print_query(const Query& query);
std::string print_expr(const Expr& expr);

/// Identifier as it must be written to re-lex to the same name.
std::string quote_identifier(std::string_view name);

}  // namespace quest::sql
