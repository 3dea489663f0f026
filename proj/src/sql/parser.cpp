#include "quest/sql/parser.hpp"

#include <algorithm>
#include <charconv>
#include <initializer_list>

#include "quest/error.hpp"
#include "quest/sql/token.hpp"

namespace quest {

ParseError::ParseError(SourcePosition position, std::vector<std::string> expected,
                       const std::string& message)
    : Error([&] {
        std::string what = "parse-error at " + std::to_string(position.line) + ":" +
                           std::to_string(position.column) + ": " + message;
        if (!expected.empty()) {
          what += " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) what += ", ";
            what += expected[i];
          }
          what += ")";
        }
        return what;
      }()),
      position_(position),
      expected_(std::move(expected)) {}

}  // namespace quest

namespace quest::sql {

namespace {

// Keywords that open a construct outside the subset, mapped to the feature
// name reported in UnsupportedFeature.
const char* unsupported_keyword(const Token& t) {
  if (t.kind != TokenKind::keyword) return nullptr;
  static constexpr std::pair<std::string_view, const char*> kTable[] = {
      {"UNION", "UNION"},       {"INTERSECT", "INTERSECT"}, {"EXCEPT", "EXCEPT"},
      {"WITH", "WITH"},         {"OVER", "window function"}, {"WINDOW", "window function"},
      {"CASE", "CASE"},         {"CAST", "CAST"},           {"EXISTS", "EXISTS"},
      {"OFFSET", "OFFSET"},     {"INSERT", "INSERT"},       {"UPDATE", "UPDATE"},
      {"DELETE", "DELETE"},     {"CREATE", "CREATE"},       {"DROP", "DROP"},
      {"ALTER", "ALTER"},       {"GLOB", "GLOB"},           {"ESCAPE", "ESCAPE"},
      {"NATURAL", "NATURAL JOIN"}, {"CROSS", "CROSS JOIN"}, {"FULL", "FULL JOIN"},
      {"USING", "USING"},       {"TRUE", "boolean literal"}, {"FALSE", "boolean literal"},
      {"PARTITION", "window function"},
  };
  for (const auto& [kw, feature] : kTable) {
    if (t.value == kw) return feature;
  }
  return nullptr;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), tokens_(tokenize(text)) {}

  Query parse_statement() {
    if (!at_end()) {
      if (const char* feature = unsupported_keyword(peek())) {
        throw UnsupportedFeature(peek().position, feature);
      }
    }
    Query q = parse_select();
    if (accept_symbol(";")) {
      if (!at_end()) throw UnsupportedFeature(peek().position, "multiple statements");
    }
    if (!at_end()) {
      if (const char* feature = unsupported_keyword(peek())) {
        throw UnsupportedFeature(peek().position, feature);
      }
      fail({"end of input"}, "unexpected trailing input '" + peek().text + "'");
    }
    return q;
  }

 private:
  // -- token cursor ---------------------------------------------------------

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEnd{};
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : kEnd;
  }
  bool peek_exists(std::size_t ahead = 0) const { return pos_ + ahead < tokens_.size(); }

  SourcePosition current_position() const {
    if (!at_end()) return peek().position;
    SourcePosition end{text_.size(), 1, 1};
    for (char c : text_) {
      if (c == '\n') {
        ++end.line;
        end.column = 1;
      } else {
        ++end.column;
      }
    }
    return end;
  }

  std::string found() const {
    return at_end() ? std::string("unexpected end of input") : "unexpected '" + peek().text + "'";
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& message) const {
    throw ParseError(current_position(), std::move(expected), message);
  }

  bool check_keyword(std::string_view kw, std::size_t ahead = 0) const {
    return peek_exists(ahead) && peek(ahead).is_keyword(kw);
  }
  bool check_symbol(std::string_view sym, std::size_t ahead = 0) const {
    return peek_exists(ahead) && peek(ahead).is_symbol(sym);
  }
  bool accept_keyword(std::string_view kw) {
    if (!check_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  bool accept_symbol(std::string_view sym) {
    if (!check_symbol(sym)) return false;
    ++pos_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail({std::string(kw)}, "missing " + std::string(kw));
  }
  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) fail({"'" + std::string(sym) + "'"}, "missing '" + std::string(sym) + "'");
  }

  void reject_unsupported() const {
    if (at_end()) return;
    if (const char* feature = unsupported_keyword(peek())) {
      throw UnsupportedFeature(peek().position, feature);
    }
  }

  std::string expect_identifier(const char* what) {
    reject_unsupported();
    if (!peek_exists() || peek().kind != TokenKind::identifier) {
      fail({what}, found());
    }
    return tokens_[pos_++].value;
  }

  // -- statements -----------------------------------------------------------

  Query parse_select() {
    if (!check_keyword("SELECT")) fail({"SELECT"}, found());
    ++pos_;
    Query q;
    if (accept_keyword("DISTINCT")) {
      q.distinct = true;
    } else {
      accept_keyword("ALL");
    }

    do {
      q.select_items.push_back(parse_select_item());
    } while (accept_symbol(","));

    expect_keyword("FROM");
    const SourcePosition from_position = current_position();
    do {
      q.from_tables.push_back(parse_table_ref());
    } while (accept_symbol(","));

    while (true) {
      reject_unsupported();
      JoinKind kind = JoinKind::inner;
      if (accept_keyword("INNER")) {
        expect_keyword("JOIN");
      } else if (accept_keyword("LEFT")) {
        kind = JoinKind::left;
        accept_keyword("OUTER");
        expect_keyword("JOIN");
      } else if (accept_keyword("RIGHT")) {
        kind = JoinKind::right;
        accept_keyword("OUTER");
        expect_keyword("JOIN");
      } else if (!accept_keyword("JOIN")) {
        break;
      }
      TableRef table = parse_table_ref();
      reject_unsupported();
      expect_keyword("ON");
      Expr on = parse_boolean_clause("ON");
      q.joins.push_back(Join{kind, std::move(table), std::move(on)});
    }
    check_unique_aliases(q, from_position);

    if (accept_keyword("WHERE")) q.where_clause = parse_boolean_clause("WHERE");

    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        const SourcePosition at = current_position();
        Expr key = parse_expr();
        const auto* col = key.as<ColumnRef>();
        if (col == nullptr) throw UnsupportedFeature(at, "GROUP BY expression");
        q.group_by.push_back(*col);
      } while (accept_symbol(","));
    }

    if (accept_keyword("HAVING")) q.having_clause = parse_boolean_clause("HAVING");

    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderItem item{parse_expr(), SortDirection::asc};
        if (accept_keyword("DESC")) {
          item.direction = SortDirection::desc;
        } else {
          accept_keyword("ASC");
        }
        q.order_by.push_back(std::move(item));
      } while (accept_symbol(","));
    }

    if (accept_keyword("LIMIT")) {
      if (!peek_exists() || peek().kind != TokenKind::numeric_literal) {
        fail({"non-negative integer"}, "LIMIT requires a non-negative integer");
      }
      const std::string& digits = peek().value;
      std::uint64_t value = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        fail({"non-negative integer"}, "LIMIT requires a non-negative integer");
      }
      ++pos_;
      q.limit = value;
      if (accept_symbol(",")) throw UnsupportedFeature(tokens_[pos_ - 1].position, "LIMIT offset");
      reject_unsupported();
    }
    return q;
  }

  SelectItem parse_select_item() {
    if (check_symbol("*")) {
      ++pos_;
      return SelectItem{std::nullopt, {}};
    }
    if (peek_exists(2) && peek().kind == TokenKind::identifier && check_symbol(".", 1) &&
        check_symbol("*", 2)) {
      throw UnsupportedFeature(peek().position, "qualified star");
    }
    SelectItem item{parse_expr(), {}};
    item.alias = parse_optional_alias();
    return item;
  }

  std::string parse_optional_alias() {
    if (accept_keyword("AS")) {
      if (peek_exists() && peek().kind == TokenKind::string_literal) return tokens_[pos_++].value;
      return expect_identifier("alias");
    }
    if (peek_exists() && peek().kind == TokenKind::identifier) return tokens_[pos_++].value;
    return {};
  }

  TableRef parse_table_ref() {
    if (check_symbol("(")) throw UnsupportedFeature(peek().position, "derived table");
    TableRef ref;
    ref.name = expect_identifier("table name");
    if (check_symbol(".")) throw UnsupportedFeature(peek().position, "schema-qualified table");
    ref.alias = parse_optional_alias();
    return ref;
  }

  static void check_unique_aliases(const Query& q, SourcePosition at) {
    std::vector<const TableRef*> refs;
    for (const auto& t : q.from_tables) refs.push_back(&t);
    for (const auto& j : q.joins) refs.push_back(&j.table);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      for (std::size_t k = i + 1; k < refs.size(); ++k) {
        if (same_identifier(refs[i]->exposed_name(), refs[k]->exposed_name())) {
          throw ParseError(at, {}, "duplicate table alias '" + refs[k]->exposed_name() + "'");
        }
      }
    }
  }

  // -- expressions ----------------------------------------------------------

  Expr parse_boolean_clause(const char* clause) {
    const SourcePosition at = current_position();
    Expr e = parse_expr();
    if (!e.is_boolean()) {
      throw ParseError(at, {"predicate"}, std::string(clause) + " requires a boolean condition");
    }
    return e;
  }

  Expr parse_expr() { return parse_or(); }

  Expr make_logical(LogicalOp op, std::vector<Expr> parts, SourcePosition at) {
    std::vector<Expr> flat;
    for (auto& part : parts) {
      if (!part.is_boolean()) {
        throw ParseError(at, {"predicate"}, std::string(to_string(op)) + " requires boolean operands");
      }
      if (auto* inner = part.as<Logical>(); inner != nullptr && inner->op == op) {
        for (auto& sub : inner->operands) flat.push_back(std::move(sub));
      } else {
        flat.push_back(std::move(part));
      }
    }
    return Logical{op, std::move(flat)};
  }

  Expr parse_or() {
    const SourcePosition at = current_position();
    Expr first = parse_and();
    if (!check_keyword("OR")) return first;
    std::vector<Expr> parts;
    parts.push_back(std::move(first));
    while (accept_keyword("OR")) parts.push_back(parse_and());
    return make_logical(LogicalOp::or_, std::move(parts), at);
  }

  Expr parse_and() {
    const SourcePosition at = current_position();
    Expr first = parse_not();
    if (!check_keyword("AND")) return first;
    std::vector<Expr> parts;
    parts.push_back(std::move(first));
    while (accept_keyword("AND")) parts.push_back(parse_not());
    return make_logical(LogicalOp::and_, std::move(parts), at);
  }

  Expr parse_not() {
    if (check_keyword("NOT")) {
      ++pos_;
      reject_unsupported();
      const SourcePosition at = current_position();
      Expr operand = parse_not();
      if (!operand.is_boolean()) throw ParseError(at, {"predicate"}, "NOT requires a boolean operand");
      return Not{std::move(operand)};
    }
    return parse_predicate();
  }

  Expr parse_predicate() {
    Expr lhs = parse_additive();
    reject_unsupported();
    if (!peek_exists()) return lhs;
    const Token& t = peek();

    if (t.kind == TokenKind::op) {
      static constexpr std::pair<std::string_view, CompareOp> kOps[] = {
          {"=", CompareOp::eq}, {"<>", CompareOp::ne}, {"<", CompareOp::lt},
          {"<=", CompareOp::le}, {">", CompareOp::gt}, {">=", CompareOp::ge}};
      for (const auto& [sym, op] : kOps) {
        if (t.value == sym) {
          ++pos_;
          reject_unsupported();
          Expr rhs = parse_additive();
          return Comparison{op, std::move(lhs), std::move(rhs)};
        }
      }
      if (t.value == "||") throw UnsupportedFeature(t.position, "string concatenation");
      if (t.value == "%") throw UnsupportedFeature(t.position, "modulo operator");
      return lhs;
    }

    bool negated = false;
    if (check_keyword("NOT") &&
        (check_keyword("BETWEEN", 1) || check_keyword("IN", 1) || check_keyword("LIKE", 1) ||
         check_keyword("GLOB", 1))) {
      negated = true;
      ++pos_;
      reject_unsupported();
    }
    if (accept_keyword("BETWEEN")) {
      Expr low = parse_additive();
      expect_keyword("AND");
      Expr high = parse_additive();
      return Between{std::move(lhs), std::move(low), std::move(high), negated};
    }
    if (accept_keyword("IN")) {
      expect_symbol("(");
      if (check_keyword("SELECT")) {
        Query sub = parse_select();
        expect_symbol_in_subquery();
        return InSubquery{std::move(lhs), std::move(sub), negated};
      }
      std::vector<Expr> items;
      do {
        items.push_back(parse_additive());
      } while (accept_symbol(","));
      expect_symbol(")");
      return InList{std::move(lhs), std::move(items), negated};
    }
    if (accept_keyword("LIKE")) {
      Expr pattern = parse_additive();
      reject_unsupported();
      return Like{std::move(lhs), std::move(pattern), negated};
    }
    if (accept_keyword("IS")) {
      const bool is_not = accept_keyword("NOT");
      expect_keyword("NULL");
      return IsNull{std::move(lhs), is_not};
    }
    return lhs;
  }

  // Closing parenthesis of a subquery; a set operation here is a subset
  // violation rather than a syntax error.
  void expect_symbol_in_subquery() {
    reject_unsupported();
    expect_symbol(")");
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (peek_exists() && peek().kind == TokenKind::op &&
           (peek().value == "+" || peek().value == "-")) {
      const ArithOp op = peek().value == "+" ? ArithOp::add : ArithOp::sub;
      ++pos_;
      Expr rhs = parse_multiplicative();
      lhs = Arithmetic{op, std::move(lhs), std::move(rhs)};
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    while (peek_exists() && (peek().kind == TokenKind::star ||
                             (peek().kind == TokenKind::op && peek().value == "/"))) {
      const ArithOp op = peek().kind == TokenKind::star ? ArithOp::mul : ArithOp::div;
      ++pos_;
      Expr rhs = parse_unary();
      lhs = Arithmetic{op, std::move(lhs), std::move(rhs)};
    }
    if (peek_exists() && peek().kind == TokenKind::op && peek().value == "%") {
      throw UnsupportedFeature(peek().position, "modulo operator");
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek_exists() && peek().kind == TokenKind::op && peek().value == "-") {
      const SourcePosition at = peek().position;
      if (peek_exists(1) && peek(1).kind == TokenKind::numeric_literal) {
        pos_ += 2;
        std::string text = tokens_[pos_ - 1].value;
        if (text.front() == '-') {
          text.erase(0, 1);
        } else {
          text.insert(0, "-");
        }
        return Literal{Literal::Kind::number, std::move(text)};
      }
      throw UnsupportedFeature(at, "unary minus");
    }
    if (peek_exists() && peek().kind == TokenKind::op && peek().value == "+") {
      throw UnsupportedFeature(peek().position, "unary plus");
    }
    return parse_primary();
  }

  Expr parse_primary() {
    reject_unsupported();
    if (!peek_exists()) fail({"expression"}, "unexpected end of input");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::string_literal:
        ++pos_;
        return Literal{Literal::Kind::string, t.value};
      case TokenKind::numeric_literal:
        ++pos_;
        return Literal{Literal::Kind::number, t.value};
      case TokenKind::identifier: {
        if (check_symbol("(", 1)) return parse_function_call();
        ++pos_;
        ColumnRef ref{{}, t.value};
        if (accept_symbol(".")) {
          if (check_symbol("*")) throw UnsupportedFeature(peek().position, "qualified star");
          ref.qualifier = std::move(ref.name);
          ref.name = expect_identifier("column name");
          if (check_symbol(".")) throw UnsupportedFeature(peek().position, "schema-qualified column");
        }
        return ref;
      }
      case TokenKind::punctuation:
        if (t.value == "(") {
          ++pos_;
          if (check_keyword("SELECT")) {
            Query sub = parse_select();
            expect_symbol_in_subquery();
            return ScalarSubquery{std::move(sub)};
          }
          Expr inner = parse_expr();
          expect_symbol(")");
          return inner;
        }
        break;
      case TokenKind::keyword:
        if (t.value == "NULL") throw UnsupportedFeature(t.position, "NULL literal");
        break;
      default:
        break;
    }
    fail({"expression"}, "unexpected '" + t.text + "'");
  }

  Expr parse_function_call() {
    const Token& name_token = tokens_[pos_];
    pos_ += 2;  // name and '('
    FunctionCall call;
    call.aggregate = aggregate_from_name(name_token.value);
    call.name = call.aggregate ? to_string(*call.aggregate) : name_token.value;

    if (call.aggregate) {
      if (accept_keyword("DISTINCT")) call.distinct = true;
      if (*call.aggregate == AggregateFn::count && !call.distinct && check_symbol("*")) {
        ++pos_;
        call.star = true;
      } else {
        ++aggregate_depth_;
        const SourcePosition at = current_position();
        call.args.push_back(parse_expr());
        --aggregate_depth_;
        if (aggregate_depth_ == 0 && contains_aggregate(call.args.front())) {
          throw ParseError(at, {}, "aggregate calls cannot be nested");
        }
      }
      expect_symbol(")");
    } else {
      if (!accept_symbol(")")) {
        do {
          if (check_symbol("*")) {
            ++pos_;
            call.star = true;
          } else {
            call.args.push_back(parse_expr());
          }
        } while (accept_symbol(","));
        expect_symbol(")");
      }
    }
    if (check_keyword("OVER")) throw UnsupportedFeature(peek().position, "window function");
    return call;
  }

  static bool contains_aggregate(const Expr& e) {
    bool found = false;
    walk_shallow(e, [&](const Expr& node) {
      if (const auto* f = node.as<FunctionCall>(); f != nullptr && f->aggregate) found = true;
    });
    return found;
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int aggregate_depth_ = 0;
};

}  // namespace

Query parse_query(std::string_view text) { return Parser(text).parse_statement(); }

}  // namespace quest::sql
