#include <cctype>
#include <string>

#include "quest/sql/parser.hpp"
#include "quest/sql/token.hpp"

namespace quest::sql {

namespace {

// Binding strength used to decide where parentheses are required.
int precedence(const Expr& e) {
  if (const auto* l = e.as<Logical>()) return l->op == LogicalOp::or_ ? 1 : 2;
  if (e.is<Not>()) return 3;
  if (e.is_atomic_predicate()) return 4;
  if (const auto* a = e.as<Arithmetic>()) {
    return (a->op == ArithOp::add || a->op == ArithOp::sub) ? 5 : 6;
  }
  return 7;
}

std::string quote_string(std::string_view body) {
  std::string out = "'";
  for (char c : body) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

class Printer {
 public:
  std::string query(const Query& q) {
    std::string out = "SELECT ";
    if (q.distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < q.select_items.size(); ++i) {
      if (i > 0) out += ", ";
      const auto& item = q.select_items[i];
      if (item.is_star()) {
        out += "*";
      } else {
        out += expr(*item.expr);
        if (!item.alias.empty()) out += " AS " + quote_identifier(item.alias);
      }
    }
    out += " FROM ";
    for (std::size_t i = 0; i < q.from_tables.size(); ++i) {
      if (i > 0) out += ", ";
      out += table(q.from_tables[i]);
    }
    for (const auto& j : q.joins) {
      switch (j.kind) {
        case JoinKind::inner: out += " JOIN "; break;
        case JoinKind::left: out += " LEFT JOIN "; break;
        case JoinKind::right: out += " RIGHT JOIN "; break;
      }
      out += table(j.table) + " ON " + expr(j.on);
    }
    if (q.where_clause) out += " WHERE " + expr(*q.where_clause);
    if (!q.group_by.empty()) {
      out += " GROUP BY ";
      for (std::size_t i = 0; i < q.group_by.size(); ++i) {
        if (i > 0) out += ", ";
        out += column(q.group_by[i]);
      }
    }
    if (q.having_clause) out += " HAVING " + expr(*q.having_clause);
    if (!q.order_by.empty()) {
      out += " ORDER BY ";
      for (std::size_t i = 0; i < q.order_by.size(); ++i) {
        if (i > 0) out += ", ";
        out += expr(q.order_by[i].expr);
        out += ' ';
        out += to_string(q.order_by[i].direction);
      }
    }
    if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
    return out;
  }

  std::string expr(const Expr& e) {
    return std::visit([&](const auto& n) { return node(n); }, e.node);
  }

 private:
  static std::string table(const TableRef& t) {
    std::string out = quote_identifier(t.name);
    if (!t.alias.empty()) out += " AS " + quote_identifier(t.alias);
    return out;
  }

  static std::string column(const ColumnRef& c) {
    if (c.qualifier.empty()) return quote_identifier(c.name);
    return quote_identifier(c.qualifier) + "." + quote_identifier(c.name);
  }

  // Operand of a binary operator at `parent` precedence. Right operands of
  // left-associative arithmetic need parentheses at equal precedence too.
  std::string operand(const Expr& child, int parent, bool right) {
    const int p = precedence(child);
    const bool wrap = p < parent || (right && p == parent);
    return wrap ? "(" + expr(child) + ")" : expr(child);
  }

  std::string node(const ColumnRef& c) { return column(c); }

  std::string node(const Literal& l) {
    return l.kind == Literal::Kind::string ? quote_string(l.text) : l.text;
  }

  std::string node(const Arithmetic& a) {
    const int p = a.op == ArithOp::add || a.op == ArithOp::sub ? 5 : 6;
    return operand(*a.lhs, p, false) + " " + to_string(a.op) + " " + operand(*a.rhs, p, true);
  }

  std::string node(const Comparison& c) {
    return operand(*c.lhs, 5, false) + " " + to_string(c.op) + " " + operand(*c.rhs, 5, false);
  }

  std::string node(const Between& b) {
    return operand(*b.subject, 5, false) + (b.negated ? " NOT BETWEEN " : " BETWEEN ") +
           operand(*b.low, 5, false) + " AND " + operand(*b.high, 5, false);
  }

  std::string node(const InList& in) {
    std::string out = operand(*in.subject, 5, false) + (in.negated ? " NOT IN (" : " IN (");
    for (std::size_t i = 0; i < in.items.size(); ++i) {
      if (i > 0) out += ", ";
      out += operand(in.items[i], 5, false);
    }
    return out + ")";
  }

  std::string node(const InSubquery& in) {
    return operand(*in.subject, 5, false) + (in.negated ? " NOT IN (" : " IN (") +
           query(*in.query) + ")";
  }

  std::string node(const Like& l) {
    return operand(*l.subject, 5, false) + (l.negated ? " NOT LIKE " : " LIKE ") +
           operand(*l.pattern, 5, false);
  }

  std::string node(const IsNull& n) {
    return operand(*n.subject, 5, false) + (n.negated ? " IS NOT NULL" : " IS NULL");
  }

  std::string node(const Not& n) { return "NOT (" + expr(*n.operand) + ")"; }

  std::string node(const Logical& l) {
    const int p = l.op == LogicalOp::or_ ? 1 : 2;
    std::string out;
    for (std::size_t i = 0; i < l.operands.size(); ++i) {
      if (i > 0) out += std::string(" ") + to_string(l.op) + " ";
      const Expr& child = l.operands[i];
      out += precedence(child) <= p ? "(" + expr(child) + ")" : expr(child);
    }
    return out;
  }

  std::string node(const FunctionCall& f) {
    std::string out = f.aggregate ? std::string(to_string(*f.aggregate)) : quote_identifier(f.name);
    out += "(";
    if (f.distinct) out += "DISTINCT ";
    bool first = true;
    if (f.star) {
      out += "*";
      first = false;
    }
    for (const auto& arg : f.args) {
      if (!first) out += ", ";
      out += expr(arg);
      first = false;
    }
    return out + ")";
  }

  std::string node(const ScalarSubquery& s) { return "(" + query(*s.query) + ")"; }

  std::string node(const BindingRef& b) { return "{" + b.name + "}"; }
};

}  // namespace

std::string quote_identifier(std::string_view name) {
  bool plain = !name.empty() &&
               (std::isalpha(static_cast<unsigned char>(name.front())) != 0 || name.front() == '_');
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) == 0 && c != '_' && c != '$' && u < 0x80) plain = false;
  }
  if (plain && !is_keyword(name)) return std::string(name);
  std::string out = "`";
  for (char c : name) {
    if (c == '`') out += '`';
    out += c;
  }
  return out + "`";
}

std::string print_query(const Query& query) { return Printer().query(query); }

std::string print_expr(const Expr& expr) { return Printer().expr(expr); }

}  // namespace quest::sql
