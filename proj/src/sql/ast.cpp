#include "quest/sql/ast.hpp"

#include <algorithm>
#include <cctype>

namespace quest::sql {

const char* to_string(ArithOp op) noexcept {
  switch (op) {
    case ArithOp::add: return "+";
    case ArithOp::sub: return "-";
    case ArithOp::mul: return "*";
    case ArithOp::div: return "/";
  }
  return "?";
}

const char* to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "<>";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

const char* to_string(LogicalOp op) noexcept { return op == LogicalOp::and_ ? "AND" : "OR"; }

const char* to_string(AggregateFn fn) noexcept {
  switch (fn) {
    case AggregateFn::count: return "COUNT";
    case AggregateFn::sum: return "SUM";
    case AggregateFn::avg: return "AVG";
    case AggregateFn::min: return "MIN";
    case AggregateFn::max: return "MAX";
  }
  return "?";
}

const char* to_string(SortDirection direction) noexcept {
  return direction == SortDirection::asc ? "ASC" : "DESC";
}

std::optional<AggregateFn> aggregate_from_name(std::string_view name) {
  static constexpr AggregateFn kAll[] = {AggregateFn::count, AggregateFn::sum, AggregateFn::avg,
                                         AggregateFn::min, AggregateFn::max};
  for (AggregateFn fn : kAll) {
    if (same_identifier(name, to_string(fn))) return fn;
  }
  return std::nullopt;
}

bool same_identifier(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

bool Expr::is_atomic_predicate() const noexcept {
  return is<Comparison>() || is<Between>() || is<InList>() || is<InSubquery>() || is<Like>() ||
         is<IsNull>();
}

bool Expr::is_boolean() const noexcept {
  return is_atomic_predicate() || is<Not>() || is<Logical>();
}

std::vector<const ColumnRef*> column_refs(const Expr& expr) {
  std::vector<const ColumnRef*> out;
  walk_shallow(expr, [&](const Expr& e) {
    if (const auto* c = e.as<ColumnRef>()) out.push_back(c);
  });
  return out;
}

namespace {

void collect_subqueries(const Expr& expr, std::vector<const Query*>& out) {
  if (const auto* s = expr.as<ScalarSubquery>()) {
    out.push_back(&*s->query);
    return;
  }
  for_each_child(expr, [&](const Expr& child) { collect_subqueries(child, out); });
  if (const auto* in = expr.as<InSubquery>()) out.push_back(&*in->query);
}

}  // namespace

std::vector<const Query*> direct_subqueries(const Expr& expr) {
  std::vector<const Query*> out;
  collect_subqueries(expr, out);
  return out;
}

std::vector<const FunctionCall*> function_calls(const Expr& expr) {
  std::vector<const FunctionCall*> out;
  walk_shallow(expr, [&](const Expr& e) {
    if (const auto* f = e.as<FunctionCall>()) out.push_back(f);
  });
  return out;
}

}  // namespace quest::sql
