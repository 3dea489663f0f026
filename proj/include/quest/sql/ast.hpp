#pragma once

// Value-semantic AST for the supported SELECT subset. Equality is deep and
// structural, which is what the print/parse round-trip is measured against.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace quest::sql {

/// Owning, deep-copying pointer for recursive AST members.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;
struct Query;

enum class ArithOp { add, sub, mul, div };
enum class CompareOp { eq, ne, lt, le, gt, ge };
enum class LogicalOp { and_, or_ };
enum class AggregateFn { count, sum, avg, min, max };
enum class SortDirection { asc, desc };
enum class JoinKind { inner, left, right };

const char* to_string(ArithOp op) noexcept;
const char* to_string(CompareOp op) noexcept;
const char* to_string(LogicalOp op) noexcept;
const char* to_string(AggregateFn fn) noexcept;  // uppercase SQL spelling
const char* to_string(SortDirection direction) noexcept;
std::optional<AggregateFn> aggregate_from_name(std::string_view name);

struct ColumnRef {
  std::string qualifier;  // empty when unqualified
  std::string name;
  bool operator==(const ColumnRef&) const = default;
};

struct Literal {
  enum class Kind { string, number };
  Kind kind = Kind::number;
  std::string text;  // unescaped string body, or numeric lexeme (with sign)
  bool operator==(const Literal&) const = default;
};

struct Arithmetic {
  ArithOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Arithmetic&) const = default;
};

struct Comparison {
  CompareOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Comparison&) const = default;
};

struct Between {
  Box<Expr> subject;
  Box<Expr> low;
  Box<Expr> high;
  bool negated = false;
  bool operator==(const Between&) const = default;
};

struct InList {
  Box<Expr> subject;
  std::vector<Expr> items;
  bool negated = false;
  bool operator==(const InList&) const = default;
};

struct InSubquery {
  Box<Expr> subject;
  Box<Query> query;
  bool negated = false;
  bool operator==(const InSubquery&) const = default;
};

struct Like {
  Box<Expr> subject;
  Box<Expr> pattern;
  bool negated = false;
  bool operator==(const Like&) const = default;
};

struct IsNull {
  Box<Expr> subject;
  bool negated = false;
  bool operator==(const IsNull&) const = default;
};

struct Not {
  Box<Expr> operand;
  bool operator==(const Not&) const = default;
};

// n-ary; operands never share the node's own operator (the parser flattens).
struct Logical {
  LogicalOp op;
  std::vector<Expr> operands;
  bool operator==(const Logical&) const = default;
};

// Aggregates carry `aggregate`; any other name is kept verbatim so the
// far-engine can report it as an unknown function.
struct FunctionCall {
  std::string name;
  std::optional<AggregateFn> aggregate;
  bool distinct = false;
  bool star = false;
  std::vector<Expr> args;
  bool operator==(const FunctionCall&) const = default;
};

struct ScalarSubquery {
  Box<Query> query;
  bool operator==(const ScalarSubquery&) const = default;
};

// Placeholder for a resolved subquery step; produced only by the decomposer.
struct BindingRef {
  std::string name;
  bool set_valued = false;
  bool operator==(const BindingRef&) const = default;
};

struct Expr {
  using Node = std::variant<ColumnRef, Literal, Arithmetic, Comparison, Between, InList,
                            InSubquery, Like, IsNull, Not, Logical, FunctionCall,
                            ScalarSubquery, BindingRef>;
  Node node;

  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, Expr>)
  Expr(T value) : node(std::move(value)) {}  // NOLINT(google-explicit-constructor)

  template <typename T>
  bool is() const noexcept {
    return std::holds_alternative<T>(node);
  }
  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&node);
  }
  template <typename T>
  T* as() noexcept {
    return std::get_if<T>(&node);
  }

  /// Comparison, BETWEEN, IN, LIKE or IS NULL: the leaves of a boolean clause.
  bool is_atomic_predicate() const noexcept;
  /// Atomic predicate or a NOT/AND/OR over boolean operands.
  bool is_boolean() const noexcept;

  bool operator==(const Expr&) const = default;
};

struct SelectItem {
  std::optional<Expr> expr;  // nullopt is `*`
  std::string alias;
  bool is_star() const noexcept { return !expr.has_value(); }
  bool operator==(const SelectItem&) const = default;
};

struct TableRef {
  std::string name;
  std::string alias;
  const std::string& exposed_name() const noexcept { return alias.empty() ? name : alias; }
  bool operator==(const TableRef&) const = default;
};

struct Join {
  JoinKind kind = JoinKind::inner;
  TableRef table;
  Expr on;
  bool operator==(const Join&) const = default;
};

struct OrderItem {
  Expr expr;
  SortDirection direction = SortDirection::asc;
  bool operator==(const OrderItem&) const = default;
};

struct Query {
  bool distinct = false;
  std::vector<SelectItem> select_items;
  std::vector<TableRef> from_tables;
  std::vector<Join> joins;
  std::optional<Expr> where_clause;
  std::vector<ColumnRef> group_by;
  std::optional<Expr> having_clause;
  std::vector<OrderItem> order_by;
  std::optional<std::uint64_t> limit;

  bool operator==(const Query&) const = default;
};

/// Case-insensitive identifier comparison (SQL matching rules).
bool same_identifier(std::string_view a, std::string_view b) noexcept;

/// Calls `fn` on each direct child expression (subquery bodies excluded).
template <typename Fn>
void for_each_child(const Expr& expr, Fn&& fn);

/// Visits `expr` and its descendants pre-order without entering subqueries.
template <typename Fn>
void walk_shallow(const Expr& expr, Fn&& fn);

/// Collects every column reference in `expr`, not entering subqueries.
std::vector<const ColumnRef*> column_refs(const Expr& expr);

/// Queries embedded directly in `expr` (scalar and IN subqueries), in
/// left-to-right order, without descending into them.
std::vector<const Query*> direct_subqueries(const Expr& expr);

/// Copy of `expr` in which every subquery for which `replace` returns a value
/// is substituted by that value. `replace` receives the subquery and whether
/// it is set-valued; a replaced IN subquery becomes a one-item IN list.
template <typename Fn>
Expr rewrite_subqueries(const Expr& expr, Fn&& replace);

/// Function calls (aggregate or not) in `expr` outside subqueries.
std::vector<const FunctionCall*> function_calls(const Expr& expr);

// ---------------------------------------------------------------------------

template <typename Fn>
void for_each_child(const Expr& expr, Fn&& fn) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Arithmetic> || std::is_same_v<N, Comparison>) {
          fn(*n.lhs);
          fn(*n.rhs);
        } else if constexpr (std::is_same_v<N, Between>) {
          fn(*n.subject);
          fn(*n.low);
          fn(*n.high);
        } else if constexpr (std::is_same_v<N, InList>) {
          fn(*n.subject);
          for (const auto& item : n.items) fn(item);
        } else if constexpr (std::is_same_v<N, InSubquery> || std::is_same_v<N, IsNull>) {
          fn(*n.subject);
        } else if constexpr (std::is_same_v<N, Like>) {
          fn(*n.subject);
          fn(*n.pattern);
        } else if constexpr (std::is_same_v<N, Not>) {
          fn(*n.operand);
        } else if constexpr (std::is_same_v<N, Logical>) {
          for (const auto& op : n.operands) fn(op);
        } else if constexpr (std::is_same_v<N, FunctionCall>) {
          for (const auto& arg : n.args) fn(arg);
        }
      },
      expr.node);
}

template <typename Fn>
void walk_shallow(const Expr& expr, Fn&& fn) {
  fn(expr);
  for_each_child(expr, [&](const Expr& child) { walk_shallow(child, fn); });
}

template <typename Fn>
Expr rewrite_subqueries(const Expr& expr, Fn&& replace) {
  auto rec = [&](const Expr& e) { return rewrite_subqueries(e, replace); };
  return std::visit(
      [&](const auto& n) -> Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ScalarSubquery>) {
          if (std::optional<Expr> sub = replace(*n.query, false)) return *std::move(sub);
          return n;
        } else if constexpr (std::is_same_v<N, InSubquery>) {
          if (std::optional<Expr> sub = replace(*n.query, true)) {
            InList out{rec(*n.subject), {}, n.negated};
            out.items.push_back(*std::move(sub));
            return out;
          }
          return InSubquery{rec(*n.subject), n.query, n.negated};
        } else if constexpr (std::is_same_v<N, Arithmetic>) {
          return Arithmetic{n.op, rec(*n.lhs), rec(*n.rhs)};
        } else if constexpr (std::is_same_v<N, Comparison>) {
          return Comparison{n.op, rec(*n.lhs), rec(*n.rhs)};
        } else if constexpr (std::is_same_v<N, Between>) {
          return Between{rec(*n.subject), rec(*n.low), rec(*n.high), n.negated};
        } else if constexpr (std::is_same_v<N, InList>) {
          InList out{rec(*n.subject), {}, n.negated};
          for (const auto& item : n.items) out.items.push_back(rec(item));
          return out;
        } else if constexpr (std::is_same_v<N, Like>) {
          return Like{rec(*n.subject), rec(*n.pattern), n.negated};
        } else if constexpr (std::is_same_v<N, IsNull>) {
          return IsNull{rec(*n.subject), n.negated};
        } else if constexpr (std::is_same_v<N, Not>) {
          return Not{rec(*n.operand)};
        } else if constexpr (std::is_same_v<N, Logical>) {
          Logical out{n.op, {}};
          for (const auto& op : n.operands) out.operands.push_back(rec(op));
          return out;
        } else if constexpr (std::is_same_v<N, FunctionCall>) {
          FunctionCall out{n.name, n.aggregate, n.distinct, n.star, {}};
          for (const auto& arg : n.args) out.args.push_back(rec(arg));
          return out;
        } else {
          return n;
        }
      },
      expr.node);
}

}  // namespace quest::sql
