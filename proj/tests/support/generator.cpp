#include "generator.hpp"

#include <algorithm>
#include <set>

#include "quest/sql/parser.hpp"

namespace quest::testing {

using namespace quest::sql;

namespace {

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[pick(rng, items.size())];
}

Literal number(std::string text) { return Literal{Literal::Kind::number, std::move(text)}; }
Literal string(std::string text) { return Literal{Literal::Kind::string, std::move(text)}; }

Expr conjoin(LogicalOp op, std::vector<Expr> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  return Logical{op, std::move(parts)};
}

// -- arbitrary ASTs -------------------------------------------------------------

const std::vector<std::string> kNames = {
    "flights", "fare", "t", "Orders", "order", "select name", "a_b", "x$1",
    "Ünïcode", "group", "back`tick", "f1", "Col", "value", "when", "_hidden"};
const std::vector<std::string> kFunctions = {"lower", "abs", "round", "coalesce", "substr", "Strftime"};
const std::vector<std::string> kStrings = {"Boston", "", "it's", "New York", "a%", "café", "''", "x y z"};
const std::vector<std::string> kNumbers = {"0", "1", "42", "720", "3.14", "-7", "-0.5", "1000000"};

class ArbitraryAst {
 public:
  explicit ArbitraryAst(Rng& rng) : rng_(rng) {}

  Query query(int depth) {
    Query q;
    q.distinct = chance(rng_, 0.2);
    if (chance(rng_, 0.15)) {
      q.select_items.push_back(SelectItem{std::nullopt, {}});
    } else {
      const std::size_t n = 1 + pick(rng_, 3);
      for (std::size_t i = 0; i < n; ++i) {
        SelectItem item{value(depth, false), {}};
        if (chance(rng_, 0.3)) item.alias = pick(rng_, kNames);
        q.select_items.push_back(std::move(item));
      }
    }
    std::set<std::string> exposed;
    auto table = [&]() {
      TableRef t{pick(rng_, kNames), {}};
      if (chance(rng_, 0.4) || exposed.count(lower(t.name)) != 0) {
        t.alias = "a" + std::to_string(exposed.size());
      }
      exposed.insert(lower(t.exposed_name()));
      return t;
    };
    q.from_tables.push_back(table());
    if (chance(rng_, 0.2)) q.from_tables.push_back(table());
    if (chance(rng_, 0.25)) {
      static constexpr JoinKind kKinds[] = {JoinKind::inner, JoinKind::left, JoinKind::right};
      q.joins.push_back(Join{kKinds[pick(rng_, 3)], table(), boolean(depth, false)});
    }
    if (chance(rng_, 0.7)) q.where_clause = boolean(depth, false);
    if (chance(rng_, 0.25)) {
      const std::size_t n = 1 + pick(rng_, 2);
      for (std::size_t i = 0; i < n; ++i) q.group_by.push_back(column());
      if (chance(rng_, 0.5)) q.having_clause = boolean(depth, false);
    }
    if (chance(rng_, 0.35)) {
      const std::size_t n = 1 + pick(rng_, 2);
      for (std::size_t i = 0; i < n; ++i) {
        q.order_by.push_back(OrderItem{value(depth, false),
                                       chance(rng_, 0.5) ? SortDirection::asc : SortDirection::desc});
      }
    }
    if (chance(rng_, 0.3)) {
      q.limit = chance(rng_, 0.1) ? std::uint64_t{18446744073709551615ULL} : pick(rng_, 100);
    }
    return q;
  }

 private:
  static std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  ColumnRef column() {
    ColumnRef c{{}, pick(rng_, kNames)};
    if (chance(rng_, 0.4)) c.qualifier = pick(rng_, kNames);
    return c;
  }

  Expr literal() {
    return chance(rng_, 0.5) ? Expr(number(pick(rng_, kNumbers))) : Expr(string(pick(rng_, kStrings)));
  }

  Expr value(int depth, bool in_aggregate) {
    const int roll = static_cast<int>(pick(rng_, 10));
    if (depth <= 0 || roll < 4) return chance(rng_, 0.55) ? Expr(column()) : literal();
    if (roll < 6) {
      static constexpr ArithOp kOps[] = {ArithOp::add, ArithOp::sub, ArithOp::mul, ArithOp::div};
      return Arithmetic{kOps[pick(rng_, 4)], value(depth - 1, in_aggregate), value(depth - 1, in_aggregate)};
    }
    if (roll < 8) {
      if (!in_aggregate && chance(rng_, 0.6)) {
        static constexpr AggregateFn kFns[] = {AggregateFn::count, AggregateFn::sum, AggregateFn::avg,
                                               AggregateFn::min, AggregateFn::max};
        const AggregateFn fn = kFns[pick(rng_, 5)];
        FunctionCall call{to_string(fn), fn, false, false, {}};
        if (fn == AggregateFn::count && chance(rng_, 0.4)) {
          call.star = true;
        } else {
          call.distinct = chance(rng_, 0.25);
          call.args.push_back(value(depth - 1, true));
        }
        return call;
      }
      FunctionCall call{pick(rng_, kFunctions), std::nullopt, false, false, {}};
      const std::size_t n = pick(rng_, 3);
      for (std::size_t i = 0; i < n; ++i) call.args.push_back(value(depth - 1, in_aggregate));
      return call;
    }
    if (roll < 9) return ScalarSubquery{query(depth - 1)};
    return column();
  }

  Expr atomic(int depth, bool in_aggregate) {
    const auto v = [&] { return value(depth - 1, in_aggregate); };
    switch (pick(rng_, depth > 0 ? 7 : 6)) {
      case 0:
      case 1: {
        static constexpr CompareOp kOps[] = {CompareOp::eq, CompareOp::ne, CompareOp::lt,
                                             CompareOp::le, CompareOp::gt, CompareOp::ge};
        return Comparison{kOps[pick(rng_, 6)], v(), v()};
      }
      case 2: return Between{v(), v(), v(), chance(rng_, 0.3)};
      case 3: {
        InList in{v(), {}, chance(rng_, 0.3)};
        const std::size_t n = 1 + pick(rng_, 3);
        for (std::size_t i = 0; i < n; ++i) in.items.push_back(v());
        return in;
      }
      case 4: return Like{v(), Expr(string(pick(rng_, kStrings))), chance(rng_, 0.3)};
      case 5: return IsNull{v(), chance(rng_, 0.5)};
      default: return InSubquery{v(), query(depth - 1), chance(rng_, 0.3)};
    }
  }

  // `parent` is the operator of the enclosing logical, if any; operands
  // never repeat it, matching the parser's flattening.
  Expr boolean(int depth, bool in_aggregate, std::optional<LogicalOp> parent = std::nullopt) {
    const int roll = static_cast<int>(pick(rng_, 10));
    if (depth <= 0 || roll < 5) return atomic(depth, in_aggregate);
    if (roll < 6) return Not{boolean(depth - 1, in_aggregate)};
    LogicalOp op = chance(rng_, 0.5) ? LogicalOp::and_ : LogicalOp::or_;
    if (parent && *parent == op) op = op == LogicalOp::and_ ? LogicalOp::or_ : LogicalOp::and_;
    Logical l{op, {}};
    const std::size_t n = 2 + pick(rng_, 2);
    for (std::size_t i = 0; i < n; ++i) l.operands.push_back(boolean(depth - 1, in_aggregate, op));
    return l;
  }

  Rng& rng_;
};

// -- canonical form -------------------------------------------------------------

void canonicalize(Expr& e);

void canonicalize_children(Expr& e) {
  std::visit(
      [&](auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Arithmetic> || std::is_same_v<N, Comparison>) {
          canonicalize(*n.lhs);
          canonicalize(*n.rhs);
        } else if constexpr (std::is_same_v<N, Between>) {
          canonicalize(*n.subject);
          canonicalize(*n.low);
          canonicalize(*n.high);
        } else if constexpr (std::is_same_v<N, InList>) {
          canonicalize(*n.subject);
          for (auto& item : n.items) canonicalize(item);
        } else if constexpr (std::is_same_v<N, InSubquery>) {
          canonicalize(*n.subject);
          testing::canonicalize(*n.query);
        } else if constexpr (std::is_same_v<N, Like>) {
          canonicalize(*n.subject);
          canonicalize(*n.pattern);
        } else if constexpr (std::is_same_v<N, IsNull>) {
          canonicalize(*n.subject);
        } else if constexpr (std::is_same_v<N, Not>) {
          canonicalize(*n.operand);
        } else if constexpr (std::is_same_v<N, Logical>) {
          for (auto& op : n.operands) canonicalize(op);
        } else if constexpr (std::is_same_v<N, FunctionCall>) {
          for (auto& arg : n.args) canonicalize(arg);
        } else if constexpr (std::is_same_v<N, ScalarSubquery>) {
          testing::canonicalize(*n.query);
        }
      },
      e.node);
}

void canonicalize(Expr& e) {
  canonicalize_children(e);
  auto* l = e.as<Logical>();
  if (l == nullptr) return;
  std::vector<Expr> flat;
  for (auto& op : l->operands) {
    if (auto* inner = op.as<Logical>(); inner != nullptr && inner->op == l->op) {
      for (auto& sub : inner->operands) flat.push_back(std::move(sub));
    } else {
      flat.push_back(std::move(op));
    }
  }
  if (flat.size() == 1) {
    Expr only = std::move(flat.front());
    e = std::move(only);
    return;
  }
  l->operands = std::move(flat);
}

// -- shrinking ------------------------------------------------------------------

// Smaller replacements for one expression, including ones found deeper in
// the tree. `boolean` keeps replacements boolean where the position needs it.
std::vector<Expr> shrink_expr(const Expr& e, bool boolean);

template <typename Set>
void shrink_slot(const Expr& whole, const Expr& child, bool boolean, Set set,
                 std::vector<Expr>& out) {
  for (Expr& smaller : shrink_expr(child, boolean)) {
    Expr copy = whole;
    set(copy, std::move(smaller));
    out.push_back(std::move(copy));
  }
}

std::vector<Query> shrink_query_raw(const Query& q);

std::vector<Expr> shrink_expr(const Expr& e, bool boolean) {
  std::vector<Expr> out;
  const auto keep = [&](const Expr& candidate) {
    if (!boolean || candidate.is_boolean()) out.push_back(candidate);
  };
  if (const auto* l = e.as<Logical>()) {
    for (const auto& op : l->operands) keep(op);
    if (l->operands.size() > 2) {
      for (std::size_t i = 0; i < l->operands.size(); ++i) {
        Logical smaller{l->op, {}};
        for (std::size_t k = 0; k < l->operands.size(); ++k) {
          if (k != i) smaller.operands.push_back(l->operands[k]);
        }
        out.push_back(smaller);
      }
    }
    for (std::size_t i = 0; i < l->operands.size(); ++i) {
      shrink_slot(e, l->operands[i], true,
                  [i](Expr& whole, Expr v) { whole.as<Logical>()->operands[i] = std::move(v); }, out);
    }
  } else if (const auto* n = e.as<Not>()) {
    keep(*n->operand);
    shrink_slot(e, *n->operand, true, [](Expr& whole, Expr v) { *whole.as<Not>()->operand = std::move(v); }, out);
  } else if (const auto* a = e.as<Arithmetic>()) {
    keep(*a->lhs);
    keep(*a->rhs);
  } else if (const auto* c = e.as<Comparison>()) {
    shrink_slot(e, *c->lhs, false, [](Expr& whole, Expr v) { *whole.as<Comparison>()->lhs = std::move(v); }, out);
    shrink_slot(e, *c->rhs, false, [](Expr& whole, Expr v) { *whole.as<Comparison>()->rhs = std::move(v); }, out);
  } else if (const auto* s = e.as<ScalarSubquery>()) {
    keep(number("1"));
    for (Query& smaller : shrink_query_raw(*s->query)) out.push_back(ScalarSubquery{std::move(smaller)});
  } else if (const auto* in = e.as<InSubquery>()) {
    keep(InList{*in->subject, {number("1")}, in->negated});
    for (Query& smaller : shrink_query_raw(*in->query)) {
      out.push_back(InSubquery{*in->subject, std::move(smaller), in->negated});
    }
  } else if (const auto* f = e.as<FunctionCall>()) {
    for (const auto& arg : f->args) keep(arg);
  } else if (const auto* list = e.as<InList>(); list != nullptr && list->items.size() > 1) {
    keep(InList{*list->subject, {list->items.front()}, list->negated});
  }
  return out;
}

std::vector<Query> shrink_query_raw(const Query& q) {
  std::vector<Query> out;
  auto variant = [&](auto&& edit) {
    Query copy = q;
    edit(copy);
    out.push_back(std::move(copy));
  };
  if (q.limit) variant([](Query& c) { c.limit.reset(); });
  if (q.distinct) variant([](Query& c) { c.distinct = false; });
  for (std::size_t i = 0; i < q.order_by.size(); ++i) {
    variant([i](Query& c) { c.order_by.erase(c.order_by.begin() + static_cast<std::ptrdiff_t>(i)); });
  }
  if (q.having_clause) variant([](Query& c) { c.having_clause.reset(); });
  for (std::size_t i = 0; i < q.group_by.size(); ++i) {
    variant([i](Query& c) { c.group_by.erase(c.group_by.begin() + static_cast<std::ptrdiff_t>(i)); });
  }
  if (q.where_clause) variant([](Query& c) { c.where_clause.reset(); });
  for (std::size_t i = 0; i < q.joins.size(); ++i) {
    variant([i](Query& c) { c.joins.erase(c.joins.begin() + static_cast<std::ptrdiff_t>(i)); });
  }
  if (q.select_items.size() > 1) {
    for (std::size_t i = 0; i < q.select_items.size(); ++i) {
      variant([i](Query& c) {
        c.select_items.erase(c.select_items.begin() + static_cast<std::ptrdiff_t>(i));
      });
    }
  }
  for (std::size_t i = 0; i < q.select_items.size(); ++i) {
    if (q.select_items[i].is_star()) continue;
    if (!q.select_items[i].alias.empty()) variant([i](Query& c) { c.select_items[i].alias.clear(); });
    for (Expr& smaller : shrink_expr(*q.select_items[i].expr, false)) {
      variant([&](Query& c) { c.select_items[i].expr = std::move(smaller); });
    }
  }
  if (q.where_clause) {
    for (Expr& smaller : shrink_expr(*q.where_clause, true)) {
      variant([&](Query& c) { c.where_clause = std::move(smaller); });
    }
  }
  if (q.having_clause) {
    for (Expr& smaller : shrink_expr(*q.having_clause, true)) {
      variant([&](Query& c) { c.having_clause = std::move(smaller); });
    }
  }
  for (std::size_t i = 0; i < q.joins.size(); ++i) {
    for (Expr& smaller : shrink_expr(q.joins[i].on, true)) {
      variant([&](Query& c) { c.joins[i].on = std::move(smaller); });
    }
  }
  return out;
}

}  // namespace

sql::Query random_ast(Rng& rng, int depth) { return ArbitraryAst(rng).query(depth); }

void canonicalize(sql::Query& query) {
  for (auto& item : query.select_items) {
    if (item.expr) canonicalize(*item.expr);
  }
  for (auto& j : query.joins) canonicalize(j.on);
  if (query.where_clause) canonicalize(*query.where_clause);
  if (query.having_clause) canonicalize(*query.having_clause);
  for (auto& o : query.order_by) canonicalize(o.expr);
}

std::vector<sql::Query> shrink_candidates(const sql::Query& query) {
  const std::size_t size = print_query(query).size();
  std::vector<Query> out;
  for (Query& candidate : shrink_query_raw(query)) {
    canonicalize(candidate);
    if (print_query(candidate).size() < size) out.push_back(std::move(candidate));
  }
  return out;
}

sql::Query minimize(sql::Query query, const std::function<bool(const sql::Query&)>& fails) {
  for (bool progress = true; progress;) {
    progress = false;
    for (Query& candidate : shrink_candidates(query)) {
      if (fails(candidate)) {
        query = std::move(candidate);
        progress = true;
        break;
      }
    }
  }
  return query;
}

// -- well-formed queries --------------------------------------------------------

WellFormedGenerator::WellFormedGenerator(const schema::SchemaCatalog& catalog, WellFormedOptions options)
    : catalog_(catalog), options_(options) {}

sql::Query WellFormedGenerator::next(Rng& rng) {
  alias_counter_ = 0;
  return block(rng, 0, {}, false, nullptr);
}

sql::ColumnRef WellFormedGenerator::column(const Binding& b, const schema::ColumnInfo& c,
                                           bool qualify) const {
  return ColumnRef{qualify ? b.name : std::string(), c.name};
}

namespace {

const std::vector<std::string> kCities = {"Boston", "Denver", "Dallas", "New York", "London", "Oakland"};

Expr literal_for(Rng& rng, const schema::ColumnInfo& c) {
  using schema::DataType;
  switch (c.data_type) {
    case DataType::integer:
    case DataType::time: return number(std::to_string(pick(rng, 1440)));
    case DataType::real: return number(std::to_string(pick(rng, 900)) + ".5");
    case DataType::date:
    case DataType::timestamp: return string("210" + std::to_string(pick(rng, 6)) + "-0" + std::to_string(1 + pick(rng, 9)) + "-01");
    case DataType::boolean: return number(chance(rng, 0.5) ? "1" : "0");
    case DataType::text: break;
  }
  return string(pick(rng, kCities));
}

}  // namespace

sql::Expr WellFormedGenerator::predicate(Rng& rng, int depth, const std::vector<Binding>& bindings,
                                         const std::vector<Binding>& outer, bool qualify) {
  const Binding& b = pick(rng, bindings);
  const schema::ColumnInfo& c = pick(rng, b.table->columns);
  const Expr subject = column(b, c, qualify);
  const bool numeric_like = schema::is_numeric(c.data_type) || c.data_type == schema::DataType::time;

  if (depth < options_.max_subquery_depth && chance(rng, 0.15)) {
    std::vector<Binding> scope = outer;
    scope.insert(scope.end(), bindings.begin(), bindings.end());
    if (chance(rng, 0.5)) {
      static constexpr CompareOp kOps[] = {CompareOp::lt, CompareOp::le, CompareOp::gt, CompareOp::ge};
      return Comparison{kOps[pick(rng, 4)], subject, Expr(ScalarSubquery{block(rng, depth + 1, scope, true, &c)})};
    }
    return InSubquery{subject, block(rng, depth + 1, scope, false, &c), chance(rng, 0.2)};
  }

  switch (pick(rng, 5)) {
    case 0:
      return IsNull{subject, chance(rng, 0.7)};
    case 1:
      if (numeric_like || schema::is_temporal(c.data_type)) {
        return Between{subject, literal_for(rng, c), literal_for(rng, c), chance(rng, 0.2)};
      }
      return Like{subject, Expr(string(pick(rng, kCities).substr(0, 2) + "%")), chance(rng, 0.2)};
    case 2: {
      InList in{subject, {}, chance(rng, 0.2)};
      const std::size_t n = 1 + pick(rng, 3);
      for (std::size_t i = 0; i < n; ++i) in.items.push_back(literal_for(rng, c));
      return in;
    }
    default: {
      static constexpr CompareOp kOps[] = {CompareOp::eq, CompareOp::ne, CompareOp::lt,
                                           CompareOp::le, CompareOp::gt, CompareOp::ge};
      return Comparison{kOps[pick(rng, 6)], subject, literal_for(rng, c)};
    }
  }
}

sql::Query WellFormedGenerator::block(Rng& rng, int depth, const std::vector<Binding>& outer,
                                      bool scalar_result, const schema::ColumnInfo* result_like) {
  Query q;
  const auto& tables = catalog_.tables();

  // Subquery blocks read a table that has a column of the subject's type.
  std::vector<const schema::TableInfo*> candidates;
  for (const auto& t : tables) {
    if (result_like == nullptr) {
      candidates.push_back(&t);
      continue;
    }
    for (const auto& c : t.columns) {
      if (c.data_type == result_like->data_type) {
        candidates.push_back(&t);
        break;
      }
    }
  }
  const schema::TableInfo* table = pick(rng, candidates);

  std::vector<Binding> bindings;
  auto bind = [&](const schema::TableInfo* t, bool aliased) {
    TableRef ref{t->name, aliased ? "t" + std::to_string(++alias_counter_) : std::string()};
    bindings.push_back(Binding{ref.exposed_name(), t});
    return ref;
  };
  const bool aliased = !outer.empty() || chance(rng, 0.3);
  q.from_tables.push_back(bind(table, aliased));

  if (options_.joins && depth == 0 && result_like == nullptr && chance(rng, 0.3)) {
    // Follow a foreign key out of, or into, the base table.
    struct Edge {
      const schema::TableInfo* other;
      std::string local;
      std::string remote;
    };
    std::vector<Edge> edges;
    for (const auto& c : table->columns) {
      if (c.references) edges.push_back({catalog_.find_table(c.references->table), c.name, c.references->column});
    }
    for (const auto& t : tables) {
      if (&t == table) continue;
      for (const auto& c : t.columns) {
        if (c.references && sql::same_identifier(c.references->table, table->name)) {
          edges.push_back({&t, c.references->column, c.name});
        }
      }
    }
    if (!edges.empty() && aliased) {
      const Edge& e = pick(rng, edges);
      TableRef ref = bind(e.other, true);
      Expr on = Comparison{CompareOp::eq, Expr(ColumnRef{bindings.front().name, e.local}),
                           Expr(ColumnRef{bindings.back().name, e.remote})};
      q.joins.push_back(Join{JoinKind::inner, std::move(ref), std::move(on)});
    }
  }

  const bool qualify = bindings.size() > 1 || !outer.empty() || chance(rng, 0.2);
  auto any_column = [&]() -> std::pair<const Binding*, const schema::ColumnInfo*> {
    const Binding& b = pick(rng, bindings);
    return {&b, &pick(rng, b.table->columns)};
  };
  auto columns_of_type = [&](schema::DataType type) {
    std::vector<std::pair<const Binding*, const schema::ColumnInfo*>> out;
    for (const auto& b : bindings) {
      for (const auto& c : b.table->columns) {
        if (c.data_type == type) out.emplace_back(&b, &c);
      }
    }
    return out;
  };
  auto numeric_columns = [&]() {
    std::vector<std::pair<const Binding*, const schema::ColumnInfo*>> out;
    for (const auto& b : bindings) {
      for (const auto& c : b.table->columns) {
        if (schema::is_numeric(c.data_type)) out.emplace_back(&b, &c);
      }
    }
    return out;
  };
  auto aggregate = [&](AggregateFn fn, const Binding* b, const schema::ColumnInfo* c, bool distinct) {
    FunctionCall call{to_string(fn), fn, distinct, c == nullptr, {}};
    if (c != nullptr) call.args.push_back(column(*b, *c, qualify));
    return call;
  };

  auto where = [&](bool required) {
    if (!required && !chance(rng, 0.7)) return;
    std::vector<Expr> parts;
    const std::size_t n = 1 + pick(rng, 3);
    for (std::size_t i = 0; i < n; ++i) parts.push_back(predicate(rng, depth, bindings, outer, qualify));
    if (!outer.empty() && chance(rng, 0.35)) {
      // Correlate with a same-typed column of the enclosing block.
      const Binding& o = pick(rng, outer);
      const schema::ColumnInfo& oc = pick(rng, o.table->columns);
      const auto same = columns_of_type(oc.data_type);
      if (!same.empty()) {
        const auto& [ib, ic] = pick(rng, same);
        parts.push_back(Comparison{CompareOp::gt, Expr(column(*ib, *ic, true)), Expr(ColumnRef{o.name, oc.name})});
      }
    }
    if (parts.size() >= 3 && chance(rng, 0.3)) {
      Expr either = Logical{LogicalOp::or_, {parts[0], parts[1]}};
      parts.erase(parts.begin(), parts.begin() + 2);
      parts.insert(parts.begin(), std::move(either));
    }
    if (chance(rng, 0.1)) parts.front() = Not{parts.front()};
    q.where_clause = conjoin(LogicalOp::and_, std::move(parts));
  };

  if (result_like != nullptr) {
    const auto same = columns_of_type(result_like->data_type);
    const auto& [b, c] = pick(rng, same);
    if (scalar_result) {
      const bool numeric = schema::is_numeric(c->data_type);
      const AggregateFn fn = numeric && chance(rng, 0.3) ? AggregateFn::avg
                                                         : (chance(rng, 0.5) ? AggregateFn::min : AggregateFn::max);
      q.select_items.push_back(SelectItem{aggregate(fn, b, c, false), {}});
      where(false);
    } else {
      q.select_items.push_back(SelectItem{column(*b, *c, qualify), {}});
      where(true);
    }
    return q;
  }

  if (!options_.aggregates || chance(rng, 0.6)) {
    // Enumeration.
    q.distinct = chance(rng, 0.15);
    bool star = chance(rng, 0.3);
    if (!star) {
      const std::size_t n = 1 + pick(rng, 3);
      for (std::size_t i = 0; i < n; ++i) {
        const auto [b, c] = any_column();
        SelectItem item{column(*b, *c, qualify), {}};
        if (chance(rng, 0.3)) item.alias = "c" + std::to_string(i + 1);
        q.select_items.push_back(std::move(item));
      }
    } else {
      q.select_items.push_back(SelectItem{std::nullopt, {}});
    }
    where(true);
    if (chance(rng, 0.3)) {
      const SortDirection dir = chance(rng, 0.5) ? SortDirection::asc : SortDirection::desc;
      const std::size_t choice = pick(rng, 3);
      if (!star && choice == 0) {
        q.order_by.push_back(OrderItem{number(std::to_string(1 + pick(rng, q.select_items.size()))), dir});
      } else if (!star && choice == 1 && !q.select_items.front().alias.empty()) {
        q.order_by.push_back(OrderItem{ColumnRef{{}, q.select_items.front().alias}, dir});
      } else {
        const auto [b, c] = any_column();
        q.order_by.push_back(OrderItem{column(*b, *c, qualify), dir});
      }
      if (chance(rng, 0.5)) q.limit = 1 + pick(rng, 10);
    } else if (chance(rng, 0.1)) {
      q.limit = 1 + pick(rng, 10);
    }
    return q;
  }

  // Summarization.
  const std::size_t keys = pick(rng, 3);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < keys; ++i) {
    const auto [b, c] = any_column();
    ColumnRef key = column(*b, *c, qualify);
    if (!seen.insert(b->name + "." + c->name).second) continue;
    q.group_by.push_back(key);
    q.select_items.push_back(SelectItem{key, {}});
  }
  const auto numeric = numeric_columns();
  const std::size_t calls = 1 + pick(rng, 2);
  for (std::size_t i = 0; i < calls; ++i) {
    const auto [b, c] = any_column();
    switch (pick(rng, 4)) {
      case 0: q.select_items.push_back(SelectItem{aggregate(AggregateFn::count, nullptr, nullptr, false), {}}); break;
      case 1: q.select_items.push_back(SelectItem{aggregate(AggregateFn::count, b, c, true), {}}); break;
      case 2:
        q.select_items.push_back(
            SelectItem{aggregate(chance(rng, 0.5) ? AggregateFn::min : AggregateFn::max, b, c, false), {}});
        break;
      default:
        if (numeric.empty()) {
          q.select_items.push_back(SelectItem{aggregate(AggregateFn::count, nullptr, nullptr, false), {}});
        } else {
          const auto& [nb, nc] = pick(rng, numeric);
          q.select_items.push_back(
              SelectItem{aggregate(chance(rng, 0.5) ? AggregateFn::sum : AggregateFn::avg, nb, nc, false), {}});
        }
        break;
    }
  }
  where(false);
  if (chance(rng, 0.3)) {
    q.having_clause = Comparison{CompareOp::gt, Expr(aggregate(AggregateFn::count, nullptr, nullptr, false)),
                                 Expr(number(std::to_string(pick(rng, 5))))};
  }
  if (chance(rng, 0.3)) {
    q.order_by.push_back(OrderItem{*q.select_items.back().expr, chance(rng, 0.5) ? SortDirection::asc : SortDirection::desc});
    if (chance(rng, 0.5)) q.limit = 1 + pick(rng, 5);
  }
  return q;
}

}  // namespace quest::testing
