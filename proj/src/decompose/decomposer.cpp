#include "quest/decompose/decomposer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "quest/sql/parser.hpp"
#include "quest/sql/predicates.hpp"

namespace quest::decompose {

using json = nlohmann::ordered_json;
using sql::Expr;
using sql::Query;

namespace {

const char* lower(sql::SortDirection d) { return d == sql::SortDirection::asc ? "asc" : "desc"; }

const char* lower(sql::AggregateFn fn) {
  switch (fn) {
    case sql::AggregateFn::count: return "count";
    case sql::AggregateFn::sum: return "sum";
    case sql::AggregateFn::avg: return "avg";
    case sql::AggregateFn::min: return "min";
    case sql::AggregateFn::max: return "max";
  }
  return "?";
}

const char* kind_name(sql::SubqueryKind kind) {
  switch (kind) {
    case sql::SubqueryKind::root: return "root";
    case sql::SubqueryKind::scalar: return "scalar";
    case sql::SubqueryKind::set: return "set";
  }
  return "?";
}

std::optional<ConstraintOperator> superlative(const Query& q, std::size_t scope) {
  if (q.select_items.size() != 1 || q.select_items.front().is_star()) return std::nullopt;
  const auto* call = q.select_items.front().expr->as<sql::FunctionCall>();
  if (call == nullptr || !call->aggregate || call->star || call->args.size() != 1) return std::nullopt;
  if (*call->aggregate != sql::AggregateFn::min && *call->aggregate != sql::AggregateFn::max) {
    return std::nullopt;
  }
  const auto* col = call->args.front().as<sql::ColumnRef>();
  if (col == nullptr) return std::nullopt;
  ConstraintOperator op;
  op.kind = ConstraintOperator::Kind::superlative_anchor;
  op.extreme = *call->aggregate;
  op.target_column = col->name;
  op.source = "subquery";
  op.scope = scope;
  return op;
}

void operators_of(const sql::QueryScope& s, std::size_t index, std::vector<ConstraintOperator>& out) {
  if (s.kind == sql::SubqueryKind::scalar) {
    if (auto op = superlative(*s.query, index)) out.push_back(*op);
  }
  const Query& q = *s.query;
  if (!q.limit || q.order_by.empty() || *q.limit < 1) return;
  for (const auto& key : q.order_by) {
    ConstraintOperator op;
    op.kind = ConstraintOperator::Kind::ranking;
    op.direction = key.direction;
    op.k = *q.limit;
    const auto* col = key.expr.as<sql::ColumnRef>();
    op.target_column = col != nullptr ? col->name : sql::print_expr(key.expr);
    op.source = "order-by+limit";
    op.scope = index;
    out.push_back(std::move(op));
  }
}

std::vector<ConstraintOperator> operators_of(const sql::Atomization& atoms) {
  std::vector<ConstraintOperator> out;
  for (std::size_t i = 0; i < atoms.scopes.size(); ++i) operators_of(atoms.scopes[i], i, out);
  return out;
}

template <typename Fn>
Query map_exprs(const Query& q, Fn&& fn) {
  Query out = q;
  for (std::size_t i = 0; i < q.select_items.size(); ++i) {
    if (q.select_items[i].expr) out.select_items[i].expr = fn(*q.select_items[i].expr);
  }
  for (std::size_t i = 0; i < q.joins.size(); ++i) out.joins[i].on = fn(q.joins[i].on);
  if (q.where_clause) out.where_clause = fn(*q.where_clause);
  if (q.having_clause) out.having_clause = fn(*q.having_clause);
  for (std::size_t i = 0; i < q.order_by.size(); ++i) out.order_by[i].expr = fn(q.order_by[i].expr);
  return out;
}

template <typename Fn>
void for_each_child_mut(Expr& expr, Fn&& fn) {
  std::visit(
      [&](auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, sql::Arithmetic> || std::is_same_v<N, sql::Comparison>) {
          fn(*n.lhs);
          fn(*n.rhs);
        } else if constexpr (std::is_same_v<N, sql::Between>) {
          fn(*n.subject);
          fn(*n.low);
          fn(*n.high);
        } else if constexpr (std::is_same_v<N, sql::InList>) {
          fn(*n.subject);
          for (auto& item : n.items) fn(item);
        } else if constexpr (std::is_same_v<N, sql::InSubquery> || std::is_same_v<N, sql::IsNull>) {
          fn(*n.subject);
        } else if constexpr (std::is_same_v<N, sql::Like>) {
          fn(*n.subject);
          fn(*n.pattern);
        } else if constexpr (std::is_same_v<N, sql::Not>) {
          fn(*n.operand);
        } else if constexpr (std::is_same_v<N, sql::Logical>) {
          for (auto& op : n.operands) fn(op);
        } else if constexpr (std::is_same_v<N, sql::FunctionCall>) {
          for (auto& arg : n.args) fn(arg);
        }
      },
      expr.node);
}

using StepLookup = std::function<Query(const std::string&)>;

Expr substitute(const Expr& e, const StepLookup& lookup) {
  if (const auto* b = e.as<sql::BindingRef>()) return sql::ScalarSubquery{lookup(b->name)};
  if (const auto* in = e.as<sql::InList>(); in != nullptr && in->items.size() == 1) {
    if (const auto* b = in->items.front().as<sql::BindingRef>(); b != nullptr && b->set_valued) {
      return sql::InSubquery{substitute(*in->subject, lookup), lookup(b->name), in->negated};
    }
  }
  Expr out = e;
  for_each_child_mut(out, [&](Expr& child) { child = substitute(child, lookup); });
  return out;
}

}  // namespace

std::string to_string(const ConstraintOperator& op) {
  std::ostringstream out;
  if (op.kind == ConstraintOperator::Kind::ranking) {
    out << "ranking(" << lower(op.direction) << ", " << op.k << ", " << op.target_column << ")";
  } else {
    out << "superlative-anchor(" << lower(op.extreme) << ", " << op.target_column << ")";
  }
  return out.str();
}

std::vector<ConstraintOperator> detect_constraint_operators(const Query& query) {
  return operators_of(sql::atomize(query));
}

const PlanStep* DecompositionPlan::find(std::string_view id) const {
  for (const auto& s : steps) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

DecompositionPlan decompose(const Query& query, const schema::SchemaCatalog& catalog) {
  const sql::Atomization atoms = sql::atomize(query);

  // Post-order walk: children are named before their parent.
  std::vector<std::size_t> order;
  std::vector<std::string> names(atoms.scopes.size());
  std::function<void(std::size_t)> visit = [&](std::size_t s) {
    for (std::size_t child : atoms.scopes[s].children) visit(child);
    if (s != 0) names[s] = "step" + std::to_string(order.size() + 1);
    order.push_back(s);
  };
  visit(0);
  names[0] = "root";

  std::map<const Query*, std::string> bindings;
  for (std::size_t s = 1; s < atoms.scopes.size(); ++s) bindings[atoms.scopes[s].query] = names[s];

  const std::vector<ConstraintOperator> operators = operators_of(atoms);

  DecompositionPlan plan;
  for (std::size_t s : order) {
    const sql::QueryScope& scope = atoms.scopes[s];
    PlanStep step;
    step.id = names[s];
    step.binding = s == 0 ? "" : names[s];
    step.kind = scope.kind;
    for (std::size_t child : scope.children) step.depends_on.push_back(names[child]);
    step.query = map_exprs(*scope.query, [&](const Expr& e) {
      return sql::rewrite_subqueries(e, [&](const Query& sub, bool set) -> std::optional<Expr> {
        const auto it = bindings.find(&sub);
        if (it == bindings.end()) return std::nullopt;
        return Expr{sql::BindingRef{it->second, set}};
      });
    });
    step.far = far::extract_scope(atoms, s, catalog, bindings);
    step.conformance = far::check_conformance(step.far, catalog);
    for (const auto& atom : step.far.filter.atoms) {
      for (const auto& ref : atom.outer_refs) {
        if (std::find(step.correlated_on.begin(), step.correlated_on.end(), ref) == step.correlated_on.end()) {
          step.correlated_on.push_back(ref);
        }
      }
    }
    for (const auto& op : operators) {
      if (op.scope == s) step.operators.push_back(op);
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

Query recompose(const DecompositionPlan& plan) {
  StepLookup lookup = [&](const std::string& id) -> Query {
    const PlanStep* step = plan.find(id);
    if (step == nullptr) throw std::invalid_argument("plan has no step '" + id + "'");
    return map_exprs(step->query, [&](const Expr& e) { return substitute(e, lookup); });
  };
  return lookup(plan.root);
}

json to_json(const ConstraintOperator& op) {
  json out;
  if (op.kind == ConstraintOperator::Kind::ranking) {
    out["kind"] = "ranking";
    out["direction"] = lower(op.direction);
    out["k"] = op.k;
  } else {
    out["kind"] = "superlative-anchor";
    out["extreme"] = lower(op.extreme);
  }
  out["target"] = op.target_column;
  out["source"] = op.source;
  return out;
}

json to_json(const DecompositionPlan& plan) {
  json steps = json::array();
  for (const auto& s : plan.steps) {
    json step{{"id", s.id}};
    step["binding"] = s.binding.empty() ? json(nullptr) : json(s.binding);
    step["kind"] = kind_name(s.kind);
    step["depends_on"] = s.depends_on;
    step["correlated_on"] = s.correlated_on;
    step["sql"] = sql::print_query(s.query);
    step["far"] = far::to_json(s.far);
    step["conformance"] = far::to_json(s.conformance);
    json ops = json::array();
    for (const auto& op : s.operators) ops.push_back(to_json(op));
    step["operators"] = ops;
    steps.push_back(std::move(step));
  }
  return json{{"root", plan.root}, {"steps", steps}};
}

namespace {

std::string verdict_text(const far::ConformanceReport& r) {
  if (r.conformant) return "conformant";
  std::string out = "nonconformant";
  const char* sep = " (";
  for (const far::StepVerdict* v : {&r.filter, &r.aggregate, &r.return_verdict}) {
    for (far::ReasonCode code : v->reasons) {
      out += sep;
      out += far::to_string(code);
      sep = ", ";
    }
  }
  return out + ")";
}

}  // namespace

std::string render_text(const DecompositionPlan& plan) {
  std::ostringstream out;
  for (const auto& s : plan.steps) {
    out << s.id << " [" << kind_name(s.kind);
    if (!s.depends_on.empty()) {
      out << ", after";
      for (const auto& d : s.depends_on) out << " " << d;
    }
    if (!s.correlated_on.empty()) {
      out << ", correlated on";
      for (const auto& c : s.correlated_on) out << " " << c;
    }
    out << "]\n";
    out << "  sql: " << sql::print_query(s.query) << "\n";

    out << "  filter:";
    if (s.far.filter.atoms.empty() && !s.far.filter.has_row_limit) out << " (none)";
    for (const auto& a : s.far.filter.atoms) {
      out << "\n    " << a.id << " " << a.text;
      if (a.post_aggregation) out << " [having]";
      if (a.join_scoping) out << " [join]";
      if (a.correlated) out << " [correlated]";
    }
    if (s.far.return_spec.limit) out << "\n    limit " << *s.far.return_spec.limit;
    out << "\n";

    out << "  aggregate:";
    if (s.far.aggregate.identity) out << " identity";
    for (const auto& c : s.far.aggregate.calls) {
      out << " " << c.function << "(" << (c.distinct ? "DISTINCT " : "") << c.argument << ")";
    }
    if (!s.far.aggregate.group_keys.empty()) {
      out << " group by";
      for (const auto& k : s.far.aggregate.group_keys) out << " " << k.table << "." << k.column;
    }
    out << "\n";

    out << "  return:";
    if (s.kind == sql::SubqueryKind::scalar) out << " scalar";
    if (s.kind == sql::SubqueryKind::set) out << " set";
    out << " " << s.far.return_spec.columns.size() << " column"
        << (s.far.return_spec.columns.size() == 1 ? "" : "s");
    for (const auto& o : s.far.return_spec.ordering) out << ", order " << o.text << " " << lower(o.direction);
    out << "\n";

    for (const auto& op : s.operators) out << "  operator: " << to_string(op) << "\n";
    out << "  verdict: " << verdict_text(s.conformance) << "\n";
  }
  return out.str();
}

}  // namespace quest::decompose
