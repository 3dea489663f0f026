#include "quest/far/far.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "quest/error.hpp"
#include "quest/sql/parser.hpp"

namespace quest::far {

using schema::ResolutionScope;
using schema::ResolvedColumn;
using sql::Expr;
using sql::Query;

const char* to_string(ReasonCode code) noexcept {
  switch (code) {
    case ReasonCode::F_NO_SCOPING: return "F_NO_SCOPING";
    case ReasonCode::A_NON_NUMERIC_AGG: return "A_NON_NUMERIC_AGG";
    case ReasonCode::A_UNKNOWN_FUNCTION: return "A_UNKNOWN_FUNCTION";
    case ReasonCode::R_UNKNOWN_COLUMN: return "R_UNKNOWN_COLUMN";
    case ReasonCode::R_UNRESOLVABLE_ORDER_KEY: return "R_UNRESOLVABLE_ORDER_KEY";
    case ReasonCode::R_HAVING_WITHOUT_AGG_CONTEXT: return "R_HAVING_WITHOUT_AGG_CONTEXT";
  }
  return "?";
}

ScopeChain::ScopeChain(const sql::Atomization& atoms, std::size_t scope,
                       const schema::SchemaCatalog& catalog) {
  std::vector<std::size_t> path;
  for (std::optional<std::size_t> s = scope; s; s = atoms.scopes[*s].parent) path.push_back(*s);
  std::reverse(path.begin(), path.end());
  for (std::size_t s : path) {
    const ResolutionScope* parent = scopes_.empty() ? nullptr : &scopes_.back();
    scopes_.push_back(ResolutionScope::for_query(*atoms.scopes[s].query, catalog, parent));
  }
}

bool is_key_equality(const Expr& predicate, const ResolutionScope& scope) {
  const auto* cmp = predicate.as<sql::Comparison>();
  if (cmp == nullptr || cmp->op != sql::CompareOp::eq) return false;
  const auto* lhs = cmp->lhs->as<sql::ColumnRef>();
  const auto* rhs = cmp->rhs->as<sql::ColumnRef>();
  if (lhs == nullptr || rhs == nullptr) return false;
  try {
    const ResolvedColumn a = schema::resolve_column(*lhs, scope);
    const ResolvedColumn b = schema::resolve_column(*rhs, scope);
    return a.depth == 0 && b.depth == 0 && !sql::same_identifier(a.binding, b.binding) &&
           a.column->is_key() && b.column->is_key();
  } catch (const ResolutionError&) {
    return false;
  }
}

namespace {

std::string qualified_text(const ResolvedColumn& r) { return r.binding + "." + r.column->name; }

bool is_select_alias(const Query& q, const sql::ColumnRef& ref) {
  if (!ref.qualifier.empty()) return false;
  return std::any_of(q.select_items.begin(), q.select_items.end(), [&](const sql::SelectItem& item) {
    return !item.alias.empty() && sql::same_identifier(item.alias, ref.name);
  });
}

class Extractor {
 public:
  Extractor(const sql::Atomization& atoms, std::size_t scope, const schema::SchemaCatalog& catalog,
            const std::map<const Query*, std::string>& bindings)
      : atoms_(atoms),
        scope_index_(scope),
        query_(*atoms.scopes[scope].query),
        chain_(atoms, scope, catalog),
        bindings_(bindings) {}

  FarStructure run() {
    FarStructure far;
    extract_filter(far.filter);
    extract_aggregate(far.aggregate);
    extract_return(far.return_spec);
    return far;
  }

 private:
  const ResolutionScope& scope() const { return chain_.innermost(); }

  // Atom expressions are copies of the AST, so their subqueries are matched
  // to this block's child scopes structurally, each child used once.
  std::string render(const Expr& e) {
    if (bindings_.empty()) return sql::print_expr(e);
    const Expr substituted =
        sql::rewrite_subqueries(e, [&](const Query& sub, bool set) -> std::optional<Expr> {
          if (const auto it = bindings_.find(&sub); it != bindings_.end()) {
            return Expr{sql::BindingRef{it->second, set}};
          }
          for (std::size_t child : atoms_.scopes[scope_index_].children) {
            const Query* q = atoms_.scopes[child].query;
            if (used_.count(q) != 0 || !(*q == sub)) continue;
            const auto it = bindings_.find(q);
            if (it == bindings_.end()) continue;
            used_.insert(q);
            return Expr{sql::BindingRef{it->second, set}};
          }
          return std::nullopt;
        });
    return sql::print_expr(substituted);
  }

  // Resolves a column of a boolean clause; HAVING may name select aliases.
  std::optional<ResolvedColumn> resolve_strict(const sql::ColumnRef& ref, bool allow_alias) const {
    if (allow_alias && is_select_alias(query_, ref)) {
      try {
        return schema::resolve_column(ref, scope());
      } catch (const ResolutionError&) {
        return std::nullopt;
      }
    }
    return schema::resolve_column(ref, scope());
  }

  std::optional<ResolvedColumn> resolve_lenient(const sql::ColumnRef& ref) const {
    try {
      return schema::resolve_column(ref, scope());
    } catch (const ResolutionError&) {
      return std::nullopt;
    }
  }

  void extract_filter(FilterSpec& filter) {
    for (std::size_t index : atoms_.scopes[scope_index_].predicates) {
      const sql::AtomicPredicate& atom = atoms_.predicates[index];
      FilterAtom out;
      out.id = atom.id;
      out.text = render(atom.expression);
      out.clause = atom.clause;
      out.post_aggregation = atom.clause == sql::PredicateSource::having;
      const bool allow_alias = out.post_aggregation;
      for (const sql::ColumnRef* ref : sql::column_refs(atom.expression)) {
        const auto resolved = resolve_strict(*ref, allow_alias);
        if (resolved && resolved->is_outer()) {
          const std::string text = qualified_text(*resolved);
          if (std::find(out.outer_refs.begin(), out.outer_refs.end(), text) == out.outer_refs.end()) {
            out.outer_refs.push_back(text);
          }
        }
      }
      out.correlated = atom.correlated || !out.outer_refs.empty();
      out.join_scoping = atom.clause == sql::PredicateSource::join_on ||
                         (atom.clause == sql::PredicateSource::where &&
                          is_key_equality(atom.expression, scope()));

      if (out.join_scoping) {
        filter.has_join_scoping = true;
      } else if (out.clause == sql::PredicateSource::where) {
        filter.has_where_scoping = true;
      } else if (out.post_aggregation) {
        filter.has_having_scoping = true;
      }
      filter.atoms.push_back(std::move(out));
    }
    filter.has_row_limit = query_.limit.has_value();
    filter.nondeterministic_scope = query_.limit.has_value() && query_.order_by.empty();
  }

  ValueKind value_kind(const Expr& e) const {
    if (const auto* col = e.as<sql::ColumnRef>()) {
      const auto r = resolve_lenient(*col);
      if (!r) return ValueKind::unknown;
      return schema::is_numeric(r->column->data_type) ? ValueKind::numeric : ValueKind::non_numeric;
    }
    if (const auto* lit = e.as<sql::Literal>()) {
      return lit->kind == sql::Literal::Kind::number ? ValueKind::numeric : ValueKind::non_numeric;
    }
    if (const auto* a = e.as<sql::Arithmetic>()) {
      const ValueKind l = value_kind(*a->lhs);
      const ValueKind r = value_kind(*a->rhs);
      if (l == ValueKind::non_numeric || r == ValueKind::non_numeric) return ValueKind::non_numeric;
      if (l == ValueKind::unknown || r == ValueKind::unknown) return ValueKind::unknown;
      return ValueKind::numeric;
    }
    if (e.is_boolean()) return ValueKind::non_numeric;
    return ValueKind::unknown;
  }

  void collect_calls(const Expr& e, const char* clause, AggregateSpec& spec) {
    for (const sql::FunctionCall* call : sql::function_calls(e)) {
      if (!call->aggregate) continue;
      AggregateCall out;
      out.function = sql::to_string(*call->aggregate);
      out.distinct = call->distinct;
      out.clause = clause;
      if (call->star) {
        out.argument = "*";
        out.argument_kind = ValueKind::unknown;
      } else {
        out.argument = render(call->args.front());
        out.argument_kind = value_kind(call->args.front());
      }
      spec.calls.push_back(std::move(out));
    }
  }

  void collect_unknown_functions(const Expr& e, AggregateSpec& spec) const {
    for (const sql::FunctionCall* call : sql::function_calls(e)) {
      if (!call->aggregate) spec.unknown_functions.push_back(call->name);
    }
  }

  void extract_aggregate(AggregateSpec& spec) {
    for (const auto& item : query_.select_items) {
      if (item.expr) collect_calls(*item.expr, "select", spec);
    }
    if (query_.having_clause) collect_calls(*query_.having_clause, "having", spec);
    for (const auto& o : query_.order_by) collect_calls(o.expr, "order-by", spec);

    for (const auto& item : query_.select_items) {
      if (item.expr) collect_unknown_functions(*item.expr, spec);
    }
    for (const auto& j : query_.joins) collect_unknown_functions(j.on, spec);
    if (query_.where_clause) collect_unknown_functions(*query_.where_clause, spec);
    if (query_.having_clause) collect_unknown_functions(*query_.having_clause, spec);
    for (const auto& o : query_.order_by) collect_unknown_functions(o.expr, spec);

    for (const auto& key : query_.group_by) {
      if (is_select_alias(query_, key)) {
        const auto r = resolve_lenient(key);
        spec.group_keys.push_back(r ? QualifiedColumn{r->table->name, r->column->name}
                                    : QualifiedColumn{"", key.name});
        continue;
      }
      const ResolvedColumn r = schema::resolve_column(key, scope());
      spec.group_keys.push_back(QualifiedColumn{r.table->name, r.column->name});
    }
    spec.identity = spec.calls.empty() && spec.group_keys.empty();
  }

  void extract_return(ReturnSpec& spec) {
    const std::size_t binding_count = scope().bindings().size();
    for (const auto& item : query_.select_items) {
      if (item.is_star()) {
        for (const auto& b : scope().bindings()) {
          for (const auto& column : b.table->columns) {
            OutputColumn out;
            out.text = binding_count > 1 ? b.exposed_name + "." + column.name : column.name;
            out.column = QualifiedColumn{b.table->name, column.name};
            spec.columns.push_back(std::move(out));
          }
        }
        continue;
      }
      OutputColumn out;
      out.text = render(*item.expr);
      out.alias = item.alias;
      for (const sql::ColumnRef* ref : sql::column_refs(*item.expr)) {
        const auto r = resolve_lenient(*ref);
        if (!r) {
          spec.unresolved_columns.push_back(sql::print_expr(*ref));
        } else if (item.expr->is<sql::ColumnRef>()) {
          out.column = QualifiedColumn{r->table->name, r->column->name};
        }
      }
      spec.columns.push_back(std::move(out));
    }

    for (const auto& o : query_.order_by) {
      OrderKey key;
      key.text = render(o.expr);
      key.direction = o.direction;
      key.resolved = order_key_resolves(o.expr);
      spec.ordering.push_back(std::move(key));
    }
    spec.limit = query_.limit;
    spec.has_having = query_.having_clause.has_value();
  }

  bool order_key_resolves(const Expr& e) const {
    if (const auto* lit = e.as<sql::Literal>(); lit != nullptr && lit->kind == sql::Literal::Kind::number) {
      std::uint64_t ordinal = 0;
      const auto [ptr, ec] =
          std::from_chars(lit->text.data(), lit->text.data() + lit->text.size(), ordinal);
      return ec == std::errc{} && ptr == lit->text.data() + lit->text.size() && ordinal >= 1 &&
             ordinal <= query_.select_items.size();
    }
    for (const sql::ColumnRef* ref : sql::column_refs(e)) {
      if (is_select_alias(query_, *ref)) continue;
      if (!resolve_lenient(*ref)) return false;
    }
    return true;
  }

  const sql::Atomization& atoms_;
  std::size_t scope_index_;
  const Query& query_;
  ScopeChain chain_;
  const std::map<const Query*, std::string>& bindings_;
  std::set<const Query*> used_;
};

void fail(StepVerdict& verdict, ReasonCode code) {
  verdict.pass = false;
  if (std::find(verdict.reasons.begin(), verdict.reasons.end(), code) == verdict.reasons.end()) {
    verdict.reasons.push_back(code);
  }
}

}  // namespace

FarStructure extract_scope(const sql::Atomization& atoms, std::size_t scope,
                           const schema::SchemaCatalog& catalog,
                           const std::map<const Query*, std::string>& bindings) {
  return Extractor(atoms, scope, catalog, bindings).run();
}

FarStructure extract_far(const Query& query, const schema::SchemaCatalog& catalog) {
  const sql::Atomization atoms = sql::atomize(query);
  return extract_scope(atoms, 0, catalog);
}

ConformanceReport check_conformance(const FarStructure& far, const schema::SchemaCatalog& /*catalog*/) {
  ConformanceReport report;

  // A whole-table enumeration: nothing narrows the rows and nothing
  // summarizes them.
  if (far.filter.atoms.empty() && !far.filter.has_join_scoping && !far.filter.has_row_limit &&
      far.aggregate.identity) {
    fail(report.filter, ReasonCode::F_NO_SCOPING);
  }

  for (const auto& call : far.aggregate.calls) {
    if ((call.function == "SUM" || call.function == "AVG") &&
        call.argument_kind == ValueKind::non_numeric) {
      fail(report.aggregate, ReasonCode::A_NON_NUMERIC_AGG);
    }
  }
  if (!far.aggregate.unknown_functions.empty()) fail(report.aggregate, ReasonCode::A_UNKNOWN_FUNCTION);

  if (!far.return_spec.unresolved_columns.empty()) fail(report.return_verdict, ReasonCode::R_UNKNOWN_COLUMN);
  for (const auto& key : far.return_spec.ordering) {
    if (!key.resolved) fail(report.return_verdict, ReasonCode::R_UNRESOLVABLE_ORDER_KEY);
  }
  if (far.return_spec.has_having && far.aggregate.group_keys.empty() && far.aggregate.calls.empty()) {
    fail(report.return_verdict, ReasonCode::R_HAVING_WITHOUT_AGG_CONTEXT);
  }

  report.conformant = report.filter.pass && report.aggregate.pass && report.return_verdict.pass;
  return report;
}

}  // namespace quest::far
