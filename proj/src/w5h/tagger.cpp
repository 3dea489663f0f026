#include "quest/w5h/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <set>

#include "quest/error.hpp"
#include "quest/far/far.hpp"

namespace quest::w5h {

using json = nlohmann::ordered_json;
using schema::ResolvedColumn;
using sql::Expr;

const char* to_string(HowKind kind) noexcept {
  switch (kind) {
    case HowKind::none: return "none";
    case HowKind::how_many: return "how_many";
    case HowKind::mechanistic: return "mechanistic";
    case HowKind::both: return "both";
  }
  return "none";
}

namespace {

struct Sides {
  std::vector<const Expr*> left;
  std::vector<const Expr*> right;
};

Sides sides_of(const Expr& e) {
  Sides s;
  if (const auto* c = e.as<sql::Comparison>()) {
    s.left = {&*c->lhs};
    s.right = {&*c->rhs};
  } else if (const auto* b = e.as<sql::Between>()) {
    s.left = {&*b->subject};
    s.right = {&*b->low, &*b->high};
  } else if (const auto* in = e.as<sql::InList>()) {
    s.left = {&*in->subject};
    for (const auto& item : in->items) s.right.push_back(&item);
  } else if (const auto* in = e.as<sql::InSubquery>()) {
    s.left = {&*in->subject};
  } else if (const auto* l = e.as<sql::Like>()) {
    s.left = {&*l->subject};
    s.right = {&*l->pattern};
  } else if (const auto* n = e.as<sql::IsNull>()) {
    s.left = {&*n->subject};
  }
  return s;
}

std::string folded(std::string_view name) {
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool references(const schema::ColumnInfo& from, const ResolvedColumn& to) {
  return from.references && sql::same_identifier(from.references->table, to.table->name) &&
         sql::same_identifier(from.references->column, to.column->name);
}

// Shared per-query analysis state: resolution chains and fk-chain results.
class Analysis {
 public:
  Analysis(const sql::Atomization& atoms, const schema::SchemaCatalog& catalog, const TaggerOptions& options)
      : atoms_(atoms), catalog_(catalog), options_(options), chains_(atoms.scopes.size()),
        why_edges_(atoms.scopes.size()) {}

  const schema::ResolutionScope& scope(std::size_t s) {
    if (!chains_[s]) chains_[s] = std::make_unique<far::ScopeChain>(atoms_, s, catalog_);
    return chains_[s]->innermost();
  }

  // Columns of `e` outside subqueries; HAVING may name select aliases, which
  // stand for the columns of the aliased expression.
  std::vector<ResolvedColumn> columns(const Expr& e, std::size_t s, bool allow_alias) {
    std::vector<ResolvedColumn> out;
    const sql::Query& q = *atoms_.scopes[s].query;
    for (const sql::ColumnRef* ref : sql::column_refs(e)) {
      if (allow_alias && ref->qualifier.empty()) {
        const auto item = std::find_if(q.select_items.begin(), q.select_items.end(), [&](const auto& it) {
          return !it.alias.empty() && sql::same_identifier(it.alias, ref->name);
        });
        if (item != q.select_items.end()) {
          try {
            out.push_back(schema::resolve_column(*ref, scope(s)));
          } catch (const ResolutionError&) {
            auto inner = columns(*item->expr, s, false);
            out.insert(out.end(), inner.begin(), inner.end());
          }
          continue;
        }
      }
      out.push_back(schema::resolve_column(*ref, scope(s)));
    }
    return out;
  }

  std::optional<AnchorEntity> anchor_of(const sql::AtomicPredicate& atom) {
    const auto* cmp = atom.expression.as<sql::Comparison>();
    if (cmp == nullptr) return std::nullopt;
    const auto* lhs = cmp->lhs->as<sql::ColumnRef>();
    if (lhs == nullptr) return std::nullopt;
    const auto subs = sql::direct_subqueries(*cmp->rhs);
    if (subs.size() != 1) return std::nullopt;
    const ResolvedColumn compared = schema::resolve_column(*lhs, scope(atom.scope));
    if (!compared.column->roles.contains(Dimension::when)) return std::nullopt;

    std::optional<std::size_t> child;
    // The atom holds a copy of the AST; find its subquery's scope by value.
    for (std::size_t c : atoms_.scopes[atom.scope].children) {
      if (atoms_.scopes[c].kind == sql::SubqueryKind::scalar && *atoms_.scopes[c].query == *subs.front()) {
        child = c;
        break;
      }
    }
    if (!child) return std::nullopt;
    for (std::size_t index : atoms_.scopes[*child].predicates) {
      const sql::AtomicPredicate& inner = atoms_.predicates[index];
      if (inner.clause != sql::PredicateSource::where) continue;
      if (auto entity = pin_of(inner)) return entity;
    }
    return std::nullopt;
  }

  bool is_anchor_pin(const sql::AtomicPredicate& atom) {
    const sql::QueryScope& s = atoms_.scopes[atom.scope];
    if (!s.parent || s.kind != sql::SubqueryKind::scalar) return false;
    for (std::size_t index : atoms_.scopes[*s.parent].predicates) {
      const auto anchor = anchor_of(atoms_.predicates[index]);
      if (anchor && anchor->key_predicate_id == atom.id) return true;
    }
    return false;
  }

  bool in_why_chain(const sql::AtomicPredicate& atom) {
    auto& edges = why_edges_[atom.scope];
    if (!edges) edges = why_chain_edges(atom.scope);
    return edges->count(atom.id) > 0;
  }

  const sql::Atomization& atoms() const { return atoms_; }

 private:
  // Equality on an entity key whose other side is not a column of the same
  // block: a literal, or a value handed in from the enclosing query.
  std::optional<AnchorEntity> pin_of(const sql::AtomicPredicate& atom) {
    const auto* cmp = atom.expression.as<sql::Comparison>();
    if (cmp == nullptr || cmp->op != sql::CompareOp::eq) return std::nullopt;
    for (int flip = 0; flip < 2; ++flip) {
      const Expr& key_side = flip == 0 ? *cmp->lhs : *cmp->rhs;
      const Expr& other = flip == 0 ? *cmp->rhs : *cmp->lhs;
      const auto* key = key_side.as<sql::ColumnRef>();
      if (key == nullptr || !sql::direct_subqueries(other).empty()) continue;
      const ResolvedColumn k = schema::resolve_column(*key, scope(atom.scope));
      if (k.is_outer()) continue;
      if (!k.column->roles.contains(Dimension::who) && !k.column->is_key()) continue;
      bool local = false;
      for (const sql::ColumnRef* ref : sql::column_refs(other)) {
        local = local || !schema::resolve_column(*ref, scope(atom.scope)).is_outer();
      }
      if (local) continue;
      return AnchorEntity{k.table->name, k.column->name, atom.id};
    }
    return std::nullopt;
  }

  // Join predicates along foreign keys form a graph over the block's table
  // bindings; every edge of a component whose longest simple path reaches
  // the threshold is part of a WHY chain.
  std::set<std::string> why_chain_edges(std::size_t s) {
    struct Edge {
      std::string a, b, id;
    };
    std::vector<Edge> edges;
    for (std::size_t index : atoms_.scopes[s].predicates) {
      const sql::AtomicPredicate& atom = atoms_.predicates[index];
      if (atom.clause != sql::PredicateSource::join_on && atom.clause != sql::PredicateSource::where) continue;
      const auto* cmp = atom.expression.as<sql::Comparison>();
      if (cmp == nullptr || cmp->op != sql::CompareOp::eq) continue;
      const auto* l = cmp->lhs->as<sql::ColumnRef>();
      const auto* r = cmp->rhs->as<sql::ColumnRef>();
      if (l == nullptr || r == nullptr) continue;
      const ResolvedColumn a = schema::resolve_column(*l, scope(s));
      const ResolvedColumn b = schema::resolve_column(*r, scope(s));
      if (a.is_outer() || b.is_outer() || sql::same_identifier(a.binding, b.binding)) continue;
      if (!references(*a.column, b) && !references(*b.column, a)) continue;
      edges.push_back(Edge{folded(a.binding), folded(b.binding), atom.id});
    }
    std::set<std::string> out;
    if (edges.empty()) return out;

    std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> adjacency;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      adjacency[edges[i].a].push_back({edges[i].b, i});
      adjacency[edges[i].b].push_back({edges[i].a, i});
    }
    // Longest simple path (in edges) starting at `node`, over distinct nodes.
    std::set<std::string> on_path;
    std::function<std::size_t(const std::string&)> longest = [&](const std::string& node) {
      on_path.insert(node);
      std::size_t best = 0;
      for (const auto& [next, edge] : adjacency[node]) {
        if (on_path.count(next) == 0) best = std::max(best, 1 + longest(next));
      }
      on_path.erase(node);
      return best;
    };
    std::map<std::string, std::size_t> component;
    std::size_t components = 0;
    for (const auto& [node, _] : adjacency) {
      if (component.count(node) != 0) continue;
      std::vector<std::string> stack{node};
      component[node] = components;
      while (!stack.empty()) {
        const std::string n = stack.back();
        stack.pop_back();
        for (const auto& [next, edge] : adjacency[n]) {
          if (component.emplace(next, components).second) stack.push_back(next);
        }
      }
      ++components;
    }
    std::vector<std::size_t> length(components, 0);
    for (const auto& [node, c] : component) length[c] = std::max(length[c], longest(node));
    for (const auto& e : edges) {
      if (length[component[e.a]] >= options_.why_chain_length) out.insert(e.id);
    }
    return out;
  }

  const sql::Atomization& atoms_;
  const schema::SchemaCatalog& catalog_;
  const TaggerOptions& options_;
  std::vector<std::unique_ptr<far::ScopeChain>> chains_;
  std::vector<std::optional<std::set<std::string>>> why_edges_;
};

PredicateTag tag(const sql::AtomicPredicate& atom, Analysis& analysis) {
  PredicateTag out;
  out.predicate_id = atom.id;
  const bool allow_alias = atom.clause == sql::PredicateSource::having;
  const Sides sides = sides_of(atom.expression);

  std::vector<ResolvedColumn> left;
  for (const Expr* e : sides.left) {
    auto cols = analysis.columns(*e, atom.scope, allow_alias);
    left.insert(left.end(), cols.begin(), cols.end());
  }
  std::vector<ResolvedColumn> right;
  for (const Expr* e : sides.right) {
    auto cols = analysis.columns(*e, atom.scope, allow_alias);
    right.insert(right.end(), cols.begin(), cols.end());
  }

  for (const auto& c : left.empty() ? right : left) out.dimensions |= c.column->roles;
  for (const auto& c : right) {
    if (c.column->roles.contains(Dimension::why)) out.dimensions.insert(Dimension::why);
  }
  if (out.dimensions.empty()) out.dimensions.insert(Dimension::what);

  if ((atom.clause == sql::PredicateSource::join_on || atom.clause == sql::PredicateSource::where) &&
      far::is_key_equality(atom.expression, analysis.scope(atom.scope))) {
    out.dimensions.insert(Dimension::who);
  }
  if (analysis.in_why_chain(atom)) out.dimensions.insert(Dimension::why);

  if (auto anchor = analysis.anchor_of(atom)) {
    out.who_anchored = true;
    out.anchor_entity = std::move(anchor);
  }
  out.anchor_pin = analysis.is_anchor_pin(atom);
  return out;
}

bool has_outer_aggregate(const sql::Query& q) {
  auto any = [](const Expr& e) {
    const auto calls = sql::function_calls(e);
    return std::any_of(calls.begin(), calls.end(), [](const auto* c) { return c->aggregate.has_value(); });
  };
  for (const auto& item : q.select_items) {
    if (item.expr && any(*item.expr)) return true;
  }
  if (q.having_clause && any(*q.having_clause)) return true;
  return std::any_of(q.order_by.begin(), q.order_by.end(), [&](const auto& o) { return any(o.expr); });
}

json dims_json(const DimensionSet& set) {
  json out = json::array();
  for (Dimension d : set.members()) out.push_back(std::string(quest::to_string(d)));
  return out;
}

}  // namespace

PredicateTag tag_predicate(const sql::AtomicPredicate& predicate, const sql::Atomization& atoms,
                           const schema::SchemaCatalog& catalog, const TaggerOptions& options) {
  Analysis analysis(atoms, catalog, options);
  return tag(predicate, analysis);
}

QueryDimensions tag_query(const sql::Query& query, const schema::SchemaCatalog& catalog,
                          const TaggerOptions& options) {
  const sql::Atomization atoms = sql::atomize(query);
  // Every block must bind known tables even when it has no predicates.
  for (std::size_t s = 0; s < atoms.scopes.size(); ++s) (void)far::ScopeChain(atoms, s, catalog);

  Analysis analysis(atoms, catalog, options);
  QueryDimensions out;
  bool mechanistic = false;
  for (const auto& atom : atoms.predicates) {
    PredicateTag t = tag(atom, analysis);
    if (t.anchor_pin && !options.anchored_counts_who) {
      out.predicate_tags.push_back(std::move(t));
      continue;
    }
    out.engaged |= t.dimensions;
    if (t.who_anchored && options.anchored_counts_who) out.engaged.insert(Dimension::who);
    mechanistic = mechanistic || t.dimensions.contains(Dimension::how);
    out.predicate_tags.push_back(std::move(t));
  }
  out.has_aggregation = has_outer_aggregate(query);
  if (out.has_aggregation && mechanistic) {
    out.how_kind = HowKind::both;
  } else if (out.has_aggregation) {
    out.how_kind = HowKind::how_many;
  } else if (mechanistic) {
    out.how_kind = HowKind::mechanistic;
  }
  if (out.how_kind != HowKind::none) out.engaged.insert(Dimension::how);
  out.constraint_operators = decompose::detect_constraint_operators(query);
  return out;
}

json to_json(const QueryDimensions& dims) {
  json predicates = json::array();
  for (const auto& t : dims.predicate_tags) {
    json p{{"id", t.predicate_id}, {"dimensions", dims_json(t.dimensions)}, {"who_anchored", t.who_anchored}};
    if (t.anchor_entity) {
      p["anchor_entity"] = json{{"table", t.anchor_entity->table},
                                {"column", t.anchor_entity->key_column},
                                {"predicate", t.anchor_entity->key_predicate_id}};
    }
    if (t.anchor_pin) p["anchor_pin"] = true;
    predicates.push_back(std::move(p));
  }
  json ops = json::array();
  for (const auto& op : dims.constraint_operators) ops.push_back(decompose::to_json(op));
  return json{{"engaged", dims_json(dims.engaged)},
              {"how_kind", to_string(dims.how_kind)},
              {"has_aggregation", dims.has_aggregation},
              {"dimensionless", dims.dimensionless()},
              {"predicates", predicates},
              {"constraint_operators", ops}};
}

}  // namespace quest::w5h
