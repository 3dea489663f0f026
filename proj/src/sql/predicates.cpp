#include "quest/sql/predicates.hpp"

#include <algorithm>
#include <stdexcept>

namespace quest::sql {

const char* to_string(PredicateSource source) noexcept {
  switch (source) {
    case PredicateSource::where: return "where";
    case PredicateSource::join_on: return "join-on";
    case PredicateSource::having: return "having";
    case PredicateSource::subquery_internal: return "subquery-internal";
  }
  return "unknown";
}

const AtomicPredicate* Atomization::find(std::string_view id) const {
  for (const auto& p : predicates) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

bool binds(const Query& q, std::string_view name) {
  for (const auto& t : q.from_tables) {
    if (same_identifier(t.exposed_name(), name)) return true;
  }
  for (const auto& j : q.joins) {
    if (same_identifier(j.table.exposed_name(), name)) return true;
  }
  return false;
}

class Atomizer {
 public:
  Atomization run(const Query& root) {
    out_.scopes.push_back(QueryScope{&root, std::nullopt, SubqueryKind::root, {}, {}, {}, {}, {}});
    // Scopes are visited breadth-first, so the atoms of one scope get
    // contiguous ids and the root's come first.
    for (std::size_t s = 0; s < out_.scopes.size(); ++s) {
      scope_atoms(s);
      discover_children(s);
    }
    return std::move(out_);
  }

 private:
  void scope_atoms(std::size_t s) {
    const Query& q = *out_.scopes[s].query;
    for (const auto& j : q.joins) {
      auto tree = build_tree(j.on, s, PredicateSource::join_on);
      out_.scopes[s].join_trees.push_back(std::move(tree));
    }
    if (q.where_clause) {
      out_.scopes[s].where_tree = build_tree(*q.where_clause, s, PredicateSource::where);
    }
    if (q.having_clause) {
      out_.scopes[s].having_tree = build_tree(*q.having_clause, s, PredicateSource::having);
    }
  }

  void discover_children(std::size_t s) {
    const Query& q = *out_.scopes[s].query;
    auto add_from = [&](const Expr& e) { collect(e, s); };
    for (const auto& item : q.select_items) {
      if (item.expr) add_from(*item.expr);
    }
    for (const auto& j : q.joins) add_from(j.on);
    if (q.where_clause) add_from(*q.where_clause);
    if (q.having_clause) add_from(*q.having_clause);
    for (const auto& o : q.order_by) add_from(o.expr);
  }

  void collect(const Expr& e, std::size_t parent) {
    if (const auto* sq = e.as<ScalarSubquery>()) {
      add_scope(&*sq->query, parent, SubqueryKind::scalar);
      return;
    }
    for_each_child(e, [&](const Expr& child) { collect(child, parent); });
    if (const auto* in = e.as<InSubquery>()) add_scope(&*in->query, parent, SubqueryKind::set);
  }

  void add_scope(const Query* q, std::size_t parent, SubqueryKind kind) {
    const std::size_t index = out_.scopes.size();
    out_.scopes.push_back(QueryScope{q, parent, kind, {}, {}, {}, {}, {}});
    out_.scopes[parent].children.push_back(index);
  }

  PredicateTree build_tree(const Expr& e, std::size_t s, PredicateSource clause) {
    if (const auto* l = e.as<Logical>()) {
      PredicateTree node;
      node.kind = l->op == LogicalOp::and_ ? PredicateTree::Kind::and_ : PredicateTree::Kind::or_;
      for (const auto& operand : l->operands) node.children.push_back(build_tree(operand, s, clause));
      return node;
    }
    if (const auto* n = e.as<Not>()) {
      PredicateTree node;
      node.kind = PredicateTree::Kind::not_;
      node.children.push_back(build_tree(*n->operand, s, clause));
      return node;
    }
    AtomicPredicate atom{std::string("p") + std::to_string(out_.predicates.size() + 1),
                         e,
                         s == 0 ? clause : PredicateSource::subquery_internal,
                         clause,
                         false,
                         s,
                         {}};
    mark_correlation(atom);
    out_.scopes[s].predicates.push_back(out_.predicates.size());
    PredicateTree leaf;
    leaf.predicate_id = atom.id;
    out_.predicates.push_back(std::move(atom));
    return leaf;
  }

  // Syntactic scope analysis: a qualifier not bound by the atom's own scope
  // but bound by an enclosing one makes the atom correlated.
  void mark_correlation(AtomicPredicate& atom) const {
    const Query& own = *out_.scopes[atom.scope].query;
    for (const ColumnRef* ref : column_refs(atom.expression)) {
      if (ref->qualifier.empty() || binds(own, ref->qualifier)) continue;
      for (auto up = out_.scopes[atom.scope].parent; up; up = out_.scopes[*up].parent) {
        if (binds(*out_.scopes[*up].query, ref->qualifier)) {
          atom.correlated = true;
          const bool seen = std::any_of(
              atom.outer_qualifiers.begin(), atom.outer_qualifiers.end(),
              [&](const std::string& q) { return same_identifier(q, ref->qualifier); });
          if (!seen) atom.outer_qualifiers.push_back(ref->qualifier);
          break;
        }
      }
    }
  }

  Atomization out_;
};

}  // namespace

Atomization atomize(const Query& query) { return Atomizer().run(query); }

std::vector<AtomicPredicate> atomize_predicates(const Query& query) {
  return atomize(query).predicates;
}

Expr reconjoin(const PredicateTree& tree, const std::vector<AtomicPredicate>& predicates) {
  switch (tree.kind) {
    case PredicateTree::Kind::leaf: {
      const auto it = std::find_if(predicates.begin(), predicates.end(),
                                   [&](const AtomicPredicate& p) { return p.id == tree.predicate_id; });
      if (it == predicates.end()) {
        throw std::invalid_argument("unknown predicate id " + tree.predicate_id);
      }
      return it->expression;
    }
    case PredicateTree::Kind::not_:
      return Not{reconjoin(tree.children.front(), predicates)};
    case PredicateTree::Kind::and_:
    case PredicateTree::Kind::or_: {
      Logical l{tree.kind == PredicateTree::Kind::and_ ? LogicalOp::and_ : LogicalOp::or_, {}};
      for (const auto& child : tree.children) l.operands.push_back(reconjoin(child, predicates));
      return l;
    }
  }
  throw std::logic_error("unreachable predicate tree kind");
}

}  // namespace quest::sql
