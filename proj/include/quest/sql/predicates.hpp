#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "quest/sql/ast.hpp"

namespace quest::sql {

enum class PredicateSource { where, join_on, having, subquery_internal };

const char* to_string(PredicateSource source) noexcept;

struct AtomicPredicate {
  std::string id;  // "p1", "p2", ... unique within one query
  Expr expression;
  PredicateSource source = PredicateSource::where;
  // Clause inside the owning scope; equals `source` for outer-scope atoms.
  PredicateSource clause = PredicateSource::where;
  bool correlated = false;
  std::size_t scope = 0;  // index into Atomization::scopes
  std::vector<std::string> outer_qualifiers;  // aliases bound by enclosing scopes

  bool operator==(const AtomicPredicate&) const = default;
};

/// The and/or/not skeleton of one boolean clause, leaves naming predicates.
struct PredicateTree {
  enum class Kind { leaf, and_, or_, not_ };
  Kind kind = Kind::leaf;
  std::string predicate_id;
  std::vector<PredicateTree> children;

  bool operator==(const PredicateTree&) const = default;
};

enum class SubqueryKind { root, scalar, set };

struct QueryScope {
  const Query* query = nullptr;  // points into the analysed AST
  std::optional<std::size_t> parent;
  SubqueryKind kind = SubqueryKind::root;
  std::vector<std::size_t> children;  // direct subquery scopes, discovery order
  std::vector<std::optional<PredicateTree>> join_trees;  // one per Join
  std::optional<PredicateTree> where_tree;
  std::optional<PredicateTree> having_tree;
  std::vector<std::size_t> predicates;  // indices into Atomization::predicates
};

/// Every atomic predicate of a query plus the scope tree it was found in.
/// Scope 0 is the query itself; ids are assigned scope by scope (all atoms
/// of a scope before any of its subqueries), so outer-scope ids do not
/// depend on what the subqueries contain. The referenced AST must outlive
/// the Atomization.
struct Atomization {
  std::vector<AtomicPredicate> predicates;
  std::vector<QueryScope> scopes;

  const AtomicPredicate* find(std::string_view id) const;
};

Atomization atomize(const Query& query);
Atomization atomize(Query&&) = delete;  // scopes point into the query

std::vector<AtomicPredicate> atomize_predicates(const Query& query);

/// Rebuilds a clause from its skeleton. Lossless: reconjoin(tree) equals the
/// clause expression the tree was built from.
Expr reconjoin(const PredicateTree& tree, const std::vector<AtomicPredicate>& predicates);

}  // namespace quest::sql
