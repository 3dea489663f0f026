#pragma once

// Filter -> Aggregate -> Return extraction and per-step conformance verdicts.
//
// Filter is the selection (WHERE, JOIN ... ON, HAVING as post-aggregation
// selection, and row limits); Aggregate is projection/grouping (aggregate
// calls and group keys); Return is the result relation (output columns,
// ordering, limit). Verdicts are structural and never need execution.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quest/schema/catalog.hpp"
#include "quest/sql/ast.hpp"
#include "quest/sql/predicates.hpp"

namespace quest::far {

struct QualifiedColumn {
  std::string table;
  std::string column;
  bool operator==(const QualifiedColumn&) const = default;
};

struct FilterAtom {
  std::string id;
  std::string text;  // canonical rendering of the predicate
  sql::PredicateSource clause = sql::PredicateSource::where;
  bool post_aggregation = false;  // HAVING
  bool join_scoping = false;      // JOIN ... ON, or WHERE key = key across tables
  bool correlated = false;
  std::vector<std::string> outer_refs;  // "f1.arrival_time"
  bool operator==(const FilterAtom&) const = default;
};

struct FilterSpec {
  std::vector<FilterAtom> atoms;
  bool has_where_scoping = false;
  bool has_join_scoping = false;
  bool has_having_scoping = false;
  bool has_row_limit = false;
  bool nondeterministic_scope = false;  // LIMIT without ORDER BY
  bool operator==(const FilterSpec&) const = default;
};

enum class ValueKind { numeric, non_numeric, unknown };

struct AggregateCall {
  std::string function;  // uppercase for known aggregates
  std::string argument;  // canonical text, "*" for COUNT(*)
  bool distinct = false;
  ValueKind argument_kind = ValueKind::unknown;
  std::string clause;  // select | having | order-by
  bool operator==(const AggregateCall&) const = default;
};

struct AggregateSpec {
  std::vector<AggregateCall> calls;
  std::vector<std::string> unknown_functions;  // calls outside COUNT/SUM/AVG/MIN/MAX
  std::vector<QualifiedColumn> group_keys;
  bool identity = true;  // no aggregate calls and no group keys
  bool operator==(const AggregateSpec&) const = default;
};

struct OutputColumn {
  std::string text;
  std::string alias;
  std::optional<QualifiedColumn> column;  // set for plain column references
  bool operator==(const OutputColumn&) const = default;
};

struct OrderKey {
  std::string text;
  sql::SortDirection direction = sql::SortDirection::asc;
  bool resolved = true;
  bool operator==(const OrderKey&) const = default;
};

struct ReturnSpec {
  std::vector<OutputColumn> columns;  // star expanded in catalog column order
  std::vector<OrderKey> ordering;
  std::optional<std::uint64_t> limit;
  std::vector<std::string> unresolved_columns;
  bool has_having = false;
  bool operator==(const ReturnSpec&) const = default;
};

struct FarStructure {
  FilterSpec filter;
  AggregateSpec aggregate;
  ReturnSpec return_spec;
  bool operator==(const FarStructure&) const = default;
};

enum class ReasonCode {
  F_NO_SCOPING,
  A_NON_NUMERIC_AGG,
  A_UNKNOWN_FUNCTION,
  R_UNKNOWN_COLUMN,
  R_UNRESOLVABLE_ORDER_KEY,
  R_HAVING_WITHOUT_AGG_CONTEXT,
};

const char* to_string(ReasonCode code) noexcept;

struct StepVerdict {
  bool pass = true;
  std::vector<ReasonCode> reasons;  // empty iff pass
  bool operator==(const StepVerdict&) const = default;
};

struct ConformanceReport {
  StepVerdict filter;
  StepVerdict aggregate;
  StepVerdict return_verdict;
  bool conformant = true;
  bool operator==(const ConformanceReport&) const = default;
};

/// Extracts the FAR structure of `query`'s outermost block.
///
/// Filter, group-key and HAVING columns must resolve (ResolutionError
/// propagates). Output columns and order keys that do not resolve are
/// recorded in the Return spec for check_conformance to judge.
FarStructure extract_far(const sql::Query& query, const schema::SchemaCatalog& catalog);

/// Extraction of a single block of an atomized query. `scope` indexes
/// `atoms.scopes`; enclosing blocks are resolved for correlated references.
/// `bindings` renders subqueries of this block by name (decomposition).
FarStructure extract_scope(const sql::Atomization& atoms, std::size_t scope,
                           const schema::SchemaCatalog& catalog,
                           const std::map<const sql::Query*, std::string>& bindings = {});

ConformanceReport check_conformance(const FarStructure& far, const schema::SchemaCatalog& catalog);

/// Resolution scopes for one block of an atomized query and every block
/// enclosing it. Scopes point at each other, so the chain stays in place.
class ScopeChain {
 public:
  ScopeChain(const sql::Atomization& atoms, std::size_t scope, const schema::SchemaCatalog& catalog);
  ScopeChain(const ScopeChain&) = delete;
  ScopeChain& operator=(const ScopeChain&) = delete;

  const schema::ResolutionScope& innermost() const { return scopes_.back(); }

 private:
  std::deque<schema::ResolutionScope> scopes_;
};

/// True for `a.k = b.k` where both sides resolve to key columns of different
/// table bindings in the same block: a join condition written in WHERE.
bool is_key_equality(const sql::Expr& predicate, const schema::ResolutionScope& scope);

nlohmann::ordered_json to_json(const FarStructure& far);
nlohmann::ordered_json to_json(const ConformanceReport& report);

}  // namespace quest::far
