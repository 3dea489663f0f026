#pragma once

// Nested-query decomposition into FAR steps, innermost first, and detection
// of constraint operators (ranking via ORDER BY + LIMIT, superlative anchors
// via a MIN/MAX scalar subquery).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quest/far/far.hpp"
#include "quest/schema/catalog.hpp"
#include "quest/sql/ast.hpp"

namespace quest::decompose {

struct ConstraintOperator {
  enum class Kind { ranking, superlative_anchor };
  Kind kind = Kind::ranking;
  sql::SortDirection direction = sql::SortDirection::asc;  // ranking
  std::uint64_t k = 0;                                      // ranking, >= 1
  sql::AggregateFn extreme = sql::AggregateFn::min;         // superlative: min | max
  std::string target_column;  // bare column name ("fare"), or key text when not a column
  std::string source;         // "order-by+limit" | "subquery"
  std::size_t scope = 0;      // atomization scope the operator lives in

  bool operator==(const ConstraintOperator&) const = default;
};

std::string to_string(const ConstraintOperator& op);  // "ranking(asc, 1, fare)"

/// Operators of every block, in scope order. Ranking yields one operator per
/// order key, and only when the block has both ORDER BY and LIMIT.
std::vector<ConstraintOperator> detect_constraint_operators(const sql::Query& query);

struct PlanStep {
  std::string id;       // "step1", ... or "root"
  std::string binding;  // name the enclosing step refers to; empty for root
  sql::SubqueryKind kind = sql::SubqueryKind::root;
  std::vector<std::string> depends_on;   // direct children, in textual order
  std::vector<std::string> correlated_on;  // outer columns referenced, "f1.arrival_time"
  sql::Query query;     // the block with child subqueries replaced by binding refs
  far::FarStructure far;
  far::ConformanceReport conformance;
  std::vector<ConstraintOperator> operators;
};

struct DecompositionPlan {
  std::vector<PlanStep> steps;  // topological: dependencies first, root last
  std::string root = "root";

  const PlanStep* find(std::string_view id) const;
};

/// One step per scalar or IN subquery plus the root. Children are named
/// step1, step2, ... in depth-first post-order, so every step follows the
/// steps it depends on. Resolution errors propagate.
DecompositionPlan decompose(const sql::Query& query, const schema::SchemaCatalog& catalog);

/// Substitutes every binding reference with its step's (recomposed) query.
/// recompose(decompose(q)) == q.
sql::Query recompose(const DecompositionPlan& plan);

nlohmann::ordered_json to_json(const ConstraintOperator& op);
nlohmann::ordered_json to_json(const DecompositionPlan& plan);
std::string render_text(const DecompositionPlan& plan);

}  // namespace quest::decompose
