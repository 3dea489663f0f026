#pragma once

// Rule-based W5H classification of filter predicates and whole queries.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quest/decompose/decomposer.hpp"
#include "quest/schema/catalog.hpp"
#include "quest/schema/dimension.hpp"
#include "quest/sql/predicates.hpp"

namespace quest::w5h {

struct TaggerOptions {
  std::size_t why_chain_length = 2;   // fk edges a join chain needs to read as WHY
  bool anchored_counts_who = false;   // count a WHO-anchored WHEN as engaging WHO
};

struct AnchorEntity {
  std::string table;
  std::string key_column;
  std::string key_predicate_id;  // the pinning equality inside the subquery
  bool operator==(const AnchorEntity&) const = default;
};

struct PredicateTag {
  std::string predicate_id;
  DimensionSet dimensions;
  bool who_anchored = false;
  std::optional<AnchorEntity> anchor_entity;
  bool anchor_pin = false;  // this predicate pins the entity of some anchor
  bool operator==(const PredicateTag&) const = default;
};

enum class HowKind { none, how_many, mechanistic, both };
const char* to_string(HowKind kind) noexcept;

struct QueryDimensions {
  DimensionSet engaged;
  HowKind how_kind = HowKind::none;
  bool has_aggregation = false;
  std::vector<PredicateTag> predicate_tags;
  std::vector<decompose::ConstraintOperator> constraint_operators;

  bool dimensionless() const noexcept { return predicate_tags.empty(); }
  bool operator==(const QueryDimensions&) const = default;
};

/// Tags one predicate of an atomized query. Dimensions are the roles of the
/// left-side columns (right side when the left has none); key-to-key joins
/// add WHO; WHY comes from explicit roles or an fk join chain. Resolution
/// errors propagate.
PredicateTag tag_predicate(const sql::AtomicPredicate& predicate, const sql::Atomization& atoms,
                           const schema::SchemaCatalog& catalog, const TaggerOptions& options = {});

QueryDimensions tag_query(const sql::Query& query, const schema::SchemaCatalog& catalog,
                          const TaggerOptions& options = {});

nlohmann::ordered_json to_json(const QueryDimensions& dims);

}  // namespace quest::w5h
