#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generator.hpp"
#include "quest/decompose/decomposer.hpp"
#include "quest/error.hpp"
#include "quest/far/far.hpp"
#include "quest/profile/corpus.hpp"
#include "quest/sql/parser.hpp"
#include "quest/sql/predicates.hpp"
#include "quest/w5h/tagger.hpp"

using namespace quest;
using quest::testing::Rng;

namespace {

const std::string kFixtures = QUEST_FIXTURES_DIR;

const schema::SchemaCatalog& flights() {
  static const auto c = schema::load_catalog(kFixtures + "/flights.schema.json");
  return c;
}

const schema::SchemaCatalog& ehr() {
  static const auto c = schema::load_catalog(kFixtures + "/ehr.schema.json");
  return c;
}

bool round_trips(const sql::Query& q) {
  try {
    return sql::parse_query(sql::print_query(q)) == q;
  } catch (const Error&) {
    return false;
  }
}

bool conformant(const sql::Query& q, const schema::SchemaCatalog& c) {
  try {
    for (const auto& step : decompose::decompose(q, c).steps) {
      if (!step.conformance.conformant) return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

TEST(Property, RoundTripArbitraryAsts) {
  Rng rng(20240611);
  for (int i = 0; i < 500; ++i) {
    const sql::Query q = quest::testing::random_ast(rng, 3);
    if (!round_trips(q)) {
      const auto small = quest::testing::minimize(q, [](const sql::Query& c) { return !round_trips(c); });
      FAIL() << "round trip fails for: " << sql::print_query(small);
    }
  }
}

TEST(Property, RoundTripFixtureCorpora) {
  for (const char* name : {"mini_atis.jsonl", "mini_ehr.jsonl"}) {
    for (const auto& r : profile::ingest(kFixtures + "/" + name)) {
      const auto q = sql::parse_query(r.query);
      EXPECT_TRUE(round_trips(q)) << r.id;
    }
  }
}

TEST(Property, WellFormedQueriesConform) {
  for (const auto* catalog : {&flights(), &ehr()}) {
    quest::testing::WellFormedGenerator gen(*catalog);
    Rng rng(99);
    for (int i = 0; i < 300; ++i) {
      const auto q = gen.next(rng);
      if (!conformant(q, *catalog)) {
        const auto small = quest::testing::minimize(q, [&](const sql::Query& c) { return !conformant(c, *catalog); });
        FAIL() << catalog->name() << ": " << sql::print_query(small);
      }
      ASSERT_TRUE(round_trips(q)) << sql::print_query(q);
    }
  }
}

// Guards against the generator quietly degenerating into trivial queries.
// EHR has foreign keys; flights has none, so joins only show up here.
TEST(Property, WellFormedGeneratorCoversShapes) {
  quest::testing::WellFormedGenerator gen(ehr());
  Rng rng(17);
  int joins = 0, subqueries = 0, correlated = 0, grouped = 0, aggregated = 0, ordered = 0;
  for (int i = 0; i < 500; ++i) {
    const auto q = gen.next(rng);
    const auto atoms = sql::atomize(q);
    if (!q.joins.empty() || q.from_tables.size() > 1) ++joins;
    if (atoms.scopes.size() > 1) ++subqueries;
    if (!q.group_by.empty()) ++grouped;
    if (!q.order_by.empty()) ++ordered;
    const auto far = far::extract_far(q, ehr());
    if (!far.aggregate.calls.empty()) ++aggregated;
    for (std::size_t s = 1; s < atoms.scopes.size(); ++s) {
      for (const auto& a : far::extract_scope(atoms, s, ehr()).filter.atoms) {
        if (a.correlated) {
          ++correlated;
          break;
        }
      }
    }
  }
  EXPECT_GT(joins, 25);
  EXPECT_GT(subqueries, 25);
  EXPECT_GT(correlated, 5);
  EXPECT_GT(grouped, 25);
  EXPECT_GT(aggregated, 50);
  EXPECT_GT(ordered, 25);
}

TEST(Property, AtomizationIsLossless) {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const sql::Query q = quest::testing::random_ast(rng, 3);
    const sql::Atomization atoms = sql::atomize(q);
    for (const auto& scope : atoms.scopes) {
      const sql::Query& block = *scope.query;
      if (block.where_clause) {
        ASSERT_TRUE(scope.where_tree);
        EXPECT_EQ(sql::reconjoin(*scope.where_tree, atoms.predicates), *block.where_clause);
      }
      if (block.having_clause) {
        EXPECT_EQ(sql::reconjoin(*scope.having_tree, atoms.predicates), *block.having_clause);
      }
      for (std::size_t j = 0; j < block.joins.size(); ++j) {
        EXPECT_EQ(sql::reconjoin(*scope.join_trees[j], atoms.predicates), block.joins[j].on);
      }
    }
  }
}

TEST(Property, StepCountAndRecomposition) {
  quest::testing::WellFormedGenerator gen(ehr());
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto q = gen.next(rng);
    const auto plan = decompose::decompose(q, ehr());
    EXPECT_EQ(plan.steps.size(), sql::atomize(q).scopes.size());
    EXPECT_EQ(decompose::recompose(plan), q) << sql::print_query(q);
    for (const auto& step : plan.steps) {
      // Ranking keys live in ORDER BY, never among the filter atoms.
      for (const auto& atom : step.far.filter.atoms) {
        EXPECT_NE(atom.clause, sql::PredicateSource::subquery_internal);
      }
    }
  }
}

TEST(Property, AddingAWherePredicateKeepsFilterPass) {
  quest::testing::WellFormedGenerator gen(flights());
  Rng rng(3);
  const sql::Expr extra = sql::Comparison{sql::CompareOp::gt, sql::Expr(sql::ColumnRef{{}, "fare"}),
                                          sql::Expr(sql::Literal{sql::Literal::Kind::number, "10"})};
  for (int i = 0; i < 200; ++i) {
    sql::Query q = gen.next(rng);
    if (q.from_tables.size() != 1 || !q.from_tables[0].alias.empty() || !q.joins.empty()) continue;
    const bool before = far::check_conformance(far::extract_far(q, flights()), flights()).filter.pass;
    q.where_clause = q.where_clause ? sql::Expr(sql::Logical{sql::LogicalOp::and_, {*q.where_clause, extra}}) : extra;
    quest::testing::canonicalize(q);
    const bool after = far::check_conformance(far::extract_far(q, flights()), flights()).filter.pass;
    if (before) EXPECT_TRUE(after) << sql::print_query(q);
  }
  sql::Query bare = sql::parse_query("SELECT * FROM flights");
  EXPECT_FALSE(far::check_conformance(far::extract_far(bare, flights()), flights()).filter.pass);
  bare.where_clause = extra;
  EXPECT_TRUE(far::check_conformance(far::extract_far(bare, flights()), flights()).filter.pass);
}

TEST(Property, HavingAtomsStayInFilter) {
  quest::testing::WellFormedGenerator gen(flights());
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const auto q = gen.next(rng);
    const auto f = far::extract_far(q, flights());
    std::size_t having = 0;
    for (const auto& a : f.filter.atoms) {
      if (a.post_aggregation) {
        ++having;
        EXPECT_EQ(a.clause, sql::PredicateSource::having);
      }
    }
    EXPECT_EQ(having > 0, q.having_clause.has_value());
    EXPECT_GE(f.filter.atoms.size() + f.aggregate.calls.size() + f.return_spec.columns.size(), 1u);
  }
}

TEST(Property, TaggerSoundness) {
  quest::testing::WellFormedGenerator gen(ehr());
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    const auto q = gen.next(rng);
    const auto d = w5h::tag_query(q, ehr());
    const bool how_many = d.how_kind == w5h::HowKind::how_many || d.how_kind == w5h::HowKind::both;
    const bool mechanistic = d.how_kind == w5h::HowKind::mechanistic || d.how_kind == w5h::HowKind::both;
    if (how_many) EXPECT_TRUE(d.has_aggregation);
    if (mechanistic) {
      // Only admission_route carries an explicit HOW role in the EHR catalog.
      EXPECT_NE(sql::print_query(q).find("admission_route"), std::string::npos);
    }
    const auto atoms = sql::atomize(q);
    for (const auto& tag : d.predicate_tags) {
      if (!tag.who_anchored) continue;
      ASSERT_TRUE(tag.anchor_entity);
      const auto* pin = atoms.find(tag.anchor_entity->key_predicate_id);
      ASSERT_NE(pin, nullptr);
      const auto* eq = pin->expression.as<sql::Comparison>();
      ASSERT_NE(eq, nullptr);
      EXPECT_EQ(eq->op, sql::CompareOp::eq);
    }
    EXPECT_EQ(w5h::tag_query(q, ehr()), d);
  }
}
