#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "quest/error.hpp"
#include "quest/sql/parser.hpp"
#include "quest/sql/predicates.hpp"

using namespace quest;
using namespace quest::sql;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(QUEST_FIXTURES_DIR) + "/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Parser, CaseStudyOneShape) {
  const Query q = parse_query(read_fixture("case_studies/q1.sql"));
  ASSERT_EQ(q.select_items.size(), 1u);
  EXPECT_TRUE(q.select_items[0].is_star());
  const auto atoms = atomize_predicates(q);
  ASSERT_EQ(atoms.size(), 3u);
  for (const auto& a : atoms) {
    EXPECT_EQ(a.source, PredicateSource::where);
    EXPECT_FALSE(a.correlated);
  }
}

TEST(Parser, CaseStudyThreeShape) {
  const Query q = parse_query(read_fixture("case_studies/q3.sql"));
  ASSERT_EQ(q.order_by.size(), 1u);
  EXPECT_EQ(q.order_by[0].direction, SortDirection::asc);
  EXPECT_EQ(print_expr(q.order_by[0].expr), "f1.fare");
  EXPECT_EQ(q.limit, std::optional<std::uint64_t>(1));
  const auto subs = direct_subqueries(*q.where_clause);
  ASSERT_EQ(subs.size(), 1u);

  const auto atoms = atomize_predicates(q);
  int correlated = 0;
  for (const auto& a : atoms) {
    if (a.correlated) {
      ++correlated;
      EXPECT_EQ(print_expr(a.expression), "f2.departure_time > f1.arrival_time");
      EXPECT_EQ(a.source, PredicateSource::subquery_internal);
    }
  }
  EXPECT_EQ(correlated, 1);
}

TEST(Parser, UnionIsUnsupported) {
  try {
    parse_query("SELECT a FROM t UNION SELECT b FROM u");
    FAIL();
  } catch (const UnsupportedFeature& e) {
    EXPECT_EQ(e.feature(), "UNION");
  }
}

TEST(Parser, OtherUnsupportedFeatures) {
  EXPECT_THROW(parse_query("WITH x AS (SELECT 1 FROM t) SELECT * FROM x"), UnsupportedFeature);
  EXPECT_THROW(parse_query("SELECT ROW_NUMBER() OVER (ORDER BY a) FROM t"), UnsupportedFeature);
  EXPECT_THROW(parse_query("SELECT CASE WHEN a THEN 1 END FROM t"), UnsupportedFeature);
  EXPECT_THROW(parse_query("SELECT a FROM t LIMIT 1 OFFSET 2"), UnsupportedFeature);
  EXPECT_THROW(parse_query("SELECT a FROM t; SELECT b FROM t"), UnsupportedFeature);
}

TEST(Parser, CanonicalPrinting) {
  EXPECT_EQ(print_query(parse_query("select * from flights")), "SELECT * FROM flights");
  EXPECT_EQ(print_query(parse_query("select a  ,b from t where (x = 1 or y = 2) and z <> 3 order by a desc")),
            "SELECT a, b FROM t WHERE (x = 1 OR y = 2) AND z <> 3 ORDER BY a DESC");
  EXPECT_EQ(print_query(parse_query("SELECT a FROM t WHERE a != 1;")), "SELECT a FROM t WHERE a <> 1");
}

TEST(Parser, CaseStudyTwoRoundTripKeepsSubquery) {
  const Query q = parse_query(read_fixture("case_studies/q2.sql"));
  const std::string printed = print_query(q);
  EXPECT_NE(printed.find("(SELECT MAX(departure_time) FROM flights WHERE flight_id = 'AA100')"), std::string::npos);
  EXPECT_EQ(parse_query(printed), q);
}

TEST(Parser, ClauseOrderIndependentOfCasing) {
  EXPECT_EQ(parse_query("SeLeCt A FrOm T wHeRe A=1"), parse_query("SELECT A FROM T WHERE A = 1"));
}

TEST(Parser, LogicalFlattening) {
  const Query q = parse_query("SELECT a FROM t WHERE a = 1 AND (b = 2 AND c = 3)");
  const auto* l = q.where_clause->as<Logical>();
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->operands.size(), 3u);
}

TEST(Parser, ParseErrorCarriesPositionAndExpectations) {
  const std::string text = "SELECT a FROM";
  try {
    parse_query(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_LE(e.position().offset, text.size());
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parser, ErrorPositionsStayInsideInput) {
  const char* bad[] = {"", "SELECT", "SELECT a FROM t WHERE", "SELECT a FROM t WHERE a =",
                       "SELECT (a FROM t", "SELECT a FROM t ORDER", "SELECT a FROM t LIMIT x",
                       "SELECT COUNT(SUM(a)) FROM t", "SELECT a FROM t AS x, u AS x",
                       "SELECT a FROM t WHERE NOT 1", "FROM t"};
  for (const char* text : bad) {
    try {
      parse_query(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_LE(e.position().offset, std::string_view(text).size()) << text;
    } catch (const UnsupportedFeature& e) {
      EXPECT_LE(e.position().offset, std::string_view(text).size()) << text;
    }
  }
}

TEST(Parser, NegativeNumbersAndUnaryMinus) {
  const Query q = parse_query("SELECT a FROM t WHERE a > -5");
  EXPECT_EQ(print_query(q), "SELECT a FROM t WHERE a > -5");
  EXPECT_THROW(parse_query("SELECT a FROM t WHERE a > -b"), UnsupportedFeature);
}

TEST(Parser, QuotedIdentifiersRoundTrip) {
  const Query q = parse_query("SELECT `select name`, `order` FROM `group` AS g");
  EXPECT_EQ(print_query(q), "SELECT `select name`, `order` FROM `group` AS g");
  EXPECT_EQ(parse_query(print_query(q)), q);
}

TEST(Parser, JoinsAndImplicitJoins) {
  const Query q = parse_query(
      "SELECT d.icd_code FROM diagnoses AS d, admissions a LEFT JOIN patients p ON a.patient_id = p.patient_id");
  EXPECT_EQ(q.from_tables.size(), 2u);
  ASSERT_EQ(q.joins.size(), 1u);
  EXPECT_EQ(q.joins[0].kind, JoinKind::left);
  EXPECT_EQ(q.from_tables[1].alias, "a");
}

TEST(Atomize, EmptyWithoutPredicates) { EXPECT_TRUE(atomize_predicates(parse_query("SELECT * FROM t")).empty()); }

TEST(Atomize, IdsAreStableAndScopeOrdered) {
  const Query q = parse_query(
      "SELECT a FROM t WHERE a IN (SELECT b FROM u WHERE c = 1) AND d = 2 GROUP BY a HAVING COUNT(*) > 1");
  const Atomization atoms = atomize(q);
  ASSERT_EQ(atoms.predicates.size(), 4u);
  EXPECT_EQ(atoms.predicates[0].id, "p1");
  EXPECT_EQ(print_expr(atoms.predicates[1].expression), "d = 2");
  EXPECT_EQ(atoms.predicates[2].source, PredicateSource::having);
  EXPECT_EQ(atoms.predicates[3].source, PredicateSource::subquery_internal);
  EXPECT_EQ(atoms.predicates[3].id, "p4");
  EXPECT_EQ(atoms.scopes.size(), 2u);
  EXPECT_EQ(atoms.scopes[1].kind, SubqueryKind::set);
  EXPECT_NE(atoms.find("p3"), nullptr);
  EXPECT_EQ(atoms.find("p9"), nullptr);
}

TEST(Atomize, ReconjoinIsLossless) {
  const Query q = parse_query(
      "SELECT a FROM t JOIN u ON t.k = u.k AND u.z > 0 WHERE NOT (a = 1 OR b BETWEEN 2 AND 3) AND c LIKE 'x%' "
      "GROUP BY a HAVING MAX(b) > 2 OR COUNT(*) < 5");
  const Atomization atoms = atomize(q);
  const auto& root = atoms.scopes[0];
  EXPECT_EQ(reconjoin(*root.where_tree, atoms.predicates), *q.where_clause);
  EXPECT_EQ(reconjoin(*root.having_tree, atoms.predicates), *q.having_clause);
  EXPECT_EQ(reconjoin(*root.join_trees[0], atoms.predicates), q.joins[0].on);
}
