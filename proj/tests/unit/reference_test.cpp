#include <gtest/gtest.h>

#include "quest/error.hpp"
#include "quest/profile/reference.hpp"
#include "quest/profile/report.hpp"

using namespace quest;
using namespace quest::profile;

namespace {

enum Col { WHO, WHAT, WHERE, WHEN, WHY, HOW, AGG };

const Cell& cell(const char* dataset, Col c) { return find_reference(dataset)->cells[c]; }

}  // namespace

TEST(References, TextCitedCells) {
  ASSERT_EQ(builtin_references().size(), 5u);
  EXPECT_EQ(cell("EHRSQL", WHEN), Cell::value(80.4));
  EXPECT_EQ(cell("EHRSQL", WHO), Cell::value(73.0));
  EXPECT_EQ(cell("EHRSQL", AGG), Cell::value(38.3));
  EXPECT_EQ(cell("WikiSQL", WHEN), Cell::value(31.3));
  EXPECT_EQ(cell("WikiSQL", WHO), Cell::value(9.8));
  EXPECT_EQ(cell("WikiSQL", AGG), Cell::value(23.4));
  EXPECT_EQ(cell("ATIS", WHEN), Cell::value(20.4));
  EXPECT_EQ(cell("ATIS", WHO), Cell::value(0.2));
  EXPECT_EQ(cell("ATIS", AGG), Cell::value(4.1));
  EXPECT_EQ(cell("Spider", WHEN), Cell::value(16.3));
  EXPECT_EQ(cell("Spider", WHO), Cell::value(16.0));
  EXPECT_EQ(cell("Spider", HOW), Cell::value(32.9));
  EXPECT_EQ(cell("BIRD", WHEN), Cell::value(20.8));
  EXPECT_EQ(cell("BIRD", HOW), Cell::value(44.0));
  EXPECT_EQ(cell("BIRD", AGG), Cell::value(43.4));
  for (const auto& r : builtin_references()) EXPECT_EQ(format_cell(r.cells[WHY]), "<1") << r.dataset;
  EXPECT_FALSE(cell("WikiSQL", WHAT).known());
  EXPECT_NE(find_reference("bird")->note.find("HOW"), std::string::npos);
  EXPECT_EQ(find_reference("Nope"), nullptr);
}

TEST(References, FormatCell) {
  EXPECT_EQ(format_cell(Cell::value(80.4)), "80.4");
  EXPECT_EQ(format_cell(Cell::value(16.0)), "16.0");
  EXPECT_EQ(format_cell(Cell::below(1)), "<1");
  EXPECT_EQ(format_cell(Cell{}), "");
}

TEST(Compare, EhrVersusWikiSql) {
  const auto d = compare_profiles(*find_reference("EHRSQL"), *find_reference("WikiSQL"));
  ASSERT_TRUE(d.cells[WHEN].ratio.has_value());
  EXPECT_NEAR(*d.cells[WHEN].ratio, 80.4 / 31.3, 1e-12);
  EXPECT_GE(*d.cells[WHEN].ratio, 2.5);
  EXPECT_LE(*d.cells[WHEN].ratio, 2.6);
  EXPECT_NEAR(*d.cells[WHEN].difference, 49.1, 1e-9);
  EXPECT_FALSE(d.cells[WHAT].difference.has_value());
  EXPECT_EQ(d.compared, 3u);
}

TEST(Compare, IdentityAndNoOverlap) {
  const auto& e = *find_reference("EHRSQL");
  const auto self = compare_profiles(e, e);
  EXPECT_EQ(self.mismatch, 0.0);
  for (const auto& c : self.cells) {
    if (c.difference) EXPECT_EQ(*c.difference, 0.0);
  }
  ProfileRow a{"a", {}, ""};
  ProfileRow b{"b", {}, ""};
  a.cells[WHO] = Cell::value(1);
  b.cells[WHAT] = Cell::value(1);
  EXPECT_THROW(compare_profiles(a, b), NoOverlap);
}

TEST(Compare, ZeroDenominatorHasNoRatio) {
  ProfileRow a{"a", {}, ""};
  ProfileRow b{"b", {}, ""};
  a.cells[WHO] = Cell::value(5);
  b.cells[WHO] = Cell::value(0);
  const auto d = compare_profiles(a, b);
  EXPECT_FALSE(d.cells[WHO].ratio.has_value());
  EXPECT_EQ(*d.cells[WHO].difference, 5.0);
}

TEST(Report, ReferencesCsv) {
  const std::string csv = render_report(builtin_references(), ReportFormat::csv);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("dataset,WHO,WHAT,WHERE,WHEN,WHY,HOW,AGG", 0), 0u);
  int rows = 0;
  while (std::getline(in, row)) {
    if (!row.empty()) ++rows;
  }
  EXPECT_EQ(rows, 5);
  EXPECT_NE(csv.find("EHRSQL,73.0,,,80.4,<1,,38.3"), std::string::npos);
}

TEST(Report, DeltaJson) {
  const auto d = compare_profiles(*find_reference("EHRSQL"), *find_reference("WikiSQL"));
  const auto j = nlohmann::json::parse(render_report(d, ReportFormat::json));
  EXPECT_EQ(j["cells"]["WHEN"]["diff"].get<double>(), 49.1);
  EXPECT_NEAR(j["cells"]["WHEN"]["ratio"].get<double>(), 2.568690, 1e-6);
  EXPECT_TRUE(j["cells"]["WHAT"]["ratio"].is_null());
  EXPECT_NO_THROW(nlohmann::json::parse(render_report(builtin_references(), ReportFormat::json)));
}

TEST(Report, SvgAndFormats) {
  const std::string svg = render_report(builtin_references(), ReportFormat::svg);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("EHRSQL"), std::string::npos);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
  EXPECT_THROW(parse_report_format("xlsx"), UnsupportedFormat);
}

TEST(Report, RowFromJsonRoundTrip) {
  Tally t;
  t.n_total = t.n_parsed = 4;
  t.dims = {1, 0, 2, 3, 0, 4};
  t.aggregation = 1;
  const CorpusProfile p = make_profile("x", t, false);
  const ProfileRow row = row_from_json(to_json(p), "x.json");
  EXPECT_EQ(row, to_row(p));
  EXPECT_EQ(format_cell(row.cells[WHEN]), "75.0");
  EXPECT_THROW(row_from_json(nlohmann::ordered_json::parse("[1]"), "x.json"), FormatError);
}
