#include "quest/profile/reference.hpp"

#include <cmath>

#include "quest/error.hpp"

namespace quest::profile {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kWho = 0, kWhen = 3, kWhy = 4, kHow = 5, kAgg = 6;

ReferenceProfile reference(std::string dataset, std::optional<double> when, std::optional<double> who,
                           std::optional<double> how, std::optional<double> agg, std::string note) {
  ReferenceProfile r;
  r.dataset = std::move(dataset);
  if (who) r.cells[kWho] = Cell::value(*who);
  if (when) r.cells[kWhen] = Cell::value(*when);
  r.cells[kWhy] = Cell::below(1.0);
  if (how) r.cells[kHow] = Cell::value(*how);
  if (agg) r.cells[kAgg] = Cell::value(*agg);
  r.note = std::move(note);
  return r;
}

}  // namespace

const std::vector<ReferenceProfile>& builtin_references() {
  static const std::vector<ReferenceProfile> refs = {
      reference("EHRSQL", 80.4, 73.0, std::nullopt, 38.3, "clinical questions over EHR tables"),
      reference("WikiSQL", 31.3, 9.8, std::nullopt, 23.4, "single-table questions over Wikipedia tables"),
      reference("ATIS", 20.4, 0.2, std::nullopt, 4.1, "air travel information"),
      reference("Spider", 16.3, 16.0, 32.9, std::nullopt,
                "cross-domain; HOW reflects quantitative HOW MANY aggregation, not mechanism"),
      reference("BIRD", 20.8, std::nullopt, 44.0, 43.4,
                "cross-domain; HOW reflects quantitative HOW MANY aggregation, not mechanism"),
  };
  return refs;
}

const ReferenceProfile* find_reference(std::string_view dataset) {
  for (const auto& r : builtin_references()) {
    if (sql::same_identifier(r.dataset, dataset)) return &r;
  }
  return nullptr;
}

ProfileRow to_row(const CorpusProfile& profile) {
  ProfileRow row;
  row.dataset = profile.name;
  for (std::size_t i = 0; i < 6; ++i) row.cells[i] = Cell::value(profile.dim_proportion[i] * 100.0);
  row.cells[kAgg] = Cell::value(profile.aggregation_density * 100.0);
  return row;
}

ProfileRow row_from_json(const json& doc, const std::string& source) {
  try {
    ProfileRow row;
    row.dataset = doc.at("name").get<std::string>();
    const json& dims = doc.at("dim_proportion");
    for (std::size_t i = 0; i < 6; ++i) {
      row.cells[i] = Cell::value(dims.at(std::string(kColumnNames[i])).get<double>() * 100.0);
    }
    row.cells[kAgg] = Cell::value(doc.at("aggregation_density").get<double>() * 100.0);
    return row;
  } catch (const json::exception& e) {
    throw FormatError(source, std::string("not a profile document: ") + e.what());
  }
}

ProfileDelta compare_profiles(const ProfileRow& a, const ProfileRow& b) {
  ProfileDelta d;
  d.a = a.dataset;
  d.b = b.dataset;
  d.a_cells = a.cells;
  d.b_cells = b.cells;
  double total = 0;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    const Cell& x = a.cells[i];
    const Cell& y = b.cells[i];
    if (!x.known() || !y.known()) continue;
    d.cells[i].difference = x.percent - y.percent;
    if (y.percent != 0) d.cells[i].ratio = x.percent / y.percent;
    total += std::fabs(x.percent - y.percent);
    ++d.compared;
  }
  if (d.compared == 0) throw NoOverlap(a.dataset, b.dataset);
  d.mismatch = total / static_cast<double>(d.compared);
  return d;
}

}  // namespace quest::profile
