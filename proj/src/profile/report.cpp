#include "quest/profile/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "quest/error.hpp"

namespace quest::profile {

using json = nlohmann::ordered_json;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.0" || s == "-0.00" || s == "-0.000") s.erase(0, 1);
  return s;
}

std::string percent(std::size_t n, std::size_t d) {
  return d == 0 ? fixed(0, 1) : fixed(100.0 * static_cast<double>(n) / static_cast<double>(d), 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Left column left-aligned, the rest right-aligned, two spaces apart.
std::string align(const std::vector<std::vector<std::string>>& table) {
  std::vector<std::size_t> width;
  for (const auto& row : table) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : table) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        line += row[i] + std::string(width[i] - row[i].size(), ' ');
      } else {
        line += "  " + std::string(width[i] - row[i].size(), ' ') + row[i];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  }
  return out.str();
}

json cell_json(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::unknown: return nullptr;
    case Cell::Kind::value: return c.percent;
    case Cell::Kind::upper_bound: return json{{"below", c.percent}};
  }
  return nullptr;
}

// Sequential ramp from deep violet to yellow, sampled at six stops.
std::string ramp(double t) {
  static constexpr int kStops[6][3] = {{13, 8, 135},   {106, 0, 168}, {177, 42, 144},
                                       {225, 100, 98}, {252, 166, 54}, {240, 249, 33}};
  t = std::clamp(t, 0.0, 1.0) * 5.0;
  const int i = std::min(4, static_cast<int>(t));
  const double f = t - i;
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(kStops[i][k] + f * (kStops[i + 1][k] - kStops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string heatmap(const std::vector<ProfileRow>& rows, const std::string& title) {
  constexpr int kLabel = 140, kCell = 64, kRow = 32, kTop = 56;
  const int width = kLabel + kCell * static_cast<int>(kColumnCount) + 16;
  const int height = kTop + kRow * static_cast<int>(rows.size()) + 16;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<defs><pattern id=\"unknown\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\">"
         "<rect width=\"6\" height=\"6\" fill=\"#ffffff\"/><path d=\"M0,6 L6,0\" stroke=\"#9a9a9a\" "
         "stroke-width=\"1\"/></pattern></defs>\n";
  out << "<text x=\"8\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    out << "<text x=\"" << kLabel + kCell * static_cast<int>(c) + kCell / 2 << "\" y=\"" << kTop - 8
        << "\" text-anchor=\"middle\">" << kColumnNames[c] << "</text>\n";
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int y = kTop + kRow * static_cast<int>(r);
    out << "<text x=\"8\" y=\"" << y + kRow / 2 + 4 << "\">" << xml_escape(rows[r].dataset) << "</text>\n";
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      const Cell& cell = rows[r].cells[c];
      const int x = kLabel + kCell * static_cast<int>(c);
      const double t = cell.percent / 100.0;
      const std::string fill = cell.kind == Cell::Kind::unknown ? "url(#unknown)" : ramp(t);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kRow
          << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
      const std::string label = format_cell(cell);
      if (!label.empty()) {
        const char* ink = t < 0.6 ? "#ffffff" : "#000000";
        out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kRow / 2 + 4
            << "\" text-anchor=\"middle\" fill=\"" << ink << "\">" << xml_escape(label) << "</text>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<std::string> profile_csv_header(bool nl) {
  std::vector<std::string> h{"dataset"};
  for (auto name : kColumnNames) h.emplace_back(name);
  if (nl) {
    for (Dimension d : kAllDimensions) h.push_back(std::string(to_string(d)) + "_nl");
    h.emplace_back("HOW_MANY_nl");
  }
  return h;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  return line + "\n";
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::text;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "svg") return ReportFormat::svg;
  throw UnsupportedFormat(std::string(name));
}

std::string format_cell(const Cell& cell) {
  switch (cell.kind) {
    case Cell::Kind::unknown: return "";
    case Cell::Kind::value: return fixed(cell.percent, 1);
    case Cell::Kind::upper_bound: {
      const double p = cell.percent;
      return "<" + (p == std::floor(p) ? fixed(p, 0) : fixed(p, 1));
    }
  }
  return "";
}

std::string render_report(const CorpusProfile& p, ReportFormat format) {
  const Tally& t = p.counts;
  switch (format) {
    case ReportFormat::json:
      return to_json(p).dump(2) + "\n";
    case ReportFormat::svg:
      return heatmap({to_row(p)}, "W5H profile: " + p.name);
    case ReportFormat::csv: {
      std::vector<std::string> row{p.name};
      for (std::size_t i = 0; i < 6; ++i) row.push_back(percent(t.dims[i], t.n_parsed));
      row.push_back(percent(t.aggregation, t.n_parsed));
      if (p.has_nl) {
        for (std::size_t i = 0; i < 6; ++i) row.push_back(percent(t.dims_nl[i], t.n_parsed));
        row.push_back(percent(t.how_many_nl, t.n_parsed));
      }
      return join_csv(profile_csv_header(p.has_nl)) + join_csv(row);
    }
    case ReportFormat::text: {
      std::ostringstream out;
      out << align({{"corpus", p.name},
                    {"records", std::to_string(t.n_total)},
                    {"parsed", std::to_string(t.n_parsed)},
                    {"unsupported", std::to_string(t.n_unsupported)},
                    {"unresolved", std::to_string(t.n_unresolved)},
                    {"failed", std::to_string(t.n_failed)}});
      out << "\n";
      std::vector<std::vector<std::string>> table{{"measure", "queries", "percent"}};
      for (Dimension d : kAllDimensions) {
        const auto n = t.dims[static_cast<std::size_t>(d)];
        table.push_back({std::string(to_string(d)), std::to_string(n), percent(n, t.n_parsed)});
      }
      auto add = [&](const char* name, std::size_t n) {
        table.push_back({name, std::to_string(n), percent(n, t.n_parsed)});
      };
      add("how-many", t.how_many);
      add("mechanistic-how", t.mechanistic);
      add("aggregation", t.aggregation);
      add("conformant", t.conformant);
      add("dimensionless", t.dimensionless);
      if (p.has_nl) {
        for (Dimension d : kAllDimensions) {
          add((std::string(to_string(d)) + "_nl").c_str(), t.dims_nl[static_cast<std::size_t>(d)]);
        }
        add("HOW_MANY_nl", t.how_many_nl);
      }
      out << align(table);
      return out.str();
    }
  }
  throw UnsupportedFormat("?");
}

std::string render_report(const std::vector<ProfileRow>& rows, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: {
      json out = json::array();
      for (const auto& r : rows) {
        json cells;
        for (std::size_t i = 0; i < kColumnCount; ++i) cells[std::string(kColumnNames[i])] = cell_json(r.cells[i]);
        json row{{"dataset", r.dataset}, {"cells", cells}};
        if (!r.note.empty()) row["note"] = r.note;
        out.push_back(std::move(row));
      }
      return out.dump(2) + "\n";
    }
    case ReportFormat::svg:
      return heatmap(rows, "W5H profiles (percent of queries)");
    case ReportFormat::csv: {
      std::string out = join_csv(profile_csv_header(false));
      for (const auto& r : rows) {
        std::vector<std::string> fields{r.dataset};
        for (const auto& c : r.cells) fields.push_back(format_cell(c));
        out += join_csv(fields);
      }
      return out;
    }
    case ReportFormat::text: {
      std::vector<std::vector<std::string>> table;
      std::vector<std::string> header{"dataset"};
      for (auto name : kColumnNames) header.emplace_back(name);
      table.push_back(header);
      for (const auto& r : rows) {
        std::vector<std::string> fields{r.dataset};
        for (const auto& c : r.cells) fields.push_back(c.kind == Cell::Kind::unknown ? "-" : format_cell(c));
        table.push_back(fields);
      }
      return align(table);
    }
  }
  throw UnsupportedFormat("?");
}

std::string render_report(const ProfileDelta& d, ReportFormat format) {
  auto diff_text = [](const CellDelta& c) { return c.difference ? fixed(*c.difference, 1) : std::string(); };
  auto ratio_text = [](const CellDelta& c) { return c.ratio ? fixed(*c.ratio, 4) : std::string(); };
  switch (format) {
    case ReportFormat::json: {
      // Rounded so float noise (49.10000000000001) stays out of documents.
      auto number = [](const std::optional<double>& v) {
        return v ? json(std::round(*v * 1e6) / 1e6) : json(nullptr);
      };
      json cells;
      for (std::size_t i = 0; i < kColumnCount; ++i) {
        const CellDelta& c = d.cells[i];
        cells[std::string(kColumnNames[i])] =
            json{{"a", cell_json(d.a_cells[i])},
                 {"b", cell_json(d.b_cells[i])},
                 {"diff", number(c.difference)},
                 {"ratio", number(c.ratio)}};
      }
      return json{{"a", d.a}, {"b", d.b}, {"cells", cells}, {"mismatch", number(d.mismatch)}, {"compared", d.compared}}
                 .dump(2) +
             "\n";
    }
    case ReportFormat::svg: {
      ProfileRow a{d.a, d.a_cells, ""};
      ProfileRow b{d.b, d.b_cells, ""};
      return heatmap({a, b}, d.a + " vs " + d.b + " (mismatch " + fixed(d.mismatch, 1) + " points)");
    }
    case ReportFormat::csv: {
      std::string out = join_csv({"column", d.a, d.b, "diff", "ratio"});
      for (std::size_t i = 0; i < kColumnCount; ++i) {
        out += join_csv({std::string(kColumnNames[i]), format_cell(d.a_cells[i]), format_cell(d.b_cells[i]),
                         diff_text(d.cells[i]), ratio_text(d.cells[i])});
      }
      return out;
    }
    case ReportFormat::text: {
      std::vector<std::vector<std::string>> table{{"column", d.a, d.b, "diff", "ratio"}};
      auto shown = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
      for (std::size_t i = 0; i < kColumnCount; ++i) {
        table.push_back({std::string(kColumnNames[i]), shown(format_cell(d.a_cells[i])),
                         shown(format_cell(d.b_cells[i])), shown(diff_text(d.cells[i])),
                         shown(ratio_text(d.cells[i]))});
      }
      return align(table) + "\nmismatch " + fixed(d.mismatch, 2) + " points over " +
             std::to_string(d.compared) + " shared cells\n";
    }
  }
  throw UnsupportedFormat("?");
}

}  // namespace quest::profile
