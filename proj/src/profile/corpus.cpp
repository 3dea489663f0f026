#include "quest/profile/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "quest/error.hpp"
#include "quest/far/far.hpp"
#include "quest/sql/parser.hpp"

namespace quest::profile {

using json = nlohmann::ordered_json;

namespace {

std::optional<std::string> optional_string(const json& obj, const char* key, std::string& error) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    error = std::string("field '") + key + "' must be a string";
    return std::nullopt;
  }
  return it->get<std::string>();
}

CorpusRecord parse_line(std::string_view line, std::size_t line_no) {
  CorpusRecord record;
  record.line = line_no;
  record.id = "line" + std::to_string(line_no);
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    record.failure = std::string("malformed JSON: ") + e.what();
    return record;
  }
  if (!obj.is_object()) {
    record.failure = "record is not an object";
    return record;
  }
  std::string error;
  if (auto id = optional_string(obj, "id", error)) record.id = *id;
  record.question = optional_string(obj, "question", error);
  const auto query = optional_string(obj, "query", error);
  if (auto db = optional_string(obj, "db_id", error)) record.db_id = *db;
  if (!error.empty()) {
    record.failure = error;
  } else if (!query || query->find_first_not_of(" \t\r\n") == std::string::npos) {
    record.failure = "missing or empty 'query'";
  } else {
    record.query = *query;
  }
  return record;
}

}  // namespace

std::vector<CorpusRecord> ingest_text(std::string_view text) {
  std::vector<CorpusRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(parse_line(line, line_no));
  }
  return out;
}

std::vector<CorpusRecord> ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ingest_text(buffer.str());
}

void CatalogSet::add(schema::SchemaCatalog catalog) {
  for (const auto& c : catalogs_) {
    if (sql::same_identifier(c.name(), catalog.name())) {
      throw ValidationError(ValidationError::Kind::duplicate_name, "catalog '" + catalog.name() + "' loaded twice");
    }
  }
  catalogs_.push_back(std::move(catalog));
}

void CatalogSet::set_default(std::string name) { default_ = std::move(name); }

const schema::SchemaCatalog* CatalogSet::find(std::string_view db_id) const {
  if (db_id.empty()) return default_catalog();
  for (const auto& c : catalogs_) {
    if (sql::same_identifier(c.name(), db_id)) return &c;
  }
  return nullptr;
}

const schema::SchemaCatalog* CatalogSet::default_catalog() const {
  if (default_) {
    for (const auto& c : catalogs_) {
      if (sql::same_identifier(c.name(), *default_)) return &c;
    }
    return nullptr;
  }
  return catalogs_.size() == 1 ? &catalogs_.front() : nullptr;
}

CatalogSet load_catalog_dir(const std::filesystem::path& dir, const schema::LoadOptions& options) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot read schema directory '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());
  CatalogSet set;
  for (const auto& f : files) set.add(schema::load_catalog(f, options));
  return set;
}

RecordAnalysis analyze_record(const CorpusRecord& record, const CatalogSet& catalogs,
                              const ProfileOptions& options) {
  RecordAnalysis out;
  if (record.failure) {
    out.outcome = Outcome::failed;
    out.detail = *record.failure;
    return out;
  }
  sql::Query query;
  try {
    query = sql::parse_query(record.query);
  } catch (const UnsupportedFeature& e) {
    out.outcome = Outcome::unsupported;
    out.detail = e.what();
    return out;
  } catch (const Error& e) {
    out.outcome = Outcome::failed;
    out.detail = e.what();
    return out;
  }
  const schema::SchemaCatalog* catalog = catalogs.find(record.db_id);
  if (catalog == nullptr) {
    out.outcome = Outcome::unresolved;
    out.detail = record.db_id.empty() ? "no default catalog" : "unknown db_id '" + record.db_id + "'";
    return out;
  }
  try {
    const far::FarStructure far = far::extract_far(query, *catalog);
    out.conformant = far::check_conformance(far, *catalog).conformant;
    out.dimensions = w5h::tag_query(query, *catalog, options.tagger);
  } catch (const ResolutionError& e) {
    out.outcome = Outcome::unresolved;
    out.detail = e.what();
    return out;
  }
  out.outcome = Outcome::parsed;
  if (options.lexicon != nullptr && record.question &&
      record.question->find_first_not_of(" \t\r\n") != std::string::npos) {
    out.nl = w5h::tag_nl(*record.question, *options.lexicon);
  }
  return out;
}

void Tally::add(const RecordAnalysis& a) {
  ++n_total;
  switch (a.outcome) {
    case Outcome::unsupported: ++n_unsupported; return;
    case Outcome::unresolved: ++n_unresolved; return;
    case Outcome::failed: ++n_failed; return;
    case Outcome::parsed: break;
  }
  ++n_parsed;
  for (Dimension d : a.dimensions.engaged.members()) ++dims[static_cast<std::size_t>(d)];
  const auto how = a.dimensions.how_kind;
  if (how == w5h::HowKind::how_many || how == w5h::HowKind::both) ++how_many;
  if (how == w5h::HowKind::mechanistic || how == w5h::HowKind::both) ++mechanistic;
  if (a.dimensions.has_aggregation) ++aggregation;
  if (a.conformant) ++conformant;
  if (a.dimensions.dimensionless()) ++dimensionless;
  if (a.nl) {
    ++nl_questions;
    for (Dimension d : a.nl->dimensions.members()) ++dims_nl[static_cast<std::size_t>(d)];
    if (a.nl->how_many) ++how_many_nl;
  }
}

Tally& Tally::operator+=(const Tally& o) {
  n_total += o.n_total;
  n_parsed += o.n_parsed;
  n_unsupported += o.n_unsupported;
  n_unresolved += o.n_unresolved;
  n_failed += o.n_failed;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    dims[i] += o.dims[i];
    dims_nl[i] += o.dims_nl[i];
  }
  how_many += o.how_many;
  mechanistic += o.mechanistic;
  aggregation += o.aggregation;
  conformant += o.conformant;
  dimensionless += o.dimensionless;
  nl_questions += o.nl_questions;
  how_many_nl += o.how_many_nl;
  return *this;
}

CorpusProfile make_profile(std::string name, const Tally& t, bool has_nl) {
  CorpusProfile p;
  p.name = std::move(name);
  p.counts = t;
  p.has_nl = has_nl;
  auto frac = [&](std::size_t n) {
    return t.n_parsed == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(t.n_parsed);
  };
  for (std::size_t i = 0; i < 6; ++i) {
    p.dim_proportion[i] = frac(t.dims[i]);
    p.dim_proportion_nl[i] = has_nl ? frac(t.dims_nl[i]) : 0.0;
  }
  p.how_many_proportion = frac(t.how_many);
  p.mechanistic_how_proportion = frac(t.mechanistic);
  p.aggregation_density = frac(t.aggregation);
  p.conformance_rate = frac(t.conformant);
  p.dimensionless_fraction = frac(t.dimensionless);
  p.how_many_proportion_nl = has_nl ? frac(t.how_many_nl) : 0.0;
  return p;
}

CorpusProfile profile_corpus(const std::vector<CorpusRecord>& records, const CatalogSet& catalogs,
                             const ProfileOptions& options, std::string name) {
  if (records.empty()) throw EmptyCorpus();
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(options.threads, records.size()));
  std::vector<Tally> tallies(workers);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < records.size(); i += workers) {
      tallies[w].add(analyze_record(records[i], catalogs, options));
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  Tally total;
  for (const auto& t : tallies) total += t;
  return make_profile(std::move(name), total, options.lexicon != nullptr);
}

json to_json(const CorpusProfile& p) {
  const Tally& t = p.counts;
  json dims;
  for (Dimension d : kAllDimensions) dims[std::string(to_string(d))] = p.proportion(d);
  json counts{{"total", t.n_total},       {"parsed", t.n_parsed},     {"unsupported", t.n_unsupported},
              {"unresolved", t.n_unresolved}, {"failed", t.n_failed}};
  json dim_counts;
  for (Dimension d : kAllDimensions) dim_counts[std::string(to_string(d))] = t.dims[static_cast<std::size_t>(d)];
  counts["dimensions"] = dim_counts;
  counts["how_many"] = t.how_many;
  counts["mechanistic_how"] = t.mechanistic;
  counts["aggregation"] = t.aggregation;
  counts["conformant"] = t.conformant;
  counts["dimensionless"] = t.dimensionless;

  json out{{"name", p.name},
           {"counts", counts},
           {"dim_proportion", dims},
           {"how_many_proportion", p.how_many_proportion},
           {"mechanistic_how_proportion", p.mechanistic_how_proportion},
           {"aggregation_density", p.aggregation_density},
           {"conformance_rate", p.conformance_rate},
           {"dimensionless_fraction", p.dimensionless_fraction}};
  if (p.has_nl) {
    json nl;
    for (Dimension d : kAllDimensions) {
      nl[std::string(to_string(d)) + "_nl"] = p.dim_proportion_nl[static_cast<std::size_t>(d)];
    }
    nl["HOW_MANY_nl"] = p.how_many_proportion_nl;
    nl["questions"] = t.nl_questions;
    out["nl"] = nl;
  }
  return out;
}

}  // namespace quest::profile
