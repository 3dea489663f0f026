#pragma once

// Corpus ingestion and dimensional profiling.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quest/schema/catalog.hpp"
#include "quest/w5h/lexicon.hpp"
#include "quest/w5h/tagger.hpp"

namespace quest::profile {

struct CorpusRecord {
  std::size_t line = 0;  // 1-based line in the corpus file
  std::string id;
  std::optional<std::string> question;
  std::string query;
  std::string db_id;
  std::optional<std::string> failure;  // set for lines that are not a usable record
};

/// One record per non-blank line, in file order. Malformed lines become
/// failure records. Throws IoError.
std::vector<CorpusRecord> ingest(const std::filesystem::path& path);
std::vector<CorpusRecord> ingest_text(std::string_view text);

/// Catalogs keyed by name. A record's db_id must name one of them; records
/// without a db_id use the default, which is the only catalog when exactly
/// one is loaded.
class CatalogSet {
 public:
  void add(schema::SchemaCatalog catalog);
  void set_default(std::string name);

  const schema::SchemaCatalog* find(std::string_view db_id) const;
  const schema::SchemaCatalog* default_catalog() const;
  std::size_t size() const noexcept { return catalogs_.size(); }
  bool empty() const noexcept { return catalogs_.empty(); }

 private:
  std::vector<schema::SchemaCatalog> catalogs_;
  std::optional<std::string> default_;
};

/// Loads every *.json file of `dir` (sorted by name) as a catalog.
CatalogSet load_catalog_dir(const std::filesystem::path& dir, const schema::LoadOptions& options = {});

enum class Outcome { parsed, unsupported, unresolved, failed };

struct RecordAnalysis {
  Outcome outcome = Outcome::failed;
  std::string detail;  // error message for non-parsed outcomes
  w5h::QueryDimensions dimensions;
  bool conformant = false;
  std::optional<w5h::NlTags> nl;
};

struct ProfileOptions {
  w5h::TaggerOptions tagger;
  const w5h::NlLexicon* lexicon = nullptr;  // set to add the _nl columns
  unsigned threads = 1;
};

RecordAnalysis analyze_record(const CorpusRecord& record, const CatalogSet& catalogs,
                              const ProfileOptions& options = {});

/// Exact per-corpus counts. Merging is commutative and associative.
struct Tally {
  std::size_t n_total = 0;
  std::size_t n_parsed = 0;
  std::size_t n_unsupported = 0;
  std::size_t n_unresolved = 0;
  std::size_t n_failed = 0;
  std::array<std::size_t, 6> dims{};
  std::size_t how_many = 0;
  std::size_t mechanistic = 0;
  std::size_t aggregation = 0;
  std::size_t conformant = 0;
  std::size_t dimensionless = 0;
  std::size_t nl_questions = 0;  // parsed records carrying a question
  std::array<std::size_t, 6> dims_nl{};
  std::size_t how_many_nl = 0;

  void add(const RecordAnalysis& analysis);
  Tally& operator+=(const Tally& other);
  bool operator==(const Tally&) const = default;
};

struct CorpusProfile {
  std::string name;
  Tally counts;
  bool has_nl = false;
  // Fractions over n_parsed; 0 when nothing parsed.
  std::array<double, 6> dim_proportion{};
  double how_many_proportion = 0;
  double mechanistic_how_proportion = 0;
  double aggregation_density = 0;
  double conformance_rate = 0;
  double dimensionless_fraction = 0;
  std::array<double, 6> dim_proportion_nl{};
  double how_many_proportion_nl = 0;

  double proportion(Dimension d) const noexcept { return dim_proportion[static_cast<std::size_t>(d)]; }
  bool operator==(const CorpusProfile&) const = default;
};

CorpusProfile make_profile(std::string name, const Tally& tally, bool has_nl);

/// Throws EmptyCorpus when `records` is empty. The result does not depend
/// on record order or thread count.
CorpusProfile profile_corpus(const std::vector<CorpusRecord>& records, const CatalogSet& catalogs,
                             const ProfileOptions& options = {}, std::string name = "corpus");

nlohmann::ordered_json to_json(const CorpusProfile& profile);

}  // namespace quest::profile
