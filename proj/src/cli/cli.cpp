#include "quest/cli/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "quest/decompose/decomposer.hpp"
#include "quest/error.hpp"
#include "quest/far/far.hpp"
#include "quest/profile/corpus.hpp"
#include "quest/profile/reference.hpp"
#include "quest/profile/report.hpp"
#include "quest/sql/parser.hpp"
#include "quest/sql/predicates.hpp"
#include "quest/w5h/lexicon.hpp"
#include "quest/w5h/tagger.hpp"

namespace quest::cli {

namespace {

using json = nlohmann::ordered_json;

struct Flags {
  std::vector<std::string> schemas;
  std::string schema_dir;
  std::string db;
  std::string corpus;
  std::string lexicon;
  std::string format;
  std::string name;
  std::vector<std::string> positional;
  bool nl = false;
  bool anchored_counts_who = false;
  bool lax = false;
  bool fail_on_nonconformant = false;
  unsigned threads = 1;
};

// Failures that map to an exit code once the message is printed.
struct Exit {
  int code;
  std::string message;
};

profile::CatalogSet load_catalogs(const Flags& f) {
  const schema::LoadOptions options{f.lax};
  profile::CatalogSet set;
  if (!f.schema_dir.empty()) set = profile::load_catalog_dir(f.schema_dir, options);
  for (const auto& path : f.schemas) set.add(schema::load_catalog(path, options));
  if (!f.db.empty()) {
    if (set.find(f.db) == nullptr) throw Exit{kUsage, "no loaded catalog is named '" + f.db + "'"};
    set.set_default(f.db);
  }
  return set;
}

const schema::SchemaCatalog& single_catalog(const profile::CatalogSet& set) {
  if (set.empty()) throw Exit{kUsage, "a schema is required (--schema or --schema-dir)"};
  const schema::SchemaCatalog* c = set.default_catalog();
  if (c == nullptr) throw Exit{kUsage, "several catalogs loaded; choose one with --db"};
  return *c;
}

std::string read_query(const Flags& f, std::istream& in) {
  if (!f.positional.empty()) return f.positional.back();
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw Exit{kUsage, "no query given"};
  return text;
}

w5h::NlLexicon lexicon_for(const Flags& f) {
  if (!f.lexicon.empty()) return w5h::NlLexicon::load(f.lexicon);
  return w5h::NlLexicon::builtin();
}

w5h::TaggerOptions tagger_options(const Flags& f) {
  w5h::TaggerOptions o;
  o.anchored_counts_who = f.anchored_counts_who;
  return o;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string verdict_line(const char* step, const far::StepVerdict& v) {
  std::string line = std::string(step) + ": " + (v.pass ? "pass" : "fail");
  for (auto code : v.reasons) line += std::string(" ") + far::to_string(code);
  return line + "\n";
}

int cmd_parse(const Flags& f, std::istream& in, std::ostream& out) {
  const sql::Query q = sql::parse_query(read_query(f, in));
  if (f.format == "text") {
    out << sql::print_query(q) << "\n";
    return kOk;
  }
  const sql::Atomization atoms = sql::atomize(q);
  json predicates = json::array();
  for (const auto& p : atoms.predicates) {
    json item{{"id", p.id},
              {"text", sql::print_expr(p.expression)},
              {"source", sql::to_string(p.source)},
              {"clause", sql::to_string(p.clause)},
              {"correlated", p.correlated}};
    if (!p.outer_qualifiers.empty()) item["outer"] = p.outer_qualifiers;
    predicates.push_back(std::move(item));
  }
  out << json{{"sql", sql::print_query(q)}, {"subqueries", atoms.scopes.size() - 1}, {"predicates", predicates}}
             .dump(2)
      << "\n";
  return kOk;
}

int cmd_check(const Flags& f, std::istream& in, std::ostream& out) {
  const auto catalogs = load_catalogs(f);
  const auto& catalog = single_catalog(catalogs);
  const sql::Query q = sql::parse_query(read_query(f, in));
  const far::ConformanceReport report = far::check_conformance(far::extract_far(q, catalog), catalog);
  if (f.format == "text") {
    out << verdict_line("filter", report.filter) << verdict_line("aggregate", report.aggregate)
        << verdict_line("return", report.return_verdict) << "conformant: " << yes_no(report.conformant) << "\n";
  } else {
    out << far::to_json(report).dump(2) << "\n";
  }
  return f.fail_on_nonconformant && !report.conformant ? kNonconformant : kOk;
}

int cmd_tag(const Flags& f, std::istream& in, std::ostream& out) {
  if (f.nl) {
    const std::string question = read_query(f, in);
    const w5h::NlTags tags = w5h::tag_nl(question, lexicon_for(f));
    if (f.format == "text") {
      out << tags.dimensions.to_string() << (tags.how_many ? " how_many" : "") << "\n";
    } else {
      out << w5h::to_json(tags).dump(2) << "\n";
    }
    return kOk;
  }
  const auto catalogs = load_catalogs(f);
  const auto& catalog = single_catalog(catalogs);
  const sql::Query q = sql::parse_query(read_query(f, in));
  const w5h::QueryDimensions dims = w5h::tag_query(q, catalog, tagger_options(f));
  if (f.format != "text") {
    out << w5h::to_json(dims).dump(2) << "\n";
    return kOk;
  }
  out << "engaged: " << dims.engaged.to_string() << "\n"
      << "how: " << w5h::to_string(dims.how_kind) << "\n"
      << "aggregation: " << yes_no(dims.has_aggregation) << "\n";
  const sql::Atomization atoms = sql::atomize(q);
  for (const auto& t : dims.predicate_tags) {
    out << t.predicate_id << " " << sql::print_expr(atoms.find(t.predicate_id)->expression) << " "
        << t.dimensions.to_string();
    if (t.who_anchored) out << " who-anchored on " << t.anchor_entity->table << "." << t.anchor_entity->key_column;
    if (t.anchor_pin) out << " anchor-pin";
    out << "\n";
  }
  for (const auto& op : dims.constraint_operators) out << "operator: " << decompose::to_string(op) << "\n";
  return kOk;
}

int cmd_decompose(const Flags& f, std::istream& in, std::ostream& out) {
  const auto catalogs = load_catalogs(f);
  const auto& catalog = single_catalog(catalogs);
  const sql::Query q = sql::parse_query(read_query(f, in));
  const decompose::DecompositionPlan plan = decompose::decompose(q, catalog);
  if (f.format == "text") {
    out << decompose::render_text(plan);
  } else {
    out << decompose::to_json(plan).dump(2) << "\n";
  }
  bool conformant = true;
  for (const auto& s : plan.steps) conformant = conformant && s.conformance.conformant;
  return f.fail_on_nonconformant && !conformant ? kNonconformant : kOk;
}

int cmd_profile(const Flags& f, std::ostream& out) {
  const auto format = profile::parse_report_format(f.format);
  const auto catalogs = load_catalogs(f);
  if (catalogs.empty()) throw Exit{kUsage, "a schema is required (--schema or --schema-dir)"};
  const auto records = profile::ingest(f.corpus);
  std::optional<w5h::NlLexicon> lexicon;
  if (f.nl) lexicon = lexicon_for(f);
  profile::ProfileOptions options;
  options.tagger = tagger_options(f);
  options.lexicon = lexicon ? &*lexicon : nullptr;
  options.threads = f.threads;
  const std::string name = f.name.empty() ? std::filesystem::path(f.corpus).stem().string() : f.name;
  const auto result = profile::profile_corpus(records, catalogs, options, name);
  out << profile::render_report(result, format);
  const bool all = result.counts.conformant == result.counts.n_parsed;
  return f.fail_on_nonconformant && !all ? kNonconformant : kOk;
}

profile::ProfileRow load_row(const std::string& spec) {
  if (const auto* ref = profile::find_reference(spec)) return *ref;
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw Exit{kUsage, "'" + spec + "' is neither a built-in reference nor a readable profile file"};
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(spec, e.what());
  }
  return profile::row_from_json(doc, spec);
}

int cmd_compare(const Flags& f, std::ostream& out) {
  const auto format = profile::parse_report_format(f.format);
  if (f.positional.size() != 2) throw Exit{kUsage, "compare takes exactly two profiles"};
  const auto a = load_row(f.positional[0]);
  const auto b = load_row(f.positional[1]);
  out << profile::render_report(profile::compare_profiles(a, b), format);
  return kOk;
}

int cmd_refs(const Flags& f, std::ostream& out) {
  out << profile::render_report(profile::builtin_references(), profile::parse_report_format(f.format));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Structural and W5H analysis of SQL queries and query corpora", "quest"};
  app.require_subcommand(1, 1);

  const std::vector<std::string> single_formats{"json", "text"};
  const std::vector<std::string> report_formats{"text", "csv", "json", "svg"};

  auto add_schema = [&](CLI::App* sub) {
    sub->add_option("--schema", f.schemas, "Schema annotation file (repeatable)")
        ->allow_extra_args(false)
        ->check(CLI::ExistingFile);
    sub->add_option("--schema-dir", f.schema_dir, "Directory of schema annotation files")
        ->check(CLI::ExistingDirectory);
    sub->add_option("--db", f.db, "Catalog to use when several are loaded");
    sub->add_flag("--lax", f.lax, "Accept unknown keys in schema files");
  };
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("query", f.positional, "SQL text; read from standard input when absent");
    sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember(single_formats))->default_str("json");
  };

  CLI::App* parse = app.add_subcommand("parse", "Parse and canonicalize one query");
  add_query(parse);

  CLI::App* check = app.add_subcommand("check", "FAR conformance report for one query");
  add_schema(check);
  add_query(check);
  check->add_flag("--fail-on-nonconformant", f.fail_on_nonconformant, "Exit 3 when not conformant");

  CLI::App* tag = app.add_subcommand("tag", "W5H dimensions of one query");
  add_schema(tag);
  add_query(tag);
  tag->add_flag("--anchored-counts-who", f.anchored_counts_who, "Count WHO-anchored WHEN as WHO");
  tag->add_flag("--nl", f.nl, "Treat the input as a natural-language question");
  tag->add_option("--lexicon", f.lexicon, "Question lexicon file")->envname("QUEST_LEXICON");

  CLI::App* decomp = app.add_subcommand("decompose", "FAR steps of a nested query");
  add_schema(decomp);
  add_query(decomp);
  decomp->add_flag("--fail-on-nonconformant", f.fail_on_nonconformant, "Exit 3 when a step is not conformant");

  CLI::App* prof = app.add_subcommand("profile", "Dimensional profile of a query corpus");
  add_schema(prof);
  prof->add_option("--corpus", f.corpus, "Line-delimited JSON corpus")->required()->check(CLI::ExistingFile);
  prof->add_option("--format", f.format, "Report format")->check(CLI::IsMember(report_formats))->default_str("text");
  prof->add_option("--name", f.name, "Dataset name in the report");
  prof->add_flag("--nl", f.nl, "Add question-lexicon columns (_nl)");
  prof->add_option("--lexicon", f.lexicon, "Question lexicon file")->envname("QUEST_LEXICON");
  prof->add_flag("--anchored-counts-who", f.anchored_counts_who, "Count WHO-anchored WHEN as WHO");
  prof->add_flag("--fail-on-nonconformant", f.fail_on_nonconformant, "Exit 3 unless every parsed query conforms");
  prof->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1U, 256U));

  CLI::App* cmp = app.add_subcommand("compare", "Compare two profiles or built-in references");
  cmp->add_option("profiles", f.positional, "Reference name or profile JSON file, twice")->expected(2);
  cmp->add_option("--format", f.format, "Report format")->check(CLI::IsMember(report_formats))->default_str("text");

  CLI::App* refs = app.add_subcommand("refs", "Built-in reference profiles");
  refs->add_option("--format", f.format, "Report format")->check(CLI::IsMember(report_formats))->default_str("text");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "quest: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (f.format.empty()) f.format = (sub == prof || sub == cmp || sub == refs) ? "text" : "json";

  try {
    if (sub == parse) return cmd_parse(f, in, out);
    if (sub == check) return cmd_check(f, in, out);
    if (sub == tag) return cmd_tag(f, in, out);
    if (sub == decomp) return cmd_decompose(f, in, out);
    if (sub == prof) return cmd_profile(f, out);
    if (sub == cmp) return cmd_compare(f, out);
    return cmd_refs(f, out);
  } catch (const Exit& e) {
    err << "quest: " << e.message << "\n";
    return e.code;
  } catch (const IoError& e) {
    err << "quest: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << "quest: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << "quest: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedFormat& e) {
    err << "quest: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "quest: " << e.what() << "\n";
    return kAnalysis;
  } catch (const std::invalid_argument& e) {
    err << "quest: " << e.what() << "\n";
    return kAnalysis;
  }
}

}  // namespace quest::cli
