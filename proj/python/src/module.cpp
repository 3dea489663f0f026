#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <optional>
#include <string>

#include "quest/decompose/decomposer.hpp"
#include "quest/error.hpp"
#include "quest/far/far.hpp"
#include "quest/profile/corpus.hpp"
#include "quest/profile/reference.hpp"
#include "quest/profile/report.hpp"
#include "quest/sql/parser.hpp"
#include "quest/w5h/lexicon.hpp"
#include "quest/w5h/tagger.hpp"

namespace py = pybind11;
using namespace quest;

// Results cross the boundary as JSON text; the Python side decodes them.
namespace {

std::string dump(const nlohmann::ordered_json& j) { return j.dump(); }

w5h::NlLexicon lexicon_or_builtin(const std::optional<std::string>& path) {
  return path ? w5h::NlLexicon::load(*path) : w5h::NlLexicon::builtin();
}

// A built-in reference name, or a profile document as JSON text.
profile::ProfileRow row(const std::string& spec) {
  if (const auto* ref = profile::find_reference(spec)) return *ref;
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(spec);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw FormatError("<profile>", e.what());
  }
  return profile::row_from_json(doc, "<profile>");
}

}  // namespace

PYBIND11_MODULE(_quest, m) {
  auto base = py::register_exception<Error>(m, "QuestError", PyExc_RuntimeError);
  py::register_exception<LexError>(m, "LexError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<UnsupportedFeature>(m, "UnsupportedFeature", base);
  py::register_exception<ResolutionError>(m, "ResolutionError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);

  py::class_<schema::SchemaCatalog>(m, "Catalog")
      .def(py::init([](const std::string& path) { return schema::load_catalog(path); }), py::arg("path"))
      .def_property_readonly("name", &schema::SchemaCatalog::name);

  m.def("parse", [](const std::string& sql) { return sql::print_query(sql::parse_query(sql)); }, py::arg("sql"));

  m.def(
      "check",
      [](const std::string& sql, const schema::SchemaCatalog& catalog) {
        const auto q = sql::parse_query(sql);
        return dump(far::to_json(far::check_conformance(far::extract_far(q, catalog), catalog)));
      },
      py::arg("sql"), py::arg("catalog"));

  m.def(
      "far",
      [](const std::string& sql, const schema::SchemaCatalog& catalog) {
        return dump(far::to_json(far::extract_far(sql::parse_query(sql), catalog)));
      },
      py::arg("sql"), py::arg("catalog"));

  m.def(
      "tag",
      [](const std::string& sql, const schema::SchemaCatalog& catalog) {
        return dump(w5h::to_json(w5h::tag_query(sql::parse_query(sql), catalog)));
      },
      py::arg("sql"), py::arg("catalog"));

  m.def(
      "tag_nl",
      [](const std::string& question, const std::optional<std::string>& lexicon) {
        return dump(w5h::to_json(w5h::tag_nl(question, lexicon_or_builtin(lexicon))));
      },
      py::arg("question"), py::arg("lexicon") = std::nullopt);

  m.def(
      "decompose",
      [](const std::string& sql, const schema::SchemaCatalog& catalog) {
        return dump(decompose::to_json(decompose::decompose(sql::parse_query(sql), catalog)));
      },
      py::arg("sql"), py::arg("catalog"));

  m.def(
      "decompose_text",
      [](const std::string& sql, const schema::SchemaCatalog& catalog) {
        return decompose::render_text(decompose::decompose(sql::parse_query(sql), catalog));
      },
      py::arg("sql"), py::arg("catalog"));

  m.def(
      "profile",
      [](const std::string& corpus, const schema::SchemaCatalog& catalog, const std::string& name,
         unsigned threads, bool nl) {
        profile::CatalogSet catalogs;
        catalogs.add(catalog);
        const auto lexicon = w5h::NlLexicon::builtin();
        profile::ProfileOptions options;
        options.threads = threads;
        options.lexicon = nl ? &lexicon : nullptr;
        const auto records = profile::ingest(corpus);
        const std::string label = name.empty() ? std::filesystem::path(corpus).stem().string() : name;
        py::gil_scoped_release release;
        return dump(profile::to_json(profile::profile_corpus(records, catalogs, options, label)));
      },
      py::arg("corpus"), py::arg("catalog"), py::arg("name") = "", py::arg("threads") = 1, py::arg("nl") = false);

  m.def(
      "compare",
      [](const std::string& a, const std::string& b) {
        return profile::render_report(profile::compare_profiles(row(a), row(b)),
                                      profile::parse_report_format("json"));
      },
      py::arg("a"), py::arg("b"));

  m.def("refs", [] {
    return profile::render_report(profile::builtin_references(), profile::parse_report_format("json"));
  });
}
