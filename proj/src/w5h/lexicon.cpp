#include "quest/w5h/lexicon.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "quest/error.hpp"

namespace quest::w5h {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

}  // namespace

NlLexicon NlLexicon::parse(std::string_view text, std::string_view source) {
  NlLexicon lexicon;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty()) {
      throw FormatError(where, "expected pattern<TAB>dimension[<TAB>how_many]");
    }
    LexiconRule rule;
    rule.pattern = fields[0];
    const auto dim = parse_dimension(fields[1]);
    if (!dim) throw FormatError(where, "unknown dimension '" + fields[1] + "'");
    rule.dimension = *dim;
    if (fields.size() == 3) {
      if (fields[2] != "how_many") throw FormatError(where, "unknown marker '" + fields[2] + "'");
      rule.how_many = true;
    }
    for (const auto& existing : lexicon.rules_) {
      if (existing.pattern == rule.pattern) throw FormatError(where, "duplicate pattern '" + rule.pattern + "'");
    }
    try {
      rule.regex = std::regex(rule.pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw FormatError(where, std::string("bad pattern: ") + e.what());
    }
    lexicon.rules_.push_back(std::move(rule));
  }
  return lexicon;
}

NlLexicon NlLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.filename().string());
}

const NlLexicon& NlLexicon::builtin() {
  static const NlLexicon lexicon = parse(default_lexicon_text(), "default.lexicon");
  return lexicon;
}

NlTags tag_nl(std::string_view question, const NlLexicon& lexicon) {
  if (question.empty()) throw std::invalid_argument("tag_nl: empty question");
  const std::string text(question);
  std::vector<std::pair<std::size_t, std::size_t>> claimed;
  auto overlaps = [&](std::size_t b, std::size_t e) {
    for (const auto& [cb, ce] : claimed) {
      if (b < ce && cb < e) return true;
    }
    return false;
  };

  NlTags out;
  for (const auto& rule : lexicon.rules()) {
    bool hit = false;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), rule.regex); it != std::sregex_iterator(); ++it) {
      const auto b = static_cast<std::size_t>(it->position());
      const auto e = b + static_cast<std::size_t>(it->length());
      if (e == b || overlaps(b, e)) continue;
      claimed.emplace_back(b, e);
      hit = true;
    }
    if (!hit) continue;
    out.dimensions.insert(rule.dimension);
    out.how_many = out.how_many || rule.how_many;
    out.matched.push_back(rule.pattern);
  }
  return out;
}

json to_json(const NlTags& tags) {
  json dims = json::array();
  for (Dimension d : tags.dimensions.members()) dims.push_back(std::string(to_string(d)));
  return json{{"dimensions", dims}, {"how_many", tags.how_many}, {"matched", tags.matched}};
}

}  // namespace quest::w5h
