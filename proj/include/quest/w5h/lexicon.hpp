#pragma once

// Pattern lexicon for tagging natural-language questions. Line format:
//   pattern<TAB>dimension[<TAB>how_many]
// with `#` comments and blank lines ignored. Patterns are ECMAScript regular
// expressions matched case-insensitively.

#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quest/schema/dimension.hpp"

namespace quest::w5h {

struct LexiconRule {
  std::string pattern;  // doubles as the rule id
  Dimension dimension = Dimension::what;
  bool how_many = false;
  std::regex regex;
};

class NlLexicon {
 public:
  NlLexicon() = default;

  /// Throws FormatError("source:line") on malformed lines or duplicates.
  static NlLexicon parse(std::string_view text, std::string_view source = "<lexicon>");
  static NlLexicon load(const std::filesystem::path& path);
  static const NlLexicon& builtin();

  const std::vector<LexiconRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<LexiconRule> rules_;
};

struct NlTags {
  DimensionSet dimensions;
  bool how_many = false;
  std::vector<std::string> matched;  // rule patterns, in rule order
  bool operator==(const NlTags&) const = default;
};

/// Rules are tried in order; a match only counts if its span does not
/// overlap text claimed by an earlier rule. Throws std::invalid_argument on
/// empty input.
NlTags tag_nl(std::string_view question, const NlLexicon& lexicon);

std::string_view default_lexicon_text() noexcept;

nlohmann::ordered_json to_json(const NlTags& tags);

}  // namespace quest::w5h
