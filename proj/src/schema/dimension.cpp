#include "quest/schema/dimension.hpp"

#include <bit>

#include "quest/sql/ast.hpp"

namespace quest {

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::who: return "WHO";
    case Dimension::what: return "WHAT";
    case Dimension::where: return "WHERE";
    case Dimension::when: return "WHEN";
    case Dimension::why: return "WHY";
    case Dimension::how: return "HOW";
  }
  return "?";
}

std::optional<Dimension> parse_dimension(std::string_view text) {
  for (Dimension d : kAllDimensions) {
    if (sql::same_identifier(text, to_string(d))) return d;
  }
  return std::nullopt;
}

std::size_t DimensionSet::size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Dimension> DimensionSet::members() const {
  std::vector<Dimension> out;
  for (Dimension d : kAllDimensions) {
    if (contains(d)) out.push_back(d);
  }
  return out;
}

std::string DimensionSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (Dimension d : members()) {
    if (!first) out += ", ";
    out += quest::to_string(d);
    first = false;
  }
  return out + "}";
}

}  // namespace quest
