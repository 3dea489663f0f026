#pragma once

// Profile rows in percent, the built-in reference rows, and comparison.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quest/profile/corpus.hpp"

namespace quest::profile {

struct Cell {
  enum class Kind { unknown, value, upper_bound };
  Kind kind = Kind::unknown;
  double percent = 0;

  static Cell value(double p) { return {Kind::value, p}; }
  static Cell below(double p) { return {Kind::upper_bound, p}; }
  bool known() const noexcept { return kind == Kind::value; }
  bool operator==(const Cell&) const = default;
};

inline constexpr std::size_t kColumnCount = 7;  // WHO..HOW, AGG
inline constexpr std::array<std::string_view, kColumnCount> kColumnNames = {
    "WHO", "WHAT", "WHERE", "WHEN", "WHY", "HOW", "AGG"};

/// One dataset's row: six dimensions then aggregation density, in percent.
struct ProfileRow {
  std::string dataset;
  std::array<Cell, kColumnCount> cells{};
  std::string note;
  bool operator==(const ProfileRow&) const = default;
};

using ReferenceProfile = ProfileRow;

/// Text-cited cells only; everything else unknown. WHY is an upper bound.
const std::vector<ReferenceProfile>& builtin_references();
const ReferenceProfile* find_reference(std::string_view dataset);

ProfileRow to_row(const CorpusProfile& profile);

/// Reads a profile document (to_json(CorpusProfile)). Throws FormatError.
ProfileRow row_from_json(const nlohmann::ordered_json& doc, const std::string& source);

struct CellDelta {
  std::optional<double> difference;  // a - b, percentage points
  std::optional<double> ratio;       // a / b
  bool operator==(const CellDelta&) const = default;
};

struct ProfileDelta {
  std::string a;
  std::string b;
  std::array<Cell, kColumnCount> a_cells{};
  std::array<Cell, kColumnCount> b_cells{};
  std::array<CellDelta, kColumnCount> cells{};
  double mismatch = 0;  // mean |difference| over cells known on both sides
  std::size_t compared = 0;
  bool operator==(const ProfileDelta&) const = default;
};

/// Throws NoOverlap when no cell is known on both sides.
ProfileDelta compare_profiles(const ProfileRow& a, const ProfileRow& b);

}  // namespace quest::profile
