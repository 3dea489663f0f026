#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quest {

// Report order is fixed: WHO, WHAT, WHERE, WHEN, WHY, HOW.
enum class Dimension : std::uint8_t { who, what, where, when, why, how };

inline constexpr std::array<Dimension, 6> kAllDimensions = {
    Dimension::who, Dimension::what, Dimension::where,
    Dimension::when, Dimension::why, Dimension::how};

std::string_view to_string(Dimension d) noexcept;
std::optional<Dimension> parse_dimension(std::string_view text);

class DimensionSet {
 public:
  constexpr DimensionSet() = default;
  DimensionSet(std::initializer_list<Dimension> dims) {
    for (Dimension d : dims) insert(d);
  }

  void insert(Dimension d) noexcept { bits_ |= bit(d); }
  void erase(Dimension d) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(d)); }
  bool contains(Dimension d) const noexcept { return (bits_ & bit(d)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;

  DimensionSet& operator|=(DimensionSet other) noexcept {
    bits_ |= other.bits_;
    return *this;
  }
  friend DimensionSet operator|(DimensionSet a, DimensionSet b) noexcept { return a |= b; }
  bool includes(DimensionSet other) const noexcept { return (bits_ & other.bits_) == other.bits_; }

  /// Members in report order.
  std::vector<Dimension> members() const;
  /// "{WHERE, WHEN}"
  std::string to_string() const;

  bool operator==(const DimensionSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Dimension d) noexcept {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(d));
  }
  std::uint8_t bits_ = 0;
};

}  // namespace quest
