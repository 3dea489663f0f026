#pragma once

// Error hierarchy shared by every quest module. Analysis findings (conformance
// verdicts, tags) are values, not errors; only contract violations throw.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quest {

struct SourcePosition {
  std::size_t offset = 0;  // byte offset into the query text
  std::size_t line = 1;
  std::size_t column = 1;

  bool operator==(const SourcePosition&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LexError : public Error {
 public:
  LexError(SourcePosition position, const std::string& message)
      : Error("lex-error at " + std::to_string(position.line) + ":" +
              std::to_string(position.column) + ": " + message),
        position_(position) {}

  const SourcePosition& position() const noexcept { return position_; }

 private:
  SourcePosition position_;
};

class ParseError : public Error {
 public:
  ParseError(SourcePosition position, std::vector<std::string> expected,
             const std::string& message);

  const SourcePosition& position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourcePosition position_;
  std::vector<std::string> expected_;
};

// Recognized SQL that lies outside the supported subset (UNION, window
// functions, CTEs, ...). Kept apart from ParseError so corpus statistics can
// separate "outside subset" from "malformed".
class UnsupportedFeature : public Error {
 public:
  UnsupportedFeature(SourcePosition position, std::string feature)
      : Error("unsupported-feature(" + feature + ") at " +
              std::to_string(position.line) + ":" +
              std::to_string(position.column)),
        position_(position),
        feature_(std::move(feature)) {}

  const SourcePosition& position() const noexcept { return position_; }
  const std::string& feature() const noexcept { return feature_; }

 private:
  SourcePosition position_;
  std::string feature_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(std::string location, const std::string& message)
      : Error("format-error at " + location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class ValidationError : public Error {
 public:
  enum class Kind { dangling_reference, duplicate_name, empty_catalog };

  ValidationError(Kind kind, const std::string& message)
      : Error("validation-error(" + std::string(kind_name(kind)) + "): " + message),
        kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

  static const char* kind_name(Kind kind) noexcept {
    switch (kind) {
      case Kind::dangling_reference: return "dangling-reference";
      case Kind::duplicate_name: return "duplicate-name";
      case Kind::empty_catalog: return "empty-catalog";
    }
    return "unknown";
  }

 private:
  Kind kind_;
};

class ResolutionError : public Error {
 public:
  enum class Kind { unknown_column, ambiguous_column, unknown_table };

  ResolutionError(Kind kind, std::string name)
      : Error(std::string(kind_name(kind)) + ": " + name),
        kind_(kind),
        name_(std::move(name)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  static const char* kind_name(Kind kind) noexcept {
    switch (kind) {
      case Kind::unknown_column: return "unknown-column";
      case Kind::ambiguous_column: return "ambiguous-column";
      case Kind::unknown_table: return "unknown-table";
    }
    return "unknown";
  }

 private:
  Kind kind_;
  std::string name_;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("empty-corpus: no records to profile") {}
};

class NoOverlap : public Error {
 public:
  NoOverlap(const std::string& a, const std::string& b)
      : Error("no-overlap: profiles '" + a + "' and '" + b +
              "' share no known cells") {}
};

class UnsupportedFormat : public Error {
 public:
  explicit UnsupportedFormat(const std::string& format)
      : Error("unsupported-format: " + format) {}
};

}  // namespace quest
