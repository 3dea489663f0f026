#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quest/schema/dimension.hpp"
#include "quest/sql/ast.hpp"

namespace quest::schema {

enum class DataType { integer, real, text, date, time, timestamp, boolean };

std::string_view to_string(DataType type) noexcept;
std::optional<DataType> parse_data_type(std::string_view text);
bool is_numeric(DataType type) noexcept;
bool is_temporal(DataType type) noexcept;

struct ForeignKey {
  std::string table;
  std::string column;
  bool operator==(const ForeignKey&) const = default;
};

struct ColumnInfo {
  std::string name;
  DataType data_type = DataType::text;
  DimensionSet roles;
  bool roles_explicit = false;
  bool is_primary_key = false;
  std::optional<ForeignKey> references;

  bool is_key() const noexcept { return is_primary_key || references.has_value(); }
  bool operator==(const ColumnInfo&) const = default;
};

struct TableInfo {
  std::string name;
  std::vector<ColumnInfo> columns;

  const ColumnInfo* find_column(std::string_view column) const noexcept;
};

/// Annotated schema: tables in file order, columns in declaration order.
/// Immutable once loaded.
class SchemaCatalog {
 public:
  SchemaCatalog() = default;
  SchemaCatalog(std::string name, std::vector<TableInfo> tables);

  const std::string& name() const noexcept { return name_; }
  const std::vector<TableInfo>& tables() const noexcept { return tables_; }
  const TableInfo* find_table(std::string_view table) const noexcept;

 private:
  std::string name_;
  std::vector<TableInfo> tables_;
};

struct LoadOptions {
  bool lax = false;  // accept unknown keys instead of rejecting them
};

inline constexpr std::string_view kSchemaFormat = "quest-schema/1";

/// Reads and validates a schema annotation file. Throws IoError, FormatError
/// (with a JSON-path location) or ValidationError.
SchemaCatalog load_catalog(const std::filesystem::path& path, const LoadOptions& options = {});

/// Same as load_catalog over in-memory text; `source` names it in errors.
SchemaCatalog parse_catalog(std::string_view text, const LoadOptions& options = {},
                            std::string_view source = "<memory>");

/// Roles implied by key flags and data type: keys are WHO, temporal types are
/// WHEN, everything else WHAT. WHERE, WHY and HOW are never inferred.
DimensionSet infer_roles(const ColumnInfo& column) noexcept;

// -- column resolution ------------------------------------------------------

struct TableBinding {
  std::string exposed_name;  // alias, or table name when unaliased
  const TableInfo* table = nullptr;
};

/// Tables visible to one query block, chained to the enclosing block's
/// scope for correlated references.
class ResolutionScope {
 public:
  ResolutionScope(std::vector<TableBinding> bindings, const ResolutionScope* parent = nullptr)
      : bindings_(std::move(bindings)), parent_(parent) {}

  /// Binds the FROM/JOIN tables of `query`; throws ResolutionError(unknown-table).
  static ResolutionScope for_query(const sql::Query& query, const SchemaCatalog& catalog,
                                   const ResolutionScope* parent = nullptr);

  const std::vector<TableBinding>& bindings() const noexcept { return bindings_; }
  const ResolutionScope* parent() const noexcept { return parent_; }

 private:
  std::vector<TableBinding> bindings_;
  const ResolutionScope* parent_;
};

struct ResolvedColumn {
  const TableInfo* table = nullptr;
  const ColumnInfo* column = nullptr;
  std::string binding;     // exposed name that matched
  std::size_t depth = 0;   // 0 = own scope, 1 = enclosing block, ...

  bool is_outer() const noexcept { return depth > 0; }
};

/// Resolves a column reference, inner scopes shadowing outer ones. Throws
/// ResolutionError(unknown-column | ambiguous-column).
ResolvedColumn resolve_column(const sql::ColumnRef& reference, const ResolutionScope& scope);

}  // namespace quest::schema
