#include "quest/schema/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "quest/error.hpp"

namespace quest::schema {

using json = nlohmann::ordered_json;

std::string_view to_string(DataType type) noexcept {
  switch (type) {
    case DataType::integer: return "integer";
    case DataType::real: return "real";
    case DataType::text: return "text";
    case DataType::date: return "date";
    case DataType::time: return "time";
    case DataType::timestamp: return "timestamp";
    case DataType::boolean: return "boolean";
  }
  return "?";
}

std::optional<DataType> parse_data_type(std::string_view text) {
  static constexpr DataType kAll[] = {DataType::integer, DataType::real, DataType::text,
                                      DataType::date,    DataType::time, DataType::timestamp,
                                      DataType::boolean};
  for (DataType t : kAll) {
    if (sql::same_identifier(text, to_string(t))) return t;
  }
  return std::nullopt;
}

bool is_numeric(DataType type) noexcept {
  return type == DataType::integer || type == DataType::real;
}

bool is_temporal(DataType type) noexcept {
  return type == DataType::date || type == DataType::time || type == DataType::timestamp;
}

const ColumnInfo* TableInfo::find_column(std::string_view column) const noexcept {
  for (const auto& c : columns) {
    if (sql::same_identifier(c.name, column)) return &c;
  }
  return nullptr;
}

SchemaCatalog::SchemaCatalog(std::string name, std::vector<TableInfo> tables)
    : name_(std::move(name)), tables_(std::move(tables)) {}

const TableInfo* SchemaCatalog::find_table(std::string_view table) const noexcept {
  for (const auto& t : tables_) {
    if (sql::same_identifier(t.name, table)) return &t;
  }
  return nullptr;
}

DimensionSet infer_roles(const ColumnInfo& column) noexcept {
  if (column.is_key()) return {Dimension::who};
  if (is_temporal(column.data_type)) return {Dimension::when};
  return {Dimension::what};
}

namespace {

struct DuplicateKey {
  std::string key;
  int depth;
};

json parse_json(std::string_view text, std::string_view source) {
  // nlohmann keeps the last of duplicate keys silently; track keys per open
  // object so duplicates surface as errors instead.
  std::vector<std::set<std::string>> open_objects;
  json::parser_callback_t track = [&](int depth, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        open_objects.emplace_back();
        break;
      case json::parse_event_t::object_end:
        open_objects.pop_back();
        break;
      case json::parse_event_t::key: {
        const auto& key = parsed.get_ref<const std::string&>();
        if (!open_objects.back().insert(key).second) throw DuplicateKey{key, depth};
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), track);
  } catch (const DuplicateKey& dup) {
    if (dup.depth == 2) {
      throw ValidationError(ValidationError::Kind::duplicate_name,
                            "duplicate table '" + dup.key + "' in " + std::string(source));
    }
    throw FormatError(std::string(source), "duplicate key '" + dup.key + "'");
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(source) + "@byte " + std::to_string(e.byte), e.what());
  }
}

void check_keys(const json& object, std::initializer_list<std::string_view> allowed,
                const std::string& location, const LoadOptions& options) {
  if (options.lax) return;
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw FormatError(location, "unknown key '" + key + "'");
  }
}

const json& require(const json& object, const char* key, const std::string& location) {
  const auto it = object.find(key);
  if (it == object.end()) throw FormatError(location, std::string("missing required key '") + key + "'");
  return *it;
}

std::string require_string(const json& object, const char* key, const std::string& location) {
  const json& value = require(object, key, location);
  if (!value.is_string()) throw FormatError(location + "." + key, "expected a string");
  return value.get<std::string>();
}

ColumnInfo parse_column(const json& node, const std::string& location, const LoadOptions& options) {
  if (!node.is_object()) throw FormatError(location, "column entry must be an object");
  check_keys(node, {"name", "type", "roles", "primary_key", "references"}, location, options);

  ColumnInfo column;
  column.name = require_string(node, "name", location);
  if (column.name.empty()) throw FormatError(location + ".name", "column name is empty");
  const std::string type = require_string(node, "type", location);
  const auto data_type = parse_data_type(type);
  if (!data_type) throw FormatError(location + ".type", "unknown data type '" + type + "'");
  column.data_type = *data_type;

  if (const auto pk = node.find("primary_key"); pk != node.end()) {
    if (!pk->is_boolean()) throw FormatError(location + ".primary_key", "expected a boolean");
    column.is_primary_key = pk->get<bool>();
  }
  if (const auto ref = node.find("references"); ref != node.end()) {
    if (!ref->is_string()) throw FormatError(location + ".references", "expected \"table.column\"");
    const auto text = ref->get<std::string>();
    const auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size() ||
        text.find('.', dot + 1) != std::string::npos) {
      throw FormatError(location + ".references", "expected \"table.column\", got '" + text + "'");
    }
    column.references = ForeignKey{text.substr(0, dot), text.substr(dot + 1)};
  }
  if (const auto roles = node.find("roles"); roles != node.end()) {
    if (!roles->is_array() || roles->empty()) {
      throw FormatError(location + ".roles", "expected a non-empty list of dimensions");
    }
    for (std::size_t i = 0; i < roles->size(); ++i) {
      const json& r = (*roles)[i];
      const auto where = location + ".roles[" + std::to_string(i) + "]";
      if (!r.is_string()) throw FormatError(where, "expected a dimension name");
      const auto dim = parse_dimension(r.get<std::string>());
      if (!dim) throw FormatError(where, "unknown dimension '" + r.get<std::string>() + "'");
      column.roles.insert(*dim);
    }
    column.roles_explicit = true;
  } else {
    column.roles = infer_roles(column);
  }
  return column;
}

void validate(const SchemaCatalog& catalog) {
  const auto& tables = catalog.tables();
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (std::size_t k = i + 1; k < tables.size(); ++k) {
      if (sql::same_identifier(tables[i].name, tables[k].name)) {
        throw ValidationError(ValidationError::Kind::duplicate_name,
                              "duplicate table '" + tables[k].name + "'");
      }
    }
    const auto& cols = tables[i].columns;
    for (std::size_t a = 0; a < cols.size(); ++a) {
      for (std::size_t b = a + 1; b < cols.size(); ++b) {
        if (sql::same_identifier(cols[a].name, cols[b].name)) {
          throw ValidationError(ValidationError::Kind::duplicate_name,
                                "duplicate column '" + tables[i].name + "." + cols[b].name + "'");
        }
      }
    }
  }
  for (const auto& table : tables) {
    for (const auto& column : table.columns) {
      if (!column.references) continue;
      const TableInfo* target = catalog.find_table(column.references->table);
      if (target == nullptr || target->find_column(column.references->column) == nullptr) {
        throw ValidationError(ValidationError::Kind::dangling_reference,
                              table.name + "." + column.name + " references missing " +
                                  column.references->table + "." + column.references->column);
      }
    }
  }
}

}  // namespace

SchemaCatalog parse_catalog(std::string_view text, const LoadOptions& options,
                            std::string_view source) {
  const json root = parse_json(text, source);
  const std::string top = std::string(source);
  if (!root.is_object()) throw FormatError(top, "top level must be an object");
  check_keys(root, {"format", "name", "tables"}, top, options);

  const std::string format = require_string(root, "format", top);
  if (format != kSchemaFormat) {
    throw FormatError(top + ".format", "unsupported format '" + format + "', expected '" +
                                           std::string(kSchemaFormat) + "'");
  }
  const std::string name = require_string(root, "name", top);
  const json& tables_node = require(root, "tables", top);
  if (!tables_node.is_object()) throw FormatError(top + ".tables", "expected an object");
  if (tables_node.empty()) {
    throw ValidationError(ValidationError::Kind::empty_catalog, "catalog '" + name + "' has no tables");
  }

  std::vector<TableInfo> tables;
  for (const auto& [table_name, columns_node] : tables_node.items()) {
    const std::string location = top + ".tables." + table_name;
    if (!columns_node.is_array()) throw FormatError(location, "expected a list of columns");
    if (columns_node.empty()) throw FormatError(location, "table has no columns");
    TableInfo table{table_name, {}};
    for (std::size_t i = 0; i < columns_node.size(); ++i) {
      table.columns.push_back(
          parse_column(columns_node[i], location + "[" + std::to_string(i) + "]", options));
    }
    tables.push_back(std::move(table));
  }

  SchemaCatalog catalog(name, std::move(tables));
  validate(catalog);
  return catalog;
}

SchemaCatalog load_catalog(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schema file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_catalog(buffer.str(), options, path.filename().string());
}

// -- resolution ---------------------------------------------------------------

ResolutionScope ResolutionScope::for_query(const sql::Query& query, const SchemaCatalog& catalog,
                                           const ResolutionScope* parent) {
  std::vector<TableBinding> bindings;
  auto bind = [&](const sql::TableRef& ref) {
    const TableInfo* table = catalog.find_table(ref.name);
    if (table == nullptr) throw ResolutionError(ResolutionError::Kind::unknown_table, ref.name);
    bindings.push_back(TableBinding{ref.exposed_name(), table});
  };
  for (const auto& t : query.from_tables) bind(t);
  for (const auto& j : query.joins) bind(j.table);
  return ResolutionScope(std::move(bindings), parent);
}

ResolvedColumn resolve_column(const sql::ColumnRef& reference, const ResolutionScope& scope) {
  const std::string display =
      reference.qualifier.empty() ? reference.name : reference.qualifier + "." + reference.name;
  std::size_t depth = 0;
  for (const ResolutionScope* s = &scope; s != nullptr; s = s->parent(), ++depth) {
    if (!reference.qualifier.empty()) {
      for (const auto& b : s->bindings()) {
        if (!sql::same_identifier(b.exposed_name, reference.qualifier)) continue;
        // The qualifier is bound here; an inner binding shadows outer ones
        // even when the column is missing.
        const ColumnInfo* column = b.table->find_column(reference.name);
        if (column == nullptr) {
          throw ResolutionError(ResolutionError::Kind::unknown_column, display);
        }
        return ResolvedColumn{b.table, column, b.exposed_name, depth};
      }
      continue;
    }
    std::optional<ResolvedColumn> found;
    for (const auto& b : s->bindings()) {
      const ColumnInfo* column = b.table->find_column(reference.name);
      if (column == nullptr) continue;
      if (found) throw ResolutionError(ResolutionError::Kind::ambiguous_column, display);
      found = ResolvedColumn{b.table, column, b.exposed_name, depth};
    }
    if (found) return *found;
  }
  throw ResolutionError(ResolutionError::Kind::unknown_column, display);
}

}  // namespace quest::schema
