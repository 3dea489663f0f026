#include "quest/far/far.hpp"

namespace quest::far {

using json = nlohmann::ordered_json;

namespace {

const char* to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::numeric: return "numeric";
    case ValueKind::non_numeric: return "non-numeric";
    case ValueKind::unknown: return "unknown";
  }
  return "unknown";
}

json column_json(const QualifiedColumn& c) { return c.table + "." + c.column; }

json verdict_json(const StepVerdict& v) {
  json reasons = json::array();
  for (ReasonCode code : v.reasons) reasons.push_back(to_string(code));
  return json{{"verdict", v.pass ? "pass" : "fail"}, {"reasons", reasons}};
}

}  // namespace

json to_json(const FarStructure& far) {
  json atoms = json::array();
  for (const auto& a : far.filter.atoms) {
    json atom{{"id", a.id},
              {"text", a.text},
              {"clause", sql::to_string(a.clause)},
              {"post_aggregation", a.post_aggregation},
              {"join_scoping", a.join_scoping},
              {"correlated", a.correlated}};
    if (!a.outer_refs.empty()) atom["outer_refs"] = a.outer_refs;
    atoms.push_back(std::move(atom));
  }
  json filter{{"atoms", atoms},
              {"has_where_scoping", far.filter.has_where_scoping},
              {"has_join_scoping", far.filter.has_join_scoping},
              {"has_having_scoping", far.filter.has_having_scoping},
              {"has_row_limit", far.filter.has_row_limit},
              {"nondeterministic_scope", far.filter.nondeterministic_scope}};

  json calls = json::array();
  for (const auto& c : far.aggregate.calls) {
    calls.push_back(json{{"function", c.function},
                         {"argument", c.argument},
                         {"distinct", c.distinct},
                         {"argument_kind", to_string(c.argument_kind)},
                         {"clause", c.clause}});
  }
  json keys = json::array();
  for (const auto& k : far.aggregate.group_keys) keys.push_back(column_json(k));
  json aggregate{{"calls", calls},
                 {"unknown_functions", far.aggregate.unknown_functions},
                 {"group_keys", keys},
                 {"identity", far.aggregate.identity}};

  json columns = json::array();
  for (const auto& c : far.return_spec.columns) {
    json col{{"text", c.text}};
    if (!c.alias.empty()) col["alias"] = c.alias;
    if (c.column) col["column"] = column_json(*c.column);
    columns.push_back(std::move(col));
  }
  json ordering = json::array();
  for (const auto& o : far.return_spec.ordering) {
    ordering.push_back(
        json{{"key", o.text}, {"direction", o.direction == sql::SortDirection::asc ? "asc" : "desc"}, {"resolved", o.resolved}});
  }
  json ret{{"columns", columns}, {"ordering", ordering}};
  ret["limit"] = far.return_spec.limit ? json(*far.return_spec.limit) : json(nullptr);
  ret["unresolved_columns"] = far.return_spec.unresolved_columns;

  return json{{"filter", filter}, {"aggregate", aggregate}, {"return", ret}};
}

json to_json(const ConformanceReport& report) {
  return json{{"filter", verdict_json(report.filter)},
              {"aggregate", verdict_json(report.aggregate)},
              {"return", verdict_json(report.return_verdict)},
              {"conformant", report.conformant}};
}

}  // namespace quest::far
