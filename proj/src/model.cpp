#include "relq/adapters/model.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

#include "relq/adapters/csv_adapter.hpp"
#include "relq/adapters/doc_adapter.hpp"
#include "relq/adapters/mem_adapter.hpp"
#include "relq/adapters/remote_adapter.hpp"
#include "relq/error.hpp"
#include "relq/matview.hpp"
#include "relq/metadata.hpp"
#include "relq/rules.hpp"

namespace relq {

namespace {

using nlohmann::json;

std::string requireString(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    raise(ErrorCode::ModelParseError,
          fmt::format("{} requires a string '{}'", where, key));
  }
  return obj[key].get<std::string>();
}

ScalarType columnType(const json& column, const std::string& where) {
  std::string name = requireString(column, "type", where);
  auto type = ScalarType::fromName(name);
  if (!type) {
    raise(ErrorCode::ModelParseError,
          fmt::format("{} has unknown type '{}'", where, name));
  }
  bool nullable = column.value("nullable", true);
  return type->withNullable(nullable);
}

RowType parseColumns(const json& table, const std::string& where) {
  if (!table.contains("columns") || !table["columns"].is_array() ||
      table["columns"].empty()) {
    raise(ErrorCode::ModelParseError, fmt::format("{} requires columns[]", where));
  }
  std::vector<RowField> fields;
  for (const auto& column : table["columns"]) {
    fields.push_back(
        {requireString(column, "name", where), columnType(column, where)});
  }
  return RowType(std::move(fields));
}

Statistics parseStatistics(const json& table, double defaultRowCount) {
  Statistics stats;
  stats.rowCount = table.value("rowCount", defaultRowCount);
  if (table.contains("columns")) {
    bool any = false;
    std::vector<double> sizes;
    for (const auto& column : table["columns"]) {
      double size = column.value("avgSize", MetadataProvider::kDefaultFieldSize);
      any = any || column.contains("avgSize");
      sizes.push_back(size);
    }
    if (any) stats.fieldSizes = std::move(sizes);
  }
  return stats;
}

Collation parseCollation(const json& table, const RowType& rowType,
                         const std::string& where) {
  Collation out;
  if (!table.contains("collation")) return out;
  for (const auto& key : table["collation"]) {
    int field;
    if (key.contains("column") && key["column"].is_string()) {
      field = rowType.indexOf(key["column"].get<std::string>());
      if (field < 0) {
        raise(ErrorCode::ModelParseError,
              fmt::format("{} collation references unknown column '{}'", where,
                          key["column"].get<std::string>()));
      }
    } else if (key.contains("column") && key["column"].is_number_integer()) {
      field = key["column"].get<int>();
    } else {
      raise(ErrorCode::ModelParseError,
            fmt::format("{} collation entries require 'column'", where));
    }
    std::string direction = toUpper(key.value("direction", "ASC"));
    out.push_back({field, direction == "DESC" ? Direction::Descending
                                              : Direction::Ascending});
  }
  return out;
}

std::filesystem::path resolvePath(const std::string& raw,
                                  const std::filesystem::path& baseDir,
                                  const std::string& where) {
  std::filesystem::path path(raw);
  if (path.is_relative()) path = baseDir / path;
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::MissingFile,
          fmt::format("{} references missing file '{}'", where, path.string()));
  }
  return path;
}

Capabilities parseCapabilities(const std::map<std::string, std::string>& options,
                               const std::string& defaults) {
  std::string spec = defaults;
  auto it = options.find("capabilities");
  if (it != options.end()) spec = it->second;
  Capabilities caps;
  std::stringstream stream(spec);
  std::string flag;
  while (std::getline(stream, flag, ',')) {
    flag = toLower(flag);
    if (flag == "projection" || flag == "project") caps.projection = true;
    else if (flag == "filter") caps.filter = true;
    else if (flag == "sort") caps.sort = true;
    else if (flag == "aggregate") caps.aggregate = true;
    else if (flag == "join") caps.joinWithinBackend = true;
    else if (!flag.empty()) {
      raise(ErrorCode::ModelParseError,
            fmt::format("unknown capability flag '{}'", flag));
    }
  }
  return caps;
}

Value jsonScalarToValue(const json& j, const ScalarType& type, const std::string& where) {
  if (j.is_null()) return Value::null();
  switch (type.kind()) {
    case ScalarType::Kind::Boolean:
      if (j.is_boolean()) return Value::boolean(j.get<bool>());
      break;
    case ScalarType::Kind::Int64:
      if (j.is_number_integer() || j.is_number_unsigned()) {
        return Value::int64(j.get<int64_t>());
      }
      break;
    case ScalarType::Kind::Float64:
      if (j.is_number()) return Value::float64(j.get<double>());
      break;
    case ScalarType::Kind::String:
      if (j.is_string()) return Value::string(j.get<std::string>());
      break;
    default:
      break;
  }
  raise(ErrorCode::ModelParseError,
        fmt::format("{} row value {} does not match type {}", where, j.dump(),
                    type.render()));
}

std::map<std::string, std::string> parseOptions(const json& schema) {
  std::map<std::string, std::string> options;
  if (schema.contains("options")) {
    for (const auto& [key, value] : schema["options"].items()) {
      options[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return options;
}

void loadCsvSchema(AdapterSchema& schema, const json& spec,
                   const std::filesystem::path& baseDir) {
  Capabilities caps = parseCapabilities(schema.options(), "projection");
  for (const auto& table : spec.value("tables", json::array())) {
    std::string name = requireString(table, "name", "csv table");
    std::string where = fmt::format("table '{}.{}'", schema.name(), name);
    RowType rowType = parseColumns(table, where);
    auto path = resolvePath(requireString(table, "path", where), baseDir, where);
    schema.addTable(std::make_shared<CsvTable>(
        schema.name(), name, rowType, parseStatistics(table, 100.0),
        parseCollation(table, rowType, where), caps, path));
  }
  schema.addRule(adapterScanRule("csv", schema.name()));
  schema.addRule(toEnumerableRule("csv", schema.name()));
}

void loadDocSchema(AdapterSchema& schema, const json& spec,
                   const std::filesystem::path& baseDir) {
  for (const auto& table : spec.value("tables", json::array())) {
    std::string name = requireString(table, "name", "doc table");
    std::string where = fmt::format("table '{}.{}'", schema.name(), name);
    auto path = resolvePath(requireString(table, "path", where), baseDir, where);
    schema.addTable(std::make_shared<DocTable>(schema.name(), name,
                                               parseStatistics(table, 100.0), path));
  }
  schema.addRule(adapterScanRule("doc", schema.name()));
  schema.addRule(toEnumerableRule("doc", schema.name()));
}

void loadMemSchema(AdapterSchema& schema, const json& spec,
                   const std::filesystem::path&) {
  Capabilities caps = parseCapabilities(schema.options(), "projection");
  for (const auto& table : spec.value("tables", json::array())) {
    std::string name = requireString(table, "name", "mem table");
    std::string where = fmt::format("table '{}.{}'", schema.name(), name);
    RowType rowType = parseColumns(table, where);
    std::vector<Row> rows;
    for (const auto& rowSpec : table.value("rows", json::array())) {
      if (!rowSpec.is_array() || rowSpec.size() != rowType.size()) {
        raise(ErrorCode::ModelParseError,
              fmt::format("{} rows must be arrays of {} values", where,
                          rowType.size()));
      }
      Row row;
      for (size_t i = 0; i < rowType.size(); ++i) {
        row.push_back(jsonScalarToValue(rowSpec[i], rowType.field(i).type, where));
      }
      rows.push_back(std::move(row));
    }
    Statistics stats = parseStatistics(table, static_cast<double>(rows.size()));
    schema.addTable(std::make_shared<MemTable>(schema.name(), name, rowType, stats,
                                               parseCollation(table, rowType, where),
                                               caps, std::move(rows)));
  }
  schema.addRule(adapterScanRule("mem", schema.name()));
  schema.addRule(toEnumerableRule("mem", schema.name()));
}

void loadRemoteSchema(AdapterSchema& schema, const json& spec,
                      const std::filesystem::path& baseDir) {
  Capabilities caps = parseCapabilities(schema.options(), "filter,projection");
  auto backend = std::make_shared<RemoteBackend>(schema.name());
  for (const auto& table : spec.value("tables", json::array())) {
    std::string name = requireString(table, "name", "remote table");
    std::string where = fmt::format("table '{}.{}'", schema.name(), name);
    RowType rowType = parseColumns(table, where);
    auto path = resolvePath(requireString(table, "path", where), baseDir, where);
    std::vector<Row> rows = parseCsvFile(path, rowType, {});
    Statistics stats = parseStatistics(table, static_cast<double>(rows.size()));
    Collation collation = parseCollation(table, rowType, where);
    backend->addTable(name, rowType, std::move(rows), stats, collation);
    schema.addTable(std::make_shared<RemoteTable>(schema.name(), name, rowType, stats,
                                                  collation, caps, backend));
  }
  schema.addRule(adapterScanRule("remote", schema.name()));
  for (auto& rule : remotePushdownRules(schema.name(), caps)) {
    schema.addRule(std::move(rule));
  }
  schema.addRule(toEnumerableRule("remote", schema.name()));
}

}  // namespace

Catalog loadModelText(const std::string& jsonText, const std::filesystem::path& baseDir) {
  json doc = json::parse(jsonText, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    raise(ErrorCode::ModelParseError, "model is not a JSON object");
  }
  Catalog catalog;
  for (const auto& schemaSpec : doc.value("schemas", json::array())) {
    std::string name = requireString(schemaSpec, "name", "schema");
    std::string adapter = toLower(requireString(schemaSpec, "adapter", "schema"));
    auto schema = std::make_shared<AdapterSchema>(name, adapter, parseOptions(schemaSpec));
    if (adapter == "csv") {
      loadCsvSchema(*schema, schemaSpec, baseDir);
    } else if (adapter == "doc") {
      loadDocSchema(*schema, schemaSpec, baseDir);
    } else if (adapter == "mem") {
      loadMemSchema(*schema, schemaSpec, baseDir);
    } else if (adapter == "remote") {
      loadRemoteSchema(*schema, schemaSpec, baseDir);
    } else {
      raise(ErrorCode::UnknownAdapterKind,
            fmt::format("unknown adapter kind '{}'", adapter));
    }
    catalog.addSchema(std::move(schema));
  }
  if (doc.contains("defaultSchema")) {
    std::string name = doc["defaultSchema"].get<std::string>();
    if (!catalog.findSchema(name)) {
      raise(ErrorCode::ModelParseError,
            fmt::format("defaultSchema '{}' does not exist", name));
    }
    catalog.setDefaultSchema(name);
  }
  for (const auto& viewSpec : doc.value("views", json::array())) {
    catalog.addView({requireString(viewSpec, "name", "view"),
                     requireString(viewSpec, "sql", "view")});
  }
  for (const auto& matSpec : doc.value("materializations", json::array())) {
    registerMaterialization(catalog, requireString(matSpec, "sql", "materialization"),
                            requireString(matSpec, "table", "materialization"));
  }
  return catalog;
}

Catalog loadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::MissingFile, fmt::format("cannot open model '{}'", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return loadModelText(buffer.str(),
                       std::filesystem::absolute(path).parent_path());
}

}  // namespace relq
