#include "relq/catalog.hpp"

#include <fmt/format.h>

#include "relq/error.hpp"

namespace relq {

Table::Table(std::string schemaName, std::string name, RowType rowType,
             Statistics stats, Collation collation, Capabilities caps)
    : schemaName_(std::move(schemaName)),
      name_(std::move(name)),
      rowType_(std::move(rowType)),
      stats_(std::move(stats)),
      collation_(std::move(collation)),
      caps_(caps) {
  for (const auto& key : collation_) {
    if (key.field < 0 || static_cast<size_t>(key.field) >= rowType_.size()) {
      raise(ErrorCode::ColumnOutOfRange,
            fmt::format("collation column {} out of range for table {}", key.field,
                        name_));
    }
  }
}

std::vector<Row> Table::scan(const std::vector<int>& columns) const {
  std::vector<Row> all = scanAll();
  if (columns.empty()) return all;
  std::vector<Row> out;
  out.reserve(all.size());
  for (const auto& row : all) {
    Row pruned;
    pruned.reserve(columns.size());
    for (int c : columns) pruned.push_back(row[c]);
    out.push_back(std::move(pruned));
  }
  return out;
}

AdapterSchema::AdapterSchema(std::string name, std::string adapterKind,
                             std::map<std::string, std::string> options)
    : name_(std::move(name)),
      adapterKind_(std::move(adapterKind)),
      convention_(Convention::adapter(adapterKind_, name_)),
      options_(std::move(options)) {}

void AdapterSchema::addTable(TablePtr table) {
  if (findTable(table->name())) {
    raise(ErrorCode::DuplicateTable,
          fmt::format("table '{}' already exists in schema '{}'", table->name(),
                      name_));
  }
  tables_.push_back(std::move(table));
}

TablePtr AdapterSchema::findTable(const std::string& name) const {
  std::string n = toLower(name);
  for (const auto& t : tables_) {
    if (toLower(t->name()) == n) return t;
  }
  return nullptr;
}

void Catalog::addSchema(AdapterSchemaPtr schema) {
  if (findSchema(schema->name())) {
    raise(ErrorCode::ModelParseError,
          fmt::format("schema '{}' already exists", schema->name()));
  }
  if (defaultSchema_.empty()) defaultSchema_ = schema->name();
  schemas_.push_back(std::move(schema));
}

AdapterSchemaPtr Catalog::findSchema(const std::string& name) const {
  std::string n = toLower(name);
  for (const auto& s : schemas_) {
    if (toLower(s->name()) == n) return s;
  }
  return nullptr;
}

void Catalog::addView(ViewDef view) {
  if (findView(view.name)) {
    raise(ErrorCode::ModelParseError,
          fmt::format("view '{}' already exists", view.name));
  }
  if (findSchema(view.name)) {
    raise(ErrorCode::ModelParseError,
          fmt::format("view '{}' collides with a schema name", view.name));
  }
  views_.push_back(std::move(view));
}

const ViewDef* Catalog::findView(const std::string& name) const {
  std::string n = toLower(name);
  for (const auto& v : views_) {
    if (toLower(v.name) == n) return &v;
  }
  return nullptr;
}

void Catalog::addMaterialization(MaterializationPtr mat) {
  materializations_.push_back(std::move(mat));
}

TablePtr Catalog::findTable(const std::string& schemaName,
                            const std::string& table) const {
  if (schemaName.empty()) {
    auto schema = findSchema(defaultSchema_);
    return schema ? schema->findTable(table) : nullptr;
  }
  auto schema = findSchema(schemaName);
  return schema ? schema->findTable(table) : nullptr;
}

std::vector<RulePtr> Catalog::adapterRules() const {
  std::vector<RulePtr> out;
  for (const auto& s : schemas_) {
    for (const auto& r : s->rules()) out.push_back(r);
  }
  return out;
}

}  // namespace relq
