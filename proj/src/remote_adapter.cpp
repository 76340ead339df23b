#include "relq/adapters/remote_adapter.hpp"

#include <fmt/format.h>

#include "relq/adapters/mem_adapter.hpp"
#include "relq/adapters/sql_gen.hpp"
#include "relq/error.hpp"
#include "relq/exec.hpp"
#include "relq/sql/parser.hpp"
#include "relq/sql/translator.hpp"

namespace relq {

RemoteBackend::RemoteBackend(std::string name) : name_(std::move(name)) {
  auto schema = std::make_shared<AdapterSchema>(name_, "mem",
                                                std::map<std::string, std::string>{});
  internal_.addSchema(std::move(schema));
  internal_.setDefaultSchema(name_);
}

void RemoteBackend::addTable(const std::string& name, RowType rowType,
                             std::vector<Row> rows, Statistics stats,
                             Collation collation) {
  auto schema = internal_.findSchema(name_);
  schema->addTable(std::make_shared<MemTable>(name_, name, std::move(rowType),
                                              std::move(stats), std::move(collation),
                                              Capabilities{}, std::move(rows)));
}

std::vector<Row> RemoteBackend::executeSql(const std::string& sql) {
  std::lock_guard<std::mutex> lock(mutex_);
  log_.push_back(sql);
  sql::Statement stmt = sql::parseStatement(sql);
  RelNodePtr plan = sql::translateQuery(*stmt.query, internal_);
  return naiveExecute(plan);
}

std::vector<std::string> RemoteBackend::statementLog() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

void RemoteBackend::clearLog() {
  std::lock_guard<std::mutex> lock(mutex_);
  log_.clear();
}

RemoteTable::RemoteTable(std::string schemaName, std::string name, RowType rowType,
                         Statistics stats, Collation collation, Capabilities caps,
                         RemoteBackendPtr backend)
    : Table(std::move(schemaName), std::move(name), std::move(rowType),
            std::move(stats), std::move(collation), caps),
      backend_(std::move(backend)) {}

std::vector<Row> RemoteTable::scanAll() const {
  return backend_->executeSql(fmt::format("SELECT * FROM \"{}\"", name()));
}

std::vector<Row> RemoteTable::scan(const std::vector<int>& columns) const {
  if (columns.empty()) return scanAll();
  std::vector<std::string> parts;
  parts.reserve(columns.size());
  for (int c : columns) {
    parts.push_back(fmt::format("\"{}\"", rowType().field(c).name));
  }
  return backend_->executeSql(
      fmt::format("SELECT {} FROM \"{}\"", fmt::join(parts, ", "), name()));
}

}  // namespace relq
