#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "relq/catalog.hpp"

namespace relq {

/// In-process stand-in for an external SQL engine. Holds its own tables and
/// executes exactly the SQL dialect this framework generates, by parsing
/// with the framework's own frontend and running the naive interpreter over
/// an internal catalog. Every statement it executes is logged; the engine
/// never touches the stored rows directly.
class RemoteBackend {
 public:
  explicit RemoteBackend(std::string name);

  void addTable(const std::string& name, RowType rowType, std::vector<Row> rows,
                Statistics stats, Collation collation);

  std::vector<Row> executeSql(const std::string& sql);

  std::vector<std::string> statementLog() const;
  void clearLog();

  const std::string& name() const { return name_; }
  const Catalog& internalCatalog() const { return internal_; }

 private:
  std::string name_;
  Catalog internal_;
  std::vector<std::string> log_;
  mutable std::mutex mutex_;
};

using RemoteBackendPtr = std::shared_ptr<RemoteBackend>;

/// Engine-side handle to a backend table. All row access goes through
/// generated SQL statements, keeping the federation boundary observable.
class RemoteTable : public Table {
 public:
  RemoteTable(std::string schemaName, std::string name, RowType rowType,
              Statistics stats, Collation collation, Capabilities caps,
              RemoteBackendPtr backend);

  std::vector<Row> scanAll() const override;
  std::vector<Row> scan(const std::vector<int>& columns) const override;

  const RemoteBackendPtr& backend() const { return backend_; }

 private:
  RemoteBackendPtr backend_;
};

}  // namespace relq
