#pragma once

#include <filesystem>
#include <mutex>
#include <vector>

#include "relq/catalog.hpp"

namespace relq {

/// CSV-file table. Header row must match the declared field names; values
/// parse per the declared field type; unquoted empty fields are NULL.
class CsvTable : public Table {
 public:
  CsvTable(std::string schemaName, std::string name, RowType rowType, Statistics stats,
           Collation collation, Capabilities caps, std::filesystem::path path);

  std::vector<Row> scanAll() const override;
  /// Prunes while parsing and records the requested column set.
  std::vector<Row> scan(const std::vector<int>& columns) const override;

  const std::filesystem::path& path() const { return path_; }
  /// Column lists of past scans, for pushdown observability in tests.
  std::vector<std::vector<int>> scanRequests() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  mutable std::vector<std::vector<int>> scanRequests_;
};

/// Shared CSV machinery: minimal RFC-style double-quote escaping.
std::vector<Row> parseCsvFile(const std::filesystem::path& path, const RowType& rowType,
                              const std::vector<int>& columns);
std::string csvEscapeField(const std::string& field);
std::string renderCsv(const RowType& rowType, const std::vector<Row>& rows);

}  // namespace relq
