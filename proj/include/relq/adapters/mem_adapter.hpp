#pragma once

#include <memory>
#include <vector>

#include "relq/catalog.hpp"

namespace relq {

/// In-memory table; also the backing store of the mock remote backend.
/// Rows are mutable through setRows so tests can exercise materialized-view
/// staleness; the catalog itself only hands out const access.
class MemTable : public Table {
 public:
  MemTable(std::string schemaName, std::string name, RowType rowType, Statistics stats,
           Collation collation, Capabilities caps, std::vector<Row> rows)
      : Table(std::move(schemaName), std::move(name), std::move(rowType),
              std::move(stats), std::move(collation), caps),
        rows_(std::move(rows)) {}

  std::vector<Row> scanAll() const override { return rows_; }

  void setRows(std::vector<Row> rows) { rows_ = std::move(rows); }

 private:
  std::vector<Row> rows_;
};

}  // namespace relq
