#pragma once

#include <filesystem>
#include <vector>

#include "relq/catalog.hpp"

namespace relq {

/// Row type of every document table: a single `_MAP: MAP<ANY>` column.
RowType docTableRowType();

/// Document-file table: one JSON object per line, exposed as single-column
/// `_MAP` rows whose nested values are accessed with the [] operator.
class DocTable : public Table {
 public:
  DocTable(std::string schemaName, std::string name, Statistics stats,
           std::filesystem::path path);

  std::vector<Row> scanAll() const override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace relq
