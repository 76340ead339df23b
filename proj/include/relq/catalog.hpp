#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "relq/traits.hpp"
#include "relq/types.hpp"
#include "relq/value.hpp"

namespace relq {

class Rule;
using RulePtr = std::shared_ptr<const Rule>;
class Materialization;
using MaterializationPtr = std::shared_ptr<const Materialization>;

struct Statistics {
  double rowCount = 100.0;
  /// Per-field average sizes in abstract units; empty means 16 per field.
  std::vector<double> fieldSizes;

  double fieldSize(size_t index) const {
    return index < fieldSizes.size() ? fieldSizes[index] : 16.0;
  }
  double avgRowSize(size_t fieldCount) const {
    double total = 0;
    for (size_t i = 0; i < fieldCount; ++i) total += fieldSize(i);
    return total;
  }
};

/// What the owning backend can execute on the planner's behalf.
struct Capabilities {
  bool projection = false;
  bool filter = false;
  bool sort = false;
  bool aggregate = false;
  bool joinWithinBackend = false;
};

/// A named data source inside an adapter schema. Concrete adapters subclass
/// this with their access path; the declared collation, if any, must hold
/// for every scan the adapter produces.
class Table {
 public:
  Table(std::string schemaName, std::string name, RowType rowType, Statistics stats,
        Collation collation, Capabilities caps);
  virtual ~Table() = default;

  const std::string& schemaName() const { return schemaName_; }
  const std::string& name() const { return name_; }
  std::string qualifiedName() const { return schemaName_ + "." + name_; }
  const RowType& rowType() const { return rowType_; }
  const Statistics& statistics() const { return stats_; }
  const Collation& collation() const { return collation_; }
  const Capabilities& capabilities() const { return caps_; }

  /// Full scan in the source's order.
  virtual std::vector<Row> scanAll() const = 0;
  /// Scan with column pruning; the default slices a full scan.
  virtual std::vector<Row> scan(const std::vector<int>& columns) const;

 private:
  std::string schemaName_;
  std::string name_;
  RowType rowType_;
  Statistics stats_;
  Collation collation_;
  Capabilities caps_;
};

using TablePtr = std::shared_ptr<const Table>;

/// One adapter-backed namespace: its calling convention, tables, and the
/// planner rules it contributes.
class AdapterSchema {
 public:
  AdapterSchema(std::string name, std::string adapterKind,
                std::map<std::string, std::string> options);

  const std::string& name() const { return name_; }
  const std::string& adapterKind() const { return adapterKind_; }
  const Convention& convention() const { return convention_; }
  const std::map<std::string, std::string>& options() const { return options_; }

  void addTable(TablePtr table);
  TablePtr findTable(const std::string& name) const;
  const std::vector<TablePtr>& tables() const { return tables_; }

  void addRule(RulePtr rule) { rules_.push_back(std::move(rule)); }
  const std::vector<RulePtr>& rules() const { return rules_; }

 private:
  std::string name_;
  std::string adapterKind_;
  Convention convention_;
  std::map<std::string, std::string> options_;
  std::vector<TablePtr> tables_;  // insertion order for determinism
  std::vector<RulePtr> rules_;
};

using AdapterSchemaPtr = std::shared_ptr<AdapterSchema>;

struct ViewDef {
  std::string name;
  std::string sql;
};

/// Named data sources resolved during validation. Immutable once loaded;
/// shareable across concurrent sessions.
class Catalog {
 public:
  Catalog() = default;

  void addSchema(AdapterSchemaPtr schema);
  AdapterSchemaPtr findSchema(const std::string& name) const;
  const std::vector<AdapterSchemaPtr>& schemas() const { return schemas_; }

  void setDefaultSchema(std::string name) { defaultSchema_ = std::move(name); }
  const std::string& defaultSchema() const { return defaultSchema_; }

  void addView(ViewDef view);
  const ViewDef* findView(const std::string& name) const;
  const std::vector<ViewDef>& views() const { return views_; }

  void addMaterialization(MaterializationPtr mat);
  const std::vector<MaterializationPtr>& materializations() const {
    return materializations_;
  }

  /// Resolves "table" against the default schema or "schema.table".
  TablePtr findTable(const std::string& schemaName, const std::string& table) const;

  /// All adapter-contributed rules, in schema registration order.
  std::vector<RulePtr> adapterRules() const;

 private:
  std::vector<AdapterSchemaPtr> schemas_;
  std::string defaultSchema_;
  std::vector<ViewDef> views_;
  std::vector<MaterializationPtr> materializations_;
};

}  // namespace relq
