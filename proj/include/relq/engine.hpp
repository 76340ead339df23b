#pragma once

#include <set>
#include <string>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/planner.hpp"
#include "relq/rel_node.hpp"

namespace relq {

enum class OutputFormat { Table, Csv, Docs };

struct QueryOptions {
  enum class Planner { Cost, Exhaustive };
  Planner planner = Planner::Cost;
  std::vector<std::string> disabledRules;
  bool trace = false;
  bool noMaterializations = false;
  PlannerConfig plannerConfig;  // mode/delta/patience/maxIterations/weights
};

struct QueryResult {
  bool wasExplain = false;
  RowType rowType;
  std::vector<Row> rows;
  std::string planText;  // physical plan rendering (EXPLAIN surface)
  std::string planDigest;
  std::vector<std::string> trace;
};

/// End-to-end query session over an immutable catalog: parse, validate,
/// translate, optimize, and execute (or explain).
class Engine {
 public:
  explicit Engine(Catalog catalog) : catalog_(std::move(catalog)) {}

  const Catalog& catalog() const { return catalog_; }
  Catalog& mutableCatalog() { return catalog_; }

  RelNodePtr logicalPlan(const std::string& sql) const;
  RelNodePtr physicalPlan(const std::string& sql, const QueryOptions& options = {}) const;
  QueryResult run(const std::string& sql, const QueryOptions& options = {}) const;

 private:
  Catalog catalog_;
};

std::string formatRows(const RowType& rowType, const std::vector<Row>& rows,
                       OutputFormat format);

}  // namespace relq
