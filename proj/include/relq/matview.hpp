#pragma once

#include <memory>
#include <string>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/rel_node.hpp"

namespace relq {

/// A registered materialized view: the expanded definition plan and the
/// table holding its precomputed rows. The backing table's row type equals
/// the view plan's.
class Materialization {
 public:
  Materialization(std::string id, std::string sql, RelNodePtr viewPlan, TablePtr backing)
      : id_(std::move(id)),
        sql_(std::move(sql)),
        viewPlan_(std::move(viewPlan)),
        backing_(std::move(backing)) {}

  const std::string& id() const { return id_; }
  const std::string& sql() const { return sql_; }
  const RelNodePtr& viewPlan() const { return viewPlan_; }
  const TablePtr& backingTable() const { return backing_; }
  bool enabled() const { return enabled_; }
  void setEnabled(bool enabled) { enabled_ = enabled; }

 private:
  std::string id_;
  std::string sql_;
  RelNodePtr viewPlan_;
  TablePtr backing_;
  bool enabled_ = true;
};

/// Validates the view SQL, expands it to a LOGICAL plan, checks the backing
/// table's row type, and registers the materialization with the catalog.
/// Registering the same (sql, table) pair twice is idempotent.
MaterializationPtr registerMaterialization(Catalog& catalog, const std::string& viewSql,
                                           const std::string& backingTable);

/// Bottom-up view substitution: returns rewritten alternatives of queryPlan
/// where subtrees unify with a materialization. Cases: exact digest match;
/// the match below the query's own Filter/Project ancestors; and a Filter
/// whose conjuncts strictly imply the view's (conjunct-subset), leaving a
/// residual predicate. The caller registers the alternatives with the
/// planner; the cost model decides.
std::vector<RelNodePtr> substitute(const RelNodePtr& queryPlan,
                                   const std::vector<MaterializationPtr>& materializations);

}  // namespace relq
