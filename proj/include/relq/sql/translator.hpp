#pragma once

#include <optional>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/rel_node.hpp"
#include "relq/sql/ast.hpp"

namespace relq::sql {

/// Name-resolved, type-checked query. Column references are positional from
/// here on; names survive only as output labels.
struct ValidatedAst {
  /// Scans joined left-deep in FROM order (LOGICAL), or a one-row Values
  /// node for FROM-less queries.
  RelNodePtr sourcePlan;
  ExprPtr where;  // over sourcePlan
  bool hasAggregate = false;
  std::vector<int> groupKeys;      // source columns
  std::vector<AggCall> aggCalls;   // over source columns
  ExprPtr having;                  // over the aggregate output
  std::vector<ExprPtr> projections;  // over aggregate output (or source)
  std::vector<std::string> projectionNames;
  Collation orderKeys;  // over the projection output
  std::optional<int64_t> limit;
};

/// Resolves tables (views expand inline), columns and types; verifies
/// GROUP BY coverage; expands `*` and USING.
ValidatedAst validate(const SelectStmt& stmt, const Catalog& catalog);

/// Deterministic shape: Scan -> Join (left-deep) -> Filter(WHERE) ->
/// Aggregate -> Filter(HAVING) -> Project -> Sort. All nodes LOGICAL.
RelNodePtr toAlgebra(const ValidatedAst& validated);

RelNodePtr translateQuery(const SelectStmt& stmt, const Catalog& catalog);

}  // namespace relq::sql
