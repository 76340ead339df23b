#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/rel_node.hpp"

namespace relq {

/// Stack-based relational expression builder: scan pushes a frame, unary
/// steps replace the top, join pops two. Field references resolve by name
/// against the frame being built. A builder is a single-threaded session
/// over an immutable catalog.
///
///   auto rel = RelBuilder(catalog)
///                  .scan("employee_data")
///                  .aggregate(b.groupKey({"deptno"}),
///                             {b.countStar("c"), b.sum("sal", "s")})
///                  .build();
class RelBuilder {
 public:
  explicit RelBuilder(const Catalog& catalog);

  RelBuilder& scan(const std::string& table);  // "t" or "schema.t"
  RelBuilder& filter(ExprPtr predicate);
  RelBuilder& project(std::vector<ExprPtr> exprs, std::vector<std::string> names = {});
  RelBuilder& join(JoinType type, ExprPtr condition);
  RelBuilder& aggregate(std::vector<int> groupKeys, std::vector<AggCall> calls);
  RelBuilder& sort(Collation keys, std::optional<int64_t> fetch = std::nullopt,
                   std::optional<int64_t> offset = std::nullopt);
  RelBuilder& values(RowType rowType, std::vector<Row> tuples);

  /// Pops and returns the finished tree; EmptyStack when nothing was built.
  RelNodePtr build();

  /// Column reference into the top frame by name or index.
  ExprPtr field(const std::string& name) const;
  ExprPtr field(int index) const;
  /// Reference spanning the two frames a join is about to combine:
  /// side 0 = left (pushed first), side 1 = right; indexes are combined.
  ExprPtr field(int side, const std::string& name) const;

  std::vector<int> groupKey(const std::vector<std::string>& names) const;
  AggCall countStar(const std::string& name) const;
  AggCall count(const std::string& fieldName, const std::string& name) const;
  AggCall sum(const std::string& fieldName, const std::string& name) const;
  AggCall min(const std::string& fieldName, const std::string& name) const;
  AggCall max(const std::string& fieldName, const std::string& name) const;

  size_t frameCount() const { return stack_.size(); }

 private:
  const RelNode& top() const;
  RelNodePtr pop();
  int resolveField(const RowType& row, const std::string& name) const;

  const Catalog& catalog_;
  std::vector<RelNodePtr> stack_;
};

}  // namespace relq
