#include "relq/builder.hpp"

#include <fmt/format.h>

#include "relq/error.hpp"

namespace relq {

RelBuilder::RelBuilder(const Catalog& catalog) : catalog_(catalog) {}

const RelNode& RelBuilder::top() const {
  if (stack_.empty()) raise(ErrorCode::EmptyStack, "no frame on the builder stack");
  return *stack_.back();
}

RelNodePtr RelBuilder::pop() {
  if (stack_.empty()) raise(ErrorCode::EmptyStack, "no frame on the builder stack");
  RelNodePtr node = stack_.back();
  stack_.pop_back();
  return node;
}

int RelBuilder::resolveField(const RowType& row, const std::string& name) const {
  int index = row.indexOf(name);
  if (index < 0) {
    raise(ErrorCode::UnknownColumn,
          fmt::format("no field '{}' in {}", name, row.render()));
  }
  return index;
}

RelBuilder& RelBuilder::scan(const std::string& table) {
  std::string schemaName;
  std::string tableName = table;
  auto dot = table.find('.');
  if (dot != std::string::npos) {
    schemaName = table.substr(0, dot);
    tableName = table.substr(dot + 1);
  }
  TablePtr resolved = catalog_.findTable(schemaName, tableName);
  if (!resolved) {
    raise(ErrorCode::UnknownTable, fmt::format("no table '{}' in catalog", table));
  }
  stack_.push_back(makeScan(std::move(resolved)));
  return *this;
}

RelBuilder& RelBuilder::filter(ExprPtr predicate) {
  RelNodePtr input = pop();
  stack_.push_back(makeFilter(std::move(input), std::move(predicate)));
  return *this;
}

RelBuilder& RelBuilder::project(std::vector<ExprPtr> exprs, std::vector<std::string> names) {
  RelNodePtr input = pop();
  stack_.push_back(makeProject(std::move(input), std::move(exprs), std::move(names)));
  return *this;
}

RelBuilder& RelBuilder::join(JoinType type, ExprPtr condition) {
  if (stack_.size() < 2) {
    raise(ErrorCode::EmptyStack, "join requires two frames on the builder stack");
  }
  RelNodePtr right = pop();
  RelNodePtr left = pop();
  stack_.push_back(makeJoin(type, std::move(condition), std::move(left), std::move(right)));
  return *this;
}

RelBuilder& RelBuilder::aggregate(std::vector<int> groupKeys, std::vector<AggCall> calls) {
  RelNodePtr input = pop();
  stack_.push_back(makeAggregate(std::move(input), std::move(groupKeys), std::move(calls)));
  return *this;
}

RelBuilder& RelBuilder::sort(Collation keys, std::optional<int64_t> fetch,
                             std::optional<int64_t> offset) {
  RelNodePtr input = pop();
  stack_.push_back(makeSort(std::move(input), std::move(keys), fetch, offset));
  return *this;
}

RelBuilder& RelBuilder::values(RowType rowType, std::vector<Row> tuples) {
  stack_.push_back(makeValues(std::move(rowType), std::move(tuples)));
  return *this;
}

RelNodePtr RelBuilder::build() { return pop(); }

ExprPtr RelBuilder::field(const std::string& name) const {
  return ScalarExpr::columnRef(resolveField(top().rowType(), name));
}

ExprPtr RelBuilder::field(int index) const {
  const RowType& row = top().rowType();
  if (index < 0 || static_cast<size_t>(index) >= row.size()) {
    raise(ErrorCode::ColumnOutOfRange,
          fmt::format("field {} out of range in {}", index, row.render()));
  }
  return ScalarExpr::columnRef(index);
}

ExprPtr RelBuilder::field(int side, const std::string& name) const {
  if (stack_.size() < 2) {
    raise(ErrorCode::EmptyStack, "two frames are required for a join field");
  }
  const RowType& left = stack_[stack_.size() - 2]->rowType();
  const RowType& right = stack_[stack_.size() - 1]->rowType();
  if (side == 0) return ScalarExpr::columnRef(resolveField(left, name));
  if (side == 1) {
    return ScalarExpr::columnRef(static_cast<int>(left.size()) +
                                 resolveField(right, name));
  }
  raise(ErrorCode::ValidationError, "join side must be 0 or 1");
}

std::vector<int> RelBuilder::groupKey(const std::vector<std::string>& names) const {
  std::vector<int> keys;
  keys.reserve(names.size());
  for (const auto& name : names) keys.push_back(resolveField(top().rowType(), name));
  return keys;
}

AggCall RelBuilder::countStar(const std::string& name) const {
  return AggCall{AggFunc::CountStar, -1, name};
}

AggCall RelBuilder::count(const std::string& fieldName, const std::string& name) const {
  return AggCall{AggFunc::Count, resolveField(top().rowType(), fieldName), name};
}

AggCall RelBuilder::sum(const std::string& fieldName, const std::string& name) const {
  return AggCall{AggFunc::Sum, resolveField(top().rowType(), fieldName), name};
}

AggCall RelBuilder::min(const std::string& fieldName, const std::string& name) const {
  return AggCall{AggFunc::Min, resolveField(top().rowType(), fieldName), name};
}

AggCall RelBuilder::max(const std::string& fieldName, const std::string& name) const {
  return AggCall{AggFunc::Max, resolveField(top().rowType(), fieldName), name};
}

}  // namespace relq
