#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/scalar_expr.hpp"
#include "relq/traits.hpp"
#include "relq/types.hpp"
#include "relq/value.hpp"

namespace relq {

enum class RelKind {
  TableScan,
  Filter,
  Project,
  Join,
  Aggregate,
  Sort,
  Values,
  Window,
  Converter,
  ViewScan,
  /// Planner-internal placeholder standing in for an equivalence group.
  GroupRef,
};

const char* relKindName(RelKind kind);

enum class JoinType { Inner, Left };
const char* joinTypeName(JoinType type);

enum class AggFunc { CountStar, Count, Sum, Min, Max };
const char* aggFuncName(AggFunc func);

struct AggCall {
  AggFunc func = AggFunc::CountStar;
  int arg = -1;  // input column; -1 for COUNT(*)
  std::string name;

  std::string render() const;  // COUNT() AS c / SUM($1) AS s
};

struct ScanAttrs {
  TablePtr table;
  /// Pruned column subset in output order; empty means all columns.
  std::vector<int> columns;
};

struct FilterAttrs {
  ExprPtr condition;
};

struct ProjectAttrs {
  std::vector<ExprPtr> exprs;
  std::vector<std::string> names;
};

struct JoinAttrs {
  JoinType type = JoinType::Inner;
  ExprPtr condition;
};

struct AggregateAttrs {
  std::vector<int> groupKeys;
  std::vector<AggCall> calls;
};

struct SortAttrs {
  Collation keys;
  std::optional<int64_t> fetch;
  std::optional<int64_t> offset;
};

struct ValuesAttrs {
  RowType rowType;
  std::vector<Row> tuples;
};

struct WindowBound {
  enum class Kind { UnboundedPreceding, Preceding, CurrentRow, Following, UnboundedFollowing };
  Kind kind = Kind::UnboundedPreceding;
  int64_t offset = 0;

  std::string render() const;
};

struct WindowAttrs {
  std::vector<int> partitionKeys;
  Collation orderKeys;
  std::vector<AggCall> calls;
  WindowBound lower;
  WindowBound upper{WindowBound::Kind::CurrentRow, 0};
};

struct ConverterAttrs {
  TraitSet target;
  Convention source;
};

struct ViewScanAttrs {
  std::string viewId;
  TablePtr backing;
};

struct GroupRefAttrs {
  int groupId = -1;
  RowType rowType;
  TraitSet traits;
};

using RelAttrs = std::variant<ScanAttrs, FilterAttrs, ProjectAttrs, JoinAttrs,
                              AggregateAttrs, SortAttrs, ValuesAttrs, WindowAttrs,
                              ConverterAttrs, ViewScanAttrs, GroupRefAttrs>;

class RelNode;
using RelNodePtr = std::shared_ptr<const RelNode>;

/// Immutable relational-operator tree node: kind, kind-specific attributes,
/// ordered inputs, a trait set, and a derived row type. Transformations
/// build new nodes; trees are freely shareable across threads.
class RelNode {
 public:
  RelKind kind() const { return kind_; }
  const TraitSet& traits() const { return traits_; }
  const std::vector<RelNodePtr>& inputs() const { return inputs_; }
  const RelNodePtr& input(size_t i) const { return inputs_[i]; }
  const RowType& rowType() const { return rowType_; }

  const ScanAttrs& scan() const { return std::get<ScanAttrs>(attrs_); }
  const FilterAttrs& filter() const { return std::get<FilterAttrs>(attrs_); }
  const ProjectAttrs& project() const { return std::get<ProjectAttrs>(attrs_); }
  const JoinAttrs& join() const { return std::get<JoinAttrs>(attrs_); }
  const AggregateAttrs& aggregate() const { return std::get<AggregateAttrs>(attrs_); }
  const SortAttrs& sort() const { return std::get<SortAttrs>(attrs_); }
  const ValuesAttrs& values() const { return std::get<ValuesAttrs>(attrs_); }
  const WindowAttrs& window() const { return std::get<WindowAttrs>(attrs_); }
  const ConverterAttrs& converter() const { return std::get<ConverterAttrs>(attrs_); }
  const ViewScanAttrs& viewScan() const { return std::get<ViewScanAttrs>(attrs_); }
  const GroupRefAttrs& groupRef() const { return std::get<GroupRefAttrs>(attrs_); }
  const RelAttrs& attrs() const { return attrs_; }

  /// Canonical identity string over (kind, canonicalized attrs, traits,
  /// input digests). Two nodes with equal digests are the same expression
  /// to the planner.
  std::string digest() const;
  /// Digest with input identities supplied by the resolver (the memo passes
  /// group ids).
  std::string digest(const std::function<std::string(const RelNode&)>& inputResolver) const;

  /// One line: Kind[attr=..., traits=CONV.[collation]]
  std::string renderLine() const;
  /// Whole tree, one node per line, two-space indent per depth.
  std::string renderTree() const;

  RelNodePtr withInputs(std::vector<RelNodePtr> inputs) const;
  RelNodePtr withTraits(TraitSet traits) const;

  friend RelNodePtr makeOperator(RelKind, RelAttrs, std::vector<RelNodePtr>,
                                 std::optional<TraitSet>);

 private:
  RelNode() = default;

  RelKind kind_ = RelKind::Values;
  RelAttrs attrs_;
  std::vector<RelNodePtr> inputs_;
  TraitSet traits_;
  RowType rowType_;
};

/// Validates arity and attributes eagerly and derives the row type.
/// When traits are omitted the node is LOGICAL with a collation derived
/// from its inputs (scans inherit the table's declared collation, filters
/// and projections preserve it, sorts provide their keys).
RelNodePtr makeOperator(RelKind kind, RelAttrs attrs, std::vector<RelNodePtr> inputs,
                        std::optional<TraitSet> traits = std::nullopt);

RelNodePtr makeScan(TablePtr table, std::vector<int> columns = {},
                    std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeFilter(RelNodePtr input, ExprPtr condition,
                      std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeProject(RelNodePtr input, std::vector<ExprPtr> exprs,
                       std::vector<std::string> names = {},
                       std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeJoin(JoinType type, ExprPtr condition, RelNodePtr left,
                    RelNodePtr right, std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeAggregate(RelNodePtr input, std::vector<int> groupKeys,
                         std::vector<AggCall> calls,
                         std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeSort(RelNodePtr input, Collation keys,
                    std::optional<int64_t> fetch = std::nullopt,
                    std::optional<int64_t> offset = std::nullopt,
                    std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeValues(RowType rowType, std::vector<Row> tuples,
                      std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeWindow(RelNodePtr input, WindowAttrs attrs,
                      std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeConverter(RelNodePtr input, TraitSet target);
RelNodePtr makeViewScan(std::string viewId, TablePtr backing,
                        std::optional<TraitSet> traits = std::nullopt);
RelNodePtr makeGroupRef(int groupId, RowType rowType, TraitSet traits);

/// Row-type derivation; pure, already cached on every node.
RowType deriveRowType(RelKind kind, const RelAttrs& attrs,
                      const std::vector<RelNodePtr>& inputs);

/// Remaps a collation through projection expressions: input keys map to the
/// first output column that references them; stops at the first unmapped key.
Collation remapCollationThroughProject(const Collation& input,
                                       const std::vector<ExprPtr>& exprs);

}  // namespace relq
