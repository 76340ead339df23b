#include "relq/rel_node.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "relq/error.hpp"

namespace relq {

const char* relKindName(RelKind kind) {
  switch (kind) {
    case RelKind::TableScan: return "TableScan";
    case RelKind::Filter: return "Filter";
    case RelKind::Project: return "Project";
    case RelKind::Join: return "Join";
    case RelKind::Aggregate: return "Aggregate";
    case RelKind::Sort: return "Sort";
    case RelKind::Values: return "Values";
    case RelKind::Window: return "Window";
    case RelKind::Converter: return "Converter";
    case RelKind::ViewScan: return "ViewScan";
    case RelKind::GroupRef: return "GroupRef";
  }
  return "?";
}

const char* joinTypeName(JoinType type) {
  return type == JoinType::Inner ? "INNER" : "LEFT";
}

const char* aggFuncName(AggFunc func) {
  switch (func) {
    case AggFunc::CountStar: return "COUNT";
    case AggFunc::Count: return "COUNT";
    case AggFunc::Sum: return "SUM";
    case AggFunc::Min: return "MIN";
    case AggFunc::Max: return "MAX";
  }
  return "?";
}

std::string AggCall::render() const {
  std::string argText = func == AggFunc::CountStar ? "" : fmt::format("${}", arg);
  return fmt::format("{}({}) AS {}", aggFuncName(func), argText, name);
}

std::string WindowBound::render() const {
  switch (kind) {
    case Kind::UnboundedPreceding: return "UNBOUNDED PRECEDING";
    case Kind::Preceding: return fmt::format("{} PRECEDING", offset);
    case Kind::CurrentRow: return "CURRENT ROW";
    case Kind::Following: return fmt::format("{} FOLLOWING", offset);
    case Kind::UnboundedFollowing: return "UNBOUNDED FOLLOWING";
  }
  return "?";
}

namespace {

size_t expectedInputs(RelKind kind) {
  switch (kind) {
    case RelKind::TableScan:
    case RelKind::Values:
    case RelKind::ViewScan:
    case RelKind::GroupRef:
      return 0;
    case RelKind::Join:
      return 2;
    default:
      return 1;
  }
}

void checkColumn(int index, const RowType& row, const char* what) {
  if (index < 0 || static_cast<size_t>(index) >= row.size()) {
    raise(ErrorCode::ColumnOutOfRange,
          fmt::format("{} column {} out of range (row has {} fields)", what, index,
                      row.size()));
  }
}

ScalarType checkAggCall(const AggCall& call, const RowType& input) {
  switch (call.func) {
    case AggFunc::CountStar:
      return ScalarType::int64(false);
    case AggFunc::Count:
      checkColumn(call.arg, input, "aggregate");
      return ScalarType::int64(false);
    case AggFunc::Sum: {
      checkColumn(call.arg, input, "aggregate");
      const auto& t = input.field(call.arg).type;
      if (!t.isNumeric() && !t.isAny()) {
        raise(ErrorCode::TypeMismatch,
              fmt::format("SUM requires a numeric argument, got {}", t.render()));
      }
      return t.withNullable(true);
    }
    case AggFunc::Min:
    case AggFunc::Max: {
      checkColumn(call.arg, input, "aggregate");
      return input.field(call.arg).type.withNullable(true);
    }
  }
  return ScalarType::any();
}

void validateAttrs(RelKind kind, const RelAttrs& attrs,
                   const std::vector<RelNodePtr>& inputs) {
  switch (kind) {
    case RelKind::TableScan: {
      const auto& a = std::get<ScanAttrs>(attrs);
      if (!a.table) raise(ErrorCode::ValidationError, "scan requires a table");
      for (int c : a.columns) checkColumn(c, a.table->rowType(), "scan");
      break;
    }
    case RelKind::Filter: {
      const auto& a = std::get<FilterAttrs>(attrs);
      if (!a.condition) raise(ErrorCode::ValidationError, "filter requires a predicate");
      ScalarType t = a.condition->deriveType(inputs[0]->rowType());
      if (t.kind() != ScalarType::Kind::Boolean && !t.isAny()) {
        raise(ErrorCode::TypeMismatch,
              fmt::format("filter predicate must be BOOLEAN, got {}", t.render()));
      }
      break;
    }
    case RelKind::Project: {
      const auto& a = std::get<ProjectAttrs>(attrs);
      if (a.exprs.empty()) raise(ErrorCode::ValidationError, "empty projection");
      if (!a.names.empty() && a.names.size() != a.exprs.size()) {
        raise(ErrorCode::ValidationError, "projection name count mismatch");
      }
      for (const auto& e : a.exprs) e->deriveType(inputs[0]->rowType());
      break;
    }
    case RelKind::Join: {
      const auto& a = std::get<JoinAttrs>(attrs);
      if (!a.condition) raise(ErrorCode::ValidationError, "join requires a condition");
      RowType combined =
          concatRowTypes(inputs[0]->rowType(), inputs[1]->rowType(), false);
      ScalarType t = a.condition->deriveType(combined);
      if (t.kind() != ScalarType::Kind::Boolean && !t.isAny()) {
        raise(ErrorCode::TypeMismatch,
              fmt::format("join condition must be BOOLEAN, got {}", t.render()));
      }
      break;
    }
    case RelKind::Aggregate: {
      const auto& a = std::get<AggregateAttrs>(attrs);
      for (int k : a.groupKeys) checkColumn(k, inputs[0]->rowType(), "group");
      for (const auto& call : a.calls) checkAggCall(call, inputs[0]->rowType());
      break;
    }
    case RelKind::Sort: {
      const auto& a = std::get<SortAttrs>(attrs);
      for (const auto& key : a.keys) checkColumn(key.field, inputs[0]->rowType(), "sort");
      if ((a.fetch && *a.fetch < 0) || (a.offset && *a.offset < 0)) {
        raise(ErrorCode::ValidationError, "negative fetch/offset");
      }
      break;
    }
    case RelKind::Values: {
      const auto& a = std::get<ValuesAttrs>(attrs);
      for (const auto& row : a.tuples) {
        if (row.size() != a.rowType.size()) {
          raise(ErrorCode::ArityError,
                fmt::format("values tuple has {} fields, row type has {}", row.size(),
                            a.rowType.size()));
        }
        for (size_t i = 0; i < row.size(); ++i) {
          if (row[i].isNull()) {
            if (!a.rowType.field(i).type.nullable()) {
              raise(ErrorCode::TypeMismatch,
                    fmt::format("NULL in non-nullable values field '{}'",
                                a.rowType.field(i).name));
            }
          }
        }
      }
      break;
    }
    case RelKind::Window: {
      const auto& a = std::get<WindowAttrs>(attrs);
      for (int k : a.partitionKeys) checkColumn(k, inputs[0]->rowType(), "partition");
      for (const auto& key : a.orderKeys) {
        checkColumn(key.field, inputs[0]->rowType(), "window order");
      }
      for (const auto& call : a.calls) checkAggCall(call, inputs[0]->rowType());
      break;
    }
    case RelKind::Converter:
      break;
    case RelKind::ViewScan: {
      const auto& a = std::get<ViewScanAttrs>(attrs);
      if (!a.backing) raise(ErrorCode::ValidationError, "view scan requires a table");
      break;
    }
    case RelKind::GroupRef:
      break;
  }
}

bool attrsMatchKind(RelKind kind, const RelAttrs& attrs) {
  switch (kind) {
    case RelKind::TableScan: return std::holds_alternative<ScanAttrs>(attrs);
    case RelKind::Filter: return std::holds_alternative<FilterAttrs>(attrs);
    case RelKind::Project: return std::holds_alternative<ProjectAttrs>(attrs);
    case RelKind::Join: return std::holds_alternative<JoinAttrs>(attrs);
    case RelKind::Aggregate: return std::holds_alternative<AggregateAttrs>(attrs);
    case RelKind::Sort: return std::holds_alternative<SortAttrs>(attrs);
    case RelKind::Values: return std::holds_alternative<ValuesAttrs>(attrs);
    case RelKind::Window: return std::holds_alternative<WindowAttrs>(attrs);
    case RelKind::Converter: return std::holds_alternative<ConverterAttrs>(attrs);
    case RelKind::ViewScan: return std::holds_alternative<ViewScanAttrs>(attrs);
    case RelKind::GroupRef: return std::holds_alternative<GroupRefAttrs>(attrs);
  }
  return false;
}

Collation deriveCollation(RelKind kind, const RelAttrs& attrs,
                          const std::vector<RelNodePtr>& inputs) {
  switch (kind) {
    case RelKind::TableScan: {
      const auto& a = std::get<ScanAttrs>(attrs);
      const Collation& declared = a.table->collation();
      if (a.columns.empty()) return declared;
      Collation out;
      for (const auto& key : declared) {
        auto it = std::find(a.columns.begin(), a.columns.end(), key.field);
        if (it == a.columns.end()) break;
        out.push_back({static_cast<int>(it - a.columns.begin()), key.direction});
      }
      return out;
    }
    case RelKind::Filter:
      return inputs[0]->traits().collation;
    case RelKind::Project:
      return remapCollationThroughProject(inputs[0]->traits().collation,
                                          std::get<ProjectAttrs>(attrs).exprs);
    case RelKind::Sort: {
      const auto& a = std::get<SortAttrs>(attrs);
      return a.keys.empty() ? inputs[0]->traits().collation : a.keys;
    }
    case RelKind::ViewScan:
      return std::get<ViewScanAttrs>(attrs).backing->collation();
    default:
      return {};
  }
}

}  // namespace

Collation remapCollationThroughProject(const Collation& input,
                                       const std::vector<ExprPtr>& exprs) {
  Collation out;
  for (const auto& key : input) {
    int mapped = -1;
    for (size_t j = 0; j < exprs.size(); ++j) {
      if (exprs[j]->variant() == ScalarExpr::Variant::ColumnRef &&
          exprs[j]->index() == key.field) {
        mapped = static_cast<int>(j);
        break;
      }
    }
    if (mapped < 0) break;  // collation is prefix-based
    out.push_back({mapped, key.direction});
  }
  return out;
}

RowType deriveRowType(RelKind kind, const RelAttrs& attrs,
                      const std::vector<RelNodePtr>& inputs) {
  switch (kind) {
    case RelKind::TableScan: {
      const auto& a = std::get<ScanAttrs>(attrs);
      if (a.columns.empty()) return a.table->rowType();
      std::vector<RowField> fields;
      for (int c : a.columns) fields.push_back(a.table->rowType().field(c));
      return RowType(std::move(fields));
    }
    case RelKind::Filter:
      return inputs[0]->rowType();
    case RelKind::Project: {
      const auto& a = std::get<ProjectAttrs>(attrs);
      std::vector<RowField> fields;
      for (size_t i = 0; i < a.exprs.size(); ++i) {
        std::string name = i < a.names.size() && !a.names[i].empty()
                               ? a.names[i]
                               : fmt::format("EXPR{}", i);
        fields.push_back({name, a.exprs[i]->deriveType(inputs[0]->rowType())});
      }
      return RowType(std::move(fields));
    }
    case RelKind::Join: {
      const auto& a = std::get<JoinAttrs>(attrs);
      return concatRowTypes(inputs[0]->rowType(), inputs[1]->rowType(),
                            a.type == JoinType::Left);
    }
    case RelKind::Aggregate: {
      const auto& a = std::get<AggregateAttrs>(attrs);
      const RowType& in = inputs[0]->rowType();
      std::vector<std::string> names;
      std::vector<ScalarType> typeList;
      for (int k : a.groupKeys) {
        names.push_back(in.field(k).name);
        typeList.push_back(in.field(k).type);
      }
      for (const auto& call : a.calls) {
        names.push_back(call.name);
        typeList.push_back(checkAggCall(call, in));
      }
      names = uniquifyNames(names);
      std::vector<RowField> fields;
      for (size_t i = 0; i < names.size(); ++i) fields.push_back({names[i], typeList[i]});
      return RowType(std::move(fields));
    }
    case RelKind::Sort:
      return inputs[0]->rowType();
    case RelKind::Values:
      return std::get<ValuesAttrs>(attrs).rowType;
    case RelKind::Window: {
      const auto& a = std::get<WindowAttrs>(attrs);
      const RowType& in = inputs[0]->rowType();
      std::vector<std::string> names;
      std::vector<ScalarType> typeList;
      for (const auto& f : in.fields()) {
        names.push_back(f.name);
        typeList.push_back(f.type);
      }
      for (const auto& call : a.calls) {
        names.push_back(call.name);
        typeList.push_back(checkAggCall(call, in).withNullable(true));
      }
      names = uniquifyNames(names);
      std::vector<RowField> fields;
      for (size_t i = 0; i < names.size(); ++i) fields.push_back({names[i], typeList[i]});
      return RowType(std::move(fields));
    }
    case RelKind::Converter:
      return inputs[0]->rowType();
    case RelKind::ViewScan:
      return std::get<ViewScanAttrs>(attrs).backing->rowType();
    case RelKind::GroupRef:
      return std::get<GroupRefAttrs>(attrs).rowType;
  }
  return RowType();
}

RelNodePtr makeOperator(RelKind kind, RelAttrs attrs, std::vector<RelNodePtr> inputs,
                        std::optional<TraitSet> traits) {
  if (!attrsMatchKind(kind, attrs)) {
    raise(ErrorCode::ValidationError,
          fmt::format("attributes do not match operator kind {}", relKindName(kind)));
  }
  if (inputs.size() != expectedInputs(kind)) {
    raise(ErrorCode::ArityError,
          fmt::format("{} expects {} input(s), got {}", relKindName(kind),
                      expectedInputs(kind), inputs.size()));
  }
  for (const auto& in : inputs) {
    if (!in) raise(ErrorCode::ValidationError, "null input node");
  }
  validateAttrs(kind, attrs, inputs);

  auto node = std::shared_ptr<RelNode>(new RelNode());
  node->kind_ = kind;
  node->attrs_ = std::move(attrs);
  node->inputs_ = std::move(inputs);
  if (traits) {
    node->traits_ = std::move(*traits);
  } else if (kind == RelKind::Converter) {
    node->traits_ = std::get<ConverterAttrs>(node->attrs_).target;
  } else if (kind == RelKind::GroupRef) {
    node->traits_ = std::get<GroupRefAttrs>(node->attrs_).traits;
  } else {
    node->traits_ = TraitSet{Convention::logical(),
                             deriveCollation(kind, node->attrs_, node->inputs_)};
  }
  node->rowType_ = deriveRowType(kind, node->attrs_, node->inputs_);
  return node;
}

RelNodePtr makeScan(TablePtr table, std::vector<int> columns,
                    std::optional<TraitSet> traits) {
  return makeOperator(RelKind::TableScan, ScanAttrs{std::move(table), std::move(columns)},
                      {}, std::move(traits));
}

RelNodePtr makeFilter(RelNodePtr input, ExprPtr condition,
                      std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Filter, FilterAttrs{std::move(condition)},
                      {std::move(input)}, std::move(traits));
}

RelNodePtr makeProject(RelNodePtr input, std::vector<ExprPtr> exprs,
                       std::vector<std::string> names, std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Project, ProjectAttrs{std::move(exprs), std::move(names)},
                      {std::move(input)}, std::move(traits));
}

RelNodePtr makeJoin(JoinType type, ExprPtr condition, RelNodePtr left, RelNodePtr right,
                    std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Join, JoinAttrs{type, std::move(condition)},
                      {std::move(left), std::move(right)}, std::move(traits));
}

RelNodePtr makeAggregate(RelNodePtr input, std::vector<int> groupKeys,
                         std::vector<AggCall> calls, std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Aggregate,
                      AggregateAttrs{std::move(groupKeys), std::move(calls)},
                      {std::move(input)}, std::move(traits));
}

RelNodePtr makeSort(RelNodePtr input, Collation keys, std::optional<int64_t> fetch,
                    std::optional<int64_t> offset, std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Sort, SortAttrs{std::move(keys), fetch, offset},
                      {std::move(input)}, std::move(traits));
}

RelNodePtr makeValues(RowType rowType, std::vector<Row> tuples,
                      std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Values, ValuesAttrs{std::move(rowType), std::move(tuples)},
                      {}, std::move(traits));
}

RelNodePtr makeWindow(RelNodePtr input, WindowAttrs attrs, std::optional<TraitSet> traits) {
  return makeOperator(RelKind::Window, std::move(attrs), {std::move(input)},
                      std::move(traits));
}

RelNodePtr makeConverter(RelNodePtr input, TraitSet target) {
  Convention source = input->traits().convention;
  return makeOperator(RelKind::Converter, ConverterAttrs{std::move(target), source},
                      {std::move(input)});
}

RelNodePtr makeViewScan(std::string viewId, TablePtr backing,
                        std::optional<TraitSet> traits) {
  return makeOperator(RelKind::ViewScan, ViewScanAttrs{std::move(viewId), std::move(backing)},
                      {}, std::move(traits));
}

RelNodePtr makeGroupRef(int groupId, RowType rowType, TraitSet traits) {
  return makeOperator(RelKind::GroupRef,
                      GroupRefAttrs{groupId, std::move(rowType), std::move(traits)}, {});
}

RelNodePtr RelNode::withInputs(std::vector<RelNodePtr> inputs) const {
  return makeOperator(kind_, attrs_, std::move(inputs), traits_);
}

RelNodePtr RelNode::withTraits(TraitSet traits) const {
  return makeOperator(kind_, attrs_, inputs_, std::move(traits));
}

namespace {

std::string renderTuples(const std::vector<Row>& tuples) {
  std::string out = "[";
  for (size_t i = 0; i < tuples.size(); ++i) {
    if (i > 0) out += ", ";
    out += "[";
    for (size_t j = 0; j < tuples[i].size(); ++j) {
      if (j > 0) out += ", ";
      out += tuples[i][j].render();
    }
    out += "]";
  }
  return out + "]";
}

std::string renderIntList(const std::vector<int>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("{}", xs[i]);
  }
  return out + "]";
}

// Canonical form omits the output label: two aggregates differing only in
// call names are the same computation, so they share a digest (projections
// above carry the visible names).
std::string renderCall(const AggCall& call, bool canonical) {
  if (canonical) {
    std::string argText = call.func == AggFunc::CountStar ? "" : fmt::format("${}", call.arg);
    return fmt::format("{}({})", aggFuncName(call.func), argText);
  }
  return call.render();
}

std::string renderCallList(const std::vector<AggCall>& calls, bool canonical) {
  std::string out = "[";
  for (size_t i = 0; i < calls.size(); ++i) {
    if (i > 0) out += ", ";
    out += renderCall(calls[i], canonical);
  }
  return out + "]";
}

// attr text shared by the render line and the digest; `canonical` switches
// scalar expressions to their digest form.
std::string attrText(const RelNode& node, bool canonical) {
  auto exprText = [&](const ExprPtr& e) {
    return canonical ? e->digest() : e->render();
  };
  switch (node.kind()) {
    case RelKind::TableScan: {
      const auto& a = node.scan();
      std::string out = fmt::format("table={}", a.table->qualifiedName());
      if (!a.columns.empty()) out += fmt::format(", columns={}", renderIntList(a.columns));
      return out;
    }
    case RelKind::Filter:
      return fmt::format("cond={}", exprText(node.filter().condition));
    case RelKind::Project: {
      const auto& a = node.project();
      std::string exprs = "[";
      for (size_t i = 0; i < a.exprs.size(); ++i) {
        if (i > 0) exprs += ", ";
        exprs += exprText(a.exprs[i]);
      }
      exprs += "]";
      std::string names = "[";
      for (size_t i = 0; i < node.rowType().size(); ++i) {
        if (i > 0) names += ", ";
        names += node.rowType().field(i).name;
      }
      names += "]";
      return fmt::format("exprs={}, names={}", exprs, names);
    }
    case RelKind::Join:
      return fmt::format("type={}, cond={}", joinTypeName(node.join().type),
                         exprText(node.join().condition));
    case RelKind::Aggregate: {
      const auto& a = node.aggregate();
      return fmt::format("groups={}, aggs={}", renderIntList(a.groupKeys),
                         renderCallList(a.calls, canonical));
    }
    case RelKind::Sort: {
      const auto& a = node.sort();
      std::string out = fmt::format("keys={}", renderCollation(a.keys));
      if (a.fetch) out += fmt::format(", fetch={}", *a.fetch);
      if (a.offset) out += fmt::format(", offset={}", *a.offset);
      return out;
    }
    case RelKind::Values: {
      const auto& a = node.values();
      return fmt::format("fields={}, tuples={}", a.rowType.render(),
                         renderTuples(a.tuples));
    }
    case RelKind::Window: {
      const auto& a = node.window();
      return fmt::format("partition={}, order={}, calls={}, frame={}..{}",
                         renderIntList(a.partitionKeys), renderCollation(a.orderKeys),
                         renderCallList(a.calls, canonical), a.lower.render(), a.upper.render());
    }
    case RelKind::Converter: {
      std::string out = fmt::format("from={}", node.converter().source.name);
      return out;
    }
    case RelKind::ViewScan: {
      const auto& a = node.viewScan();
      return fmt::format("view={}, table={}", a.viewId, a.backing->qualifiedName());
    }
    case RelKind::GroupRef:
      return fmt::format("group={}", node.groupRef().groupId);
  }
  return "";
}

}  // namespace

std::string RelNode::digest(
    const std::function<std::string(const RelNode&)>& inputResolver) const {
  std::string out = fmt::format("{}[{}]{{{}}}", relKindName(kind_),
                                attrText(*this, true), traits_.render());
  out += "(";
  for (size_t i = 0; i < inputs_.size(); ++i) {
    if (i > 0) out += ",";
    out += inputResolver(*inputs_[i]);
  }
  out += ")";
  return out;
}

std::string RelNode::digest() const {
  return digest([](const RelNode& input) { return input.digest(); });
}

std::string RelNode::renderLine() const {
  std::string attrs = attrText(*this, false);
  if (kind_ == RelKind::Converter && !attrs.empty()) {
    // `from` is digest detail; the rendered line shows traits (and SQL, which
    // the execution layer injects via renderTree overloads upstream).
    attrs.clear();
  }
  if (attrs.empty()) {
    return fmt::format("{}[traits={}]", relKindName(kind_), traits_.render());
  }
  return fmt::format("{}[{}, traits={}]", relKindName(kind_), attrs, traits_.render());
}

std::string RelNode::renderTree() const {
  std::string out;
  std::function<void(const RelNode&, int)> walk = [&](const RelNode& node, int depth) {
    out += std::string(static_cast<size_t>(depth) * 2, ' ');
    out += node.renderLine();
    out += "\n";
    for (const auto& in : node.inputs()) walk(*in, depth + 1);
  };
  walk(*this, 0);
  return out;
}

}  // namespace relq
