#include "relq/adapters/sql_gen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <optional>

#include "relq/error.hpp"

namespace relq {

namespace {

std::string quoteIdent(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string sqlTypeName(const ScalarType& type) {
  switch (type.kind()) {
    case ScalarType::Kind::Boolean: return "BOOLEAN";
    case ScalarType::Kind::Int64: return "BIGINT";
    case ScalarType::Kind::Float64: return "DOUBLE";
    case ScalarType::Kind::String: return "VARCHAR";
    default:
      raise(ErrorCode::UnsupportedNode,
            fmt::format("cannot translate CAST to {} into remote SQL", type.render()));
  }
}

int sqlPrecedence(OpKind op) {
  switch (op) {
    case OpKind::Or: return 1;
    case OpKind::And: return 2;
    case OpKind::Not: return 3;
    case OpKind::Eq:
    case OpKind::Ne:
    case OpKind::Lt:
    case OpKind::Le:
    case OpKind::Gt:
    case OpKind::Ge:
    case OpKind::IsNull:
    case OpKind::IsNotNull:
      return 4;
    case OpKind::Plus:
    case OpKind::Minus: return 5;
    case OpKind::Times:
    case OpKind::Divide: return 6;
    default: return 9;
  }
}

// Column reference texts visible in a block's FROM scope.
using Scope = std::vector<std::string>;

std::string renderSqlExpr(const ScalarExpr& e, const Scope& scope);

std::string renderSqlChild(const ScalarExpr& parent, const ScalarExpr& child,
                           const Scope& scope, bool rightSide) {
  std::string text = renderSqlExpr(child, scope);
  if (child.variant() != ScalarExpr::Variant::Call) return text;
  OpKind po = parent.op();
  OpKind co = child.op();
  if (co == OpKind::Cast || co == OpKind::Item) return text;
  int pp = sqlPrecedence(po);
  int cp = sqlPrecedence(co);
  bool parens = cp < pp;
  if (!parens && cp == pp && rightSide && (po == OpKind::Minus || po == OpKind::Divide)) {
    parens = true;
  }
  if (!parens &&
      (po == OpKind::Not || po == OpKind::IsNull || po == OpKind::IsNotNull) &&
      cp <= pp) {
    parens = true;
  }
  return parens ? "(" + text + ")" : text;
}

std::string renderSqlExpr(const ScalarExpr& e, const Scope& scope) {
  switch (e.variant()) {
    case ScalarExpr::Variant::ColumnRef: {
      int i = e.index();
      if (i < 0 || static_cast<size_t>(i) >= scope.size()) {
        raise(ErrorCode::UnsupportedNode,
              fmt::format("column ${} out of scope in SQL generation", i));
      }
      return scope[static_cast<size_t>(i)];
    }
    case ScalarExpr::Variant::Literal:
      if (e.value().kind() == Value::Kind::Array || e.value().kind() == Value::Kind::Map) {
        raise(ErrorCode::UnsupportedNode, "composite literal in remote SQL");
      }
      return e.value().render();
    case ScalarExpr::Variant::Call:
      break;
  }
  switch (e.op()) {
    case OpKind::Cast:
      return fmt::format("CAST({} AS {})", renderSqlExpr(*e.args()[0], scope),
                         sqlTypeName(e.castTarget()));
    case OpKind::Item:
      raise(ErrorCode::UnsupportedNode, "item access in remote SQL");
    case OpKind::IsNull:
    case OpKind::IsNotNull:
      return fmt::format("{} {}", renderSqlChild(e, *e.args()[0], scope, false),
                         opName(e.op()));
    case OpKind::Not:
      return fmt::format("NOT {}", renderSqlChild(e, *e.args()[0], scope, false));
    default:
      return fmt::format("{} {} {}", renderSqlChild(e, *e.args()[0], scope, false),
                         opName(e.op()), renderSqlChild(e, *e.args()[1], scope, true));
  }
}

std::string renderAggCall(const AggCall& call, const Scope& scope) {
  std::string args;
  if (call.func != AggFunc::CountStar) {
    args = scope[static_cast<size_t>(call.arg)];
  } else {
    args = "*";
  }
  const char* func = call.func == AggFunc::CountStar || call.func == AggFunc::Count
                         ? "COUNT"
                         : aggFuncName(call.func);
  return fmt::format("{}({}) AS {}", func, args, quoteIdent(call.name));
}

/// One SELECT statement under construction. `logical` mirrors exactly the
/// tree the frontend produces when the rendered statement is parsed back
/// against the backend catalog (when a table resolver is supplied).
struct Block {
  // FROM
  std::string from;
  Scope sourceCols;           // reference texts for the FROM scope
  std::string baseTable;      // set when the block is a bare table scan
  bool fromIsJoin = false;
  RelNodePtr fromLogical;     // scans/joins, full-width

  // clauses, in SELECT order
  std::vector<ExprPtr> whereConjuncts;  // over fromLogical output
  std::vector<int> scanCols;            // implicit select list (pruning)
  std::optional<std::vector<ExprPtr>> selectExprs;  // over fromLogical/agg output
  bool hasAggregate = false;
  std::vector<int> groupKeys;           // over fromLogical output
  std::vector<AggCall> aggCalls;
  Collation orderKeys;                  // over the block's output
  std::optional<int64_t> limit;

  std::vector<std::string> outputNames;

  bool hasSelect() const { return selectExprs.has_value() || hasAggregate; }
};

using TableResolver = std::function<TablePtr(const std::string&)>;

class Generator {
 public:
  explicit Generator(TableResolver resolver) : resolver_(std::move(resolver)) {}

  Block build(const RelNodePtr& node) {
    switch (node->kind()) {
      case RelKind::TableScan: return buildScan(node);
      case RelKind::Filter: return buildFilter(node);
      case RelKind::Project: return buildProject(node);
      case RelKind::Aggregate: return buildAggregate(node);
      case RelKind::Sort: return buildSort(node);
      case RelKind::Join: return buildJoin(node);
      default:
        raise(ErrorCode::UnsupportedNode,
              fmt::format("cannot translate {} into remote SQL",
                          relKindName(node->kind())));
    }
  }

  std::string render(const Block& b) const {
    std::string select;
    Scope fromScope = effectiveScope(b);
    if (b.hasAggregate) {
      std::vector<std::string> items;
      for (size_t i = 0; i < b.groupKeys.size(); ++i) {
        items.push_back(fmt::format("{} AS {}", fromScope[b.groupKeys[i]],
                                    quoteIdent(b.outputNames[i])));
      }
      for (const auto& call : b.aggCalls) {
        items.push_back(renderAggCall(call, fromScope));
      }
      select = fmt::format("{}", fmt::join(items, ", "));
    } else if (b.selectExprs) {
      std::vector<std::string> items;
      for (size_t i = 0; i < b.selectExprs->size(); ++i) {
        items.push_back(fmt::format("{} AS {}",
                                    renderSqlExpr(*(*b.selectExprs)[i], fromScope),
                                    quoteIdent(b.outputNames[i])));
      }
      select = fmt::format("{}", fmt::join(items, ", "));
    } else if (!b.scanCols.empty()) {
      std::vector<std::string> items;
      for (int c : b.scanCols) items.push_back(b.sourceCols[c]);
      select = fmt::format("{}", fmt::join(items, ", "));
    } else if (b.fromIsJoin) {
      std::vector<std::string> items;
      for (size_t i = 0; i < b.sourceCols.size(); ++i) {
        items.push_back(
            fmt::format("{} AS {}", b.sourceCols[i], quoteIdent(b.outputNames[i])));
      }
      select = fmt::format("{}", fmt::join(items, ", "));
    } else {
      select = "*";
    }

    std::string out = fmt::format("SELECT {} FROM {}", select, b.from);
    if (!b.whereConjuncts.empty()) {
      std::vector<std::string> parts;
      for (const auto& c : b.whereConjuncts) {
        parts.push_back(renderSqlExpr(*c, b.sourceCols));
      }
      out += fmt::format(" WHERE {}", fmt::join(parts, " AND "));
    }
    if (b.hasAggregate && !b.groupKeys.empty()) {
      std::vector<std::string> parts;
      for (int k : b.groupKeys) parts.push_back(fromScope[k]);
      out += fmt::format(" GROUP BY {}", fmt::join(parts, ", "));
    }
    if (!b.orderKeys.empty()) {
      std::vector<std::string> parts;
      for (const auto& key : b.orderKeys) {
        parts.push_back(fmt::format("{} {}", quoteIdent(b.outputNames[key.field]),
                                    renderDirection(key.direction)));
      }
      out += fmt::format(" ORDER BY {}", fmt::join(parts, ", "));
    }
    if (b.limit) out += fmt::format(" LIMIT {}", *b.limit);
    return out;
  }

  /// The frontend's translation of render(b): Sort? over Project over
  /// Filter? over Aggregate? over Filter? over the FROM tree.
  RelNodePtr logical(const Block& b) const {
    if (!resolver_) return nullptr;
    RelNodePtr plan = b.fromLogical;
    if (!b.whereConjuncts.empty()) {
      plan = makeFilter(plan, makeConjunction(b.whereConjuncts));
    }
    std::vector<ExprPtr> projections;
    std::vector<std::string> names = b.outputNames;
    if (b.hasAggregate) {
      plan = makeAggregate(plan, b.groupKeys, b.aggCalls);
      for (size_t i = 0; i < plan->rowType().size(); ++i) {
        projections.push_back(ScalarExpr::columnRef(static_cast<int>(i)));
      }
    } else if (b.selectExprs) {
      projections = *b.selectExprs;
    } else if (!b.scanCols.empty()) {
      for (int c : b.scanCols) projections.push_back(ScalarExpr::columnRef(c));
    } else {
      for (size_t i = 0; i < plan->rowType().size(); ++i) {
        projections.push_back(ScalarExpr::columnRef(static_cast<int>(i)));
      }
    }
    plan = makeProject(plan, projections, names);
    if (!b.orderKeys.empty() || b.limit) {
      plan = makeSort(plan, b.orderKeys, b.limit, std::nullopt);
    }
    return plan;
  }

 private:
  // Scope the select list and GROUP BY read from (WHERE always reads the
  // raw source scope, matching SQL semantics).
  Scope effectiveScope(const Block& b) const { return b.sourceCols; }

  Block wrap(Block inner) {
    std::string alias = fmt::format("t{}", aliasCounter_++);
    Block outer;
    outer.from = fmt::format("({}) AS {}", render(inner), quoteIdent(alias));
    for (const auto& name : inner.outputNames) {
      outer.sourceCols.push_back(
          fmt::format("{}.{}", quoteIdent(alias), quoteIdent(name)));
    }
    outer.outputNames = inner.outputNames;
    outer.fromLogical = logical(inner);
    return outer;
  }

  Block scanBlock(const RelNodePtr& node, bool aliased, const std::string& alias) {
    const auto& scan = node->scan();
    Block b;
    b.baseTable = scan.table->name();
    b.from = aliased ? fmt::format("{} AS {}", quoteIdent(b.baseTable), quoteIdent(alias))
                     : quoteIdent(b.baseTable);
    const RowType& full = scan.table->rowType();
    for (const auto& field : full.fields()) {
      b.sourceCols.push_back(aliased ? fmt::format("{}.{}", quoteIdent(alias),
                                                   quoteIdent(field.name))
                                     : quoteIdent(field.name));
    }
    b.scanCols = scan.columns;
    b.outputNames.clear();
    for (const auto& field : node->rowType().fields()) b.outputNames.push_back(field.name);
    if (resolver_) {
      TablePtr internal = resolver_(scan.table->name());
      if (!internal) {
        raise(ErrorCode::UnsupportedNode,
              fmt::format("backend has no table '{}'", scan.table->name()));
      }
      b.fromLogical = makeScan(internal);
    }
    return b;
  }

  Block buildScan(const RelNodePtr& node) { return scanBlock(node, false, ""); }

  // Remaps a block-output column index to the FROM-scope index.
  static int outputToSource(const Block& b, int i) {
    return b.scanCols.empty() ? i : b.scanCols[i];
  }

  Block buildFilter(const RelNodePtr& node) {
    Block b = build(node->input(0));
    if (b.hasSelect() || !b.orderKeys.empty() || b.limit) b = wrap(std::move(b));
    for (const auto& conjunct : conjunctsOf(node->filter().condition)) {
      if (conjunct->isLiteralTrue()) continue;  // WHERE TRUE is a no-op
      b.whereConjuncts.push_back(
          conjunct->remapColumns([&](int i) { return outputToSource(b, i); }));
    }
    return b;
  }

  Block buildProject(const RelNodePtr& node) {
    Block b = build(node->input(0));
    if (b.hasSelect() || !b.orderKeys.empty() || b.limit) b = wrap(std::move(b));
    std::vector<ExprPtr> exprs;
    for (const auto& e : node->project().exprs) {
      exprs.push_back(e->remapColumns([&](int i) { return outputToSource(b, i); }));
    }
    b.scanCols.clear();
    b.selectExprs = std::move(exprs);
    b.outputNames.clear();
    for (const auto& field : node->rowType().fields()) b.outputNames.push_back(field.name);
    return b;
  }

  Block buildAggregate(const RelNodePtr& node) {
    Block b = build(node->input(0));
    if (b.hasSelect() || !b.orderKeys.empty() || b.limit) b = wrap(std::move(b));
    const auto& agg = node->aggregate();
    for (int key : agg.groupKeys) b.groupKeys.push_back(outputToSource(b, key));
    for (const auto& call : agg.calls) {
      AggCall mapped = call;
      if (mapped.arg >= 0) mapped.arg = outputToSource(b, mapped.arg);
      b.aggCalls.push_back(mapped);
    }
    b.scanCols.clear();
    b.hasAggregate = true;
    b.outputNames.clear();
    for (const auto& field : node->rowType().fields()) b.outputNames.push_back(field.name);
    return b;
  }

  Block buildSort(const RelNodePtr& node) {
    const auto& sort = node->sort();
    if (sort.offset) {
      raise(ErrorCode::UnsupportedNode, "the remote dialect has no OFFSET");
    }
    Block b = build(node->input(0));
    if (!b.orderKeys.empty() || b.limit) b = wrap(std::move(b));
    b.orderKeys = sort.keys;
    b.limit = sort.fetch;
    return b;
  }

  Block joinSide(const RelNodePtr& node) {
    if (node->kind() == RelKind::TableScan && node->scan().columns.empty()) {
      std::string alias = fmt::format("t{}", aliasCounter_++);
      return scanBlock(node, true, alias);
    }
    return wrap(build(node));
  }

  Block buildJoin(const RelNodePtr& node) {
    Block left = joinSide(node->input(0));
    Block right = joinSide(node->input(1));
    Block b;
    b.fromIsJoin = true;
    b.sourceCols = left.sourceCols;
    b.sourceCols.insert(b.sourceCols.end(), right.sourceCols.begin(),
                        right.sourceCols.end());
    const char* joinWord = node->join().type == JoinType::Inner ? "INNER JOIN" : "LEFT JOIN";
    b.from = fmt::format("{} {} {} ON {}", left.from, joinWord, right.from,
                         renderSqlExpr(*node->join().condition, b.sourceCols));
    for (const auto& field : node->rowType().fields()) b.outputNames.push_back(field.name);
    if (resolver_) {
      b.fromLogical = makeJoin(node->join().type, node->join().condition,
                               left.fromLogical, right.fromLogical);
    }
    return b;
  }

  TableResolver resolver_;
  int aliasCounter_ = 0;
};

void checkCapabilities(const RelNodePtr& node, const Capabilities& caps) {
  switch (node->kind()) {
    case RelKind::TableScan:
      break;
    case RelKind::Filter:
    case RelKind::Project:
      break;
    case RelKind::Sort:
      if (!caps.sort) {
        raise(ErrorCode::UnsupportedNode, "backend does not support sort pushdown");
      }
      break;
    case RelKind::Aggregate:
      if (!caps.aggregate) {
        raise(ErrorCode::UnsupportedNode, "backend does not support aggregate pushdown");
      }
      break;
    case RelKind::Join:
      if (!caps.joinWithinBackend) {
        raise(ErrorCode::UnsupportedNode, "backend does not support join pushdown");
      }
      break;
    default:
      raise(ErrorCode::UnsupportedNode,
            fmt::format("cannot translate {} into remote SQL",
                        relKindName(node->kind())));
  }
  for (const auto& input : node->inputs()) checkCapabilities(input, caps);
}

const Capabilities* findCapabilities(const RelNodePtr& node) {
  if (node->kind() == RelKind::TableScan) {
    return &node->scan().table->capabilities();
  }
  for (const auto& input : node->inputs()) {
    if (const Capabilities* caps = findCapabilities(input)) return caps;
  }
  return nullptr;
}

}  // namespace

std::string generateRemoteSql(const RelNodePtr& subtree) {
  const Capabilities* caps = findCapabilities(subtree);
  if (!caps) {
    raise(ErrorCode::UnsupportedNode, "remote subtree contains no table scan");
  }
  checkCapabilities(subtree, *caps);
  Generator gen(nullptr);
  return gen.render(gen.build(subtree));
}

RelNodePtr logicalizeRemoteSubtree(const RelNodePtr& subtree,
                                   const Catalog& backendCatalog) {
  Generator gen([&backendCatalog](const std::string& name) {
    return backendCatalog.findTable("", name);
  });
  return gen.logical(gen.build(subtree));
}

std::string explainPlanText(const RelNodePtr& plan) {
  std::string out;
  std::function<void(const RelNode&, int)> walk = [&](const RelNode& node, int depth) {
    out += std::string(static_cast<size_t>(depth) * 2, ' ');
    if (node.kind() == RelKind::Converter && node.converter().source.isRemote()) {
      out += fmt::format("Converter[sql={}, traits={}]",
                         generateRemoteSql(node.inputs()[0]), node.traits().render());
    } else {
      out += node.renderLine();
    }
    out += "\n";
    for (const auto& input : node.inputs()) walk(*input, depth + 1);
  };
  walk(*plan, 0);
  return out;
}

}  // namespace relq
