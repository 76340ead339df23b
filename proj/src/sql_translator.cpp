#include "relq/sql/translator.hpp"

#include <fmt/format.h>

#include <set>

#include "relq/error.hpp"
#include "relq/sql/parser.hpp"

namespace relq::sql {

namespace {

struct Scope {
  std::string alias;
  RowType rowType;  // relation-local names, before join uniquification
  int startCol = 0;
};

class Translator {
 public:
  Translator(const Catalog& catalog, std::set<std::string>* viewStack)
      : catalog_(catalog), viewStack_(viewStack) {}

  ValidatedAst run(const SelectStmt& stmt) {
    ValidatedAst v;
    buildSource(stmt, v);

    if (stmt.where) {
      v.where = resolveScalar(*stmt.where, /*aggregated=*/false, /*aggsAllowed=*/false);
      checkBoolean(v.where, sourceType(), stmt.where->pos);
    }

    v.hasAggregate = !stmt.groupBy.empty() || stmt.having != nullptr;
    for (const auto& item : stmt.items) {
      if (item.expr && containsAgg(*item.expr)) v.hasAggregate = true;
    }
    for (const auto& item : stmt.orderBy) {
      if (containsAgg(*item.expr)) v.hasAggregate = true;
    }

    if (v.hasAggregate) {
      for (const auto& key : stmt.groupBy) {
        ExprPtr resolved = resolveScalar(*key, false, false);
        if (resolved->variant() != ScalarExpr::Variant::ColumnRef) {
          raise(ErrorCode::ValidationError,
                "GROUP BY expressions must be column references", key->pos);
        }
        groupKeys_.push_back(resolved->index());
      }
      v.groupKeys = groupKeys_;
      for (const auto& item : stmt.items) {
        if (item.expr) collectAggCalls(*item.expr);
      }
      if (stmt.having) collectAggCalls(*stmt.having);
      for (const auto& item : stmt.orderBy) collectAggCalls(*item.expr);
      aggOutputType_ = withPos(stmt.pos, [&] { return aggregateOutputType(v); });
    }

    // Select items: expand * and resolve the rest over the aggregate output
    // (or the source when there is no aggregate).
    std::vector<std::string> names;
    for (const auto& item : stmt.items) {
      if (item.star) {
        if (v.hasAggregate) {
          raise(ErrorCode::NotGrouped, "SELECT * is not valid with GROUP BY",
                item.pos);
        }
        const RowType& src = sourceType();
        for (size_t i = 0; i < src.size(); ++i) {
          v.projections.push_back(ScalarExpr::columnRef(static_cast<int>(i)));
          names.push_back(src.field(i).name);
        }
        continue;
      }
      ExprPtr resolved = resolveScalar(*item.expr, v.hasAggregate, true);
      resolved->deriveType(v.hasAggregate ? aggOutputType_ : sourceType());
      v.projections.push_back(resolved);
      names.push_back(!item.alias.empty() ? item.alias : deriveItemName(*item.expr));
    }
    v.projectionNames = uniquifyNames(names);

    if (stmt.having) {
      v.having = resolveScalar(*stmt.having, true, true);
      checkBoolean(v.having, aggOutputType_, stmt.having->pos);
    }

    // ORDER BY items must name a select alias or repeat a select expression.
    for (const auto& item : stmt.orderBy) {
      int index = -1;
      if (item.expr->kind == AstExpr::Kind::Name && item.expr->nameParts.size() == 1) {
        const std::string needle = toLower(item.expr->nameParts[0]);
        for (size_t i = 0; i < v.projectionNames.size(); ++i) {
          if (toLower(v.projectionNames[i]) == needle) {
            index = static_cast<int>(i);
            break;
          }
        }
      }
      if (index < 0) {
        ExprPtr resolved = resolveScalar(*item.expr, v.hasAggregate, true);
        std::string digest = resolved->digest();
        for (size_t i = 0; i < v.projections.size(); ++i) {
          if (v.projections[i]->digest() == digest) {
            index = static_cast<int>(i);
            break;
          }
        }
      }
      if (index < 0) {
        raise(ErrorCode::UnknownColumn,
              "ORDER BY expression must appear in the select list", item.pos);
      }
      v.orderKeys.push_back({index, item.direction});
    }
    v.limit = stmt.limit;
    if (v.hasAggregate) v.aggCalls = aggCalls_;
    return v;
  }

 private:
  const RowType& sourceType() const { return source_->rowType(); }

  void checkBoolean(const ExprPtr& expr, const RowType& input, SourcePos pos) {
    ScalarType t = withPos(pos, [&] { return expr->deriveType(input); });
    if (t.kind() != ScalarType::Kind::Boolean && !t.isAny()) {
      raise(ErrorCode::TypeMismatch,
            fmt::format("expected a BOOLEAN condition, got {}", t.render()), pos);
    }
  }

  template <typename F>
  auto withPos(SourcePos pos, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.pos()) throw;
      throw Error(e.code(), e.rawMessage(), pos);
    }
  }

  // ---- FROM clause -------------------------------------------------------

  void buildSource(const SelectStmt& stmt, ValidatedAst& v) {
    if (!stmt.from) {
      source_ = makeValues(RowType(), {Row{}});
      v.sourcePlan = source_;
      return;
    }
    auto [plan, scope] = resolveFromItem(*stmt.from);
    source_ = plan;
    addScope(scope, stmt.from->pos);

    for (const auto& clause : stmt.joins) {
      auto [rightPlan, rightScope] = resolveFromItem(clause.right);
      int leftArity = static_cast<int>(source_->rowType().size());
      rightScope.startCol = leftArity;

      ExprPtr condition;
      if (clause.on) {
        addScope(rightScope, clause.pos);
        condition = resolveScalar(*clause.on, false, false);
      } else {
        std::vector<ExprPtr> equalities;
        for (const auto& colName : clause.usingCols) {
          int leftIndex = withPos(clause.pos, [&] { return resolveUnqualified(colName); });
          int rightLocal = rightScope.rowType.indexOf(colName);
          if (rightLocal < 0) {
            raise(ErrorCode::UnknownColumn,
                  fmt::format("USING column '{}' not found in '{}'", colName,
                              rightScope.alias),
                  clause.pos);
          }
          equalities.push_back(ex::eq(ScalarExpr::columnRef(leftIndex),
                                      ScalarExpr::columnRef(leftArity + rightLocal)));
          usingNames_.insert(toLower(colName));
        }
        condition = makeConjunction(std::move(equalities));
        addScope(rightScope, clause.pos);
      }
      source_ = withPos(clause.pos, [&] {
        return makeJoin(clause.type, condition, source_, rightPlan);
      });
    }
    v.sourcePlan = source_;
  }

  std::pair<RelNodePtr, Scope> resolveFromItem(const TableRefAst& ref) {
    if (ref.subquery) {
      RelNodePtr plan = translateSub(*ref.subquery);
      return {plan, Scope{ref.alias, plan->rowType(), 0}};
    }
    if (ref.nameParts.size() == 1) {
      const std::string& name = ref.nameParts[0];
      if (const ViewDef* view = catalog_.findView(name)) {
        RelNodePtr plan = expandView(*view, ref.pos);
        std::string alias = !ref.alias.empty() ? ref.alias : view->name;
        return {plan, Scope{alias, plan->rowType(), 0}};
      }
      TablePtr table = catalog_.findTable("", name);
      if (!table) {
        raise(ErrorCode::UnknownTable, fmt::format("unknown table '{}'", name), ref.pos);
      }
      std::string alias = !ref.alias.empty() ? ref.alias : table->name();
      return {makeScan(table), Scope{alias, table->rowType(), 0}};
    }
    if (ref.nameParts.size() == 2) {
      TablePtr table = catalog_.findTable(ref.nameParts[0], ref.nameParts[1]);
      if (!table) {
        raise(ErrorCode::UnknownTable,
              fmt::format("unknown table '{}.{}'", ref.nameParts[0], ref.nameParts[1]),
              ref.pos);
      }
      std::string alias = !ref.alias.empty() ? ref.alias : table->name();
      return {makeScan(table), Scope{alias, table->rowType(), 0}};
    }
    raise(ErrorCode::UnknownTable,
          fmt::format("too many name parts in table reference"), ref.pos);
  }

  RelNodePtr expandView(const ViewDef& view, SourcePos pos) {
    std::string key = toLower(view.name);
    if (viewStack_->count(key)) {
      raise(ErrorCode::ValidationError,
            fmt::format("circular view definition '{}'", view.name), pos);
    }
    viewStack_->insert(key);
    Statement stmt = parseStatement(view.sql);
    Translator inner(catalog_, viewStack_);
    RelNodePtr plan = toAlgebra(inner.run(*stmt.query));
    viewStack_->erase(key);
    return plan;
  }

  RelNodePtr translateSub(const SelectStmt& stmt) {
    Translator inner(catalog_, viewStack_);
    return toAlgebra(inner.run(stmt));
  }

  void addScope(const Scope& scope, SourcePos pos) {
    for (const auto& existing : scopes_) {
      if (toLower(existing.alias) == toLower(scope.alias)) {
        raise(ErrorCode::ValidationError,
              fmt::format("duplicate table alias '{}'", scope.alias), pos);
      }
    }
    scopes_.push_back(scope);
  }

  // ---- name resolution ---------------------------------------------------

  int resolveUnqualified(const std::string& name) {
    std::vector<int> matches;
    for (const auto& scope : scopes_) {
      int local = scope.rowType.indexOf(name);
      if (local >= 0) matches.push_back(scope.startCol + local);
    }
    if (matches.empty()) {
      raise(ErrorCode::UnknownColumn, fmt::format("unknown column '{}'", name));
    }
    if (matches.size() > 1 && usingNames_.count(toLower(name)) == 0) {
      raise(ErrorCode::AmbiguousColumn, fmt::format("column '{}' is ambiguous", name));
    }
    return matches[0];  // USING columns resolve to the leftmost side
  }

  int resolveName(const std::vector<std::string>& parts, SourcePos pos) {
    return withPos(pos, [&]() -> int {
      if (parts.size() == 1) return resolveUnqualified(parts[0]);
      if (parts.size() == 2) {
        for (const auto& scope : scopes_) {
          if (toLower(scope.alias) == toLower(parts[0])) {
            int local = scope.rowType.indexOf(parts[1]);
            if (local < 0) {
              raise(ErrorCode::UnknownColumn,
                    fmt::format("no column '{}' in '{}'", parts[1], parts[0]));
            }
            return scope.startCol + local;
          }
        }
        raise(ErrorCode::UnknownTable, fmt::format("unknown table alias '{}'", parts[0]));
      }
      raise(ErrorCode::UnknownColumn, "too many name parts in column reference");
    });
  }

  // ---- aggregates --------------------------------------------------------

  bool containsAgg(const AstExpr& e) const {
    if (e.kind == AstExpr::Kind::Agg) return true;
    for (const auto& a : e.args) {
      if (a && containsAgg(*a)) return true;
    }
    return false;
  }

  int aggArgColumn(const AstExpr& agg) {
    if (agg.aggFunc == AstAggFunc::CountStar) return -1;
    ExprPtr resolved = resolveScalar(*agg.args[0], false, false);
    if (resolved->variant() != ScalarExpr::Variant::ColumnRef) {
      raise(ErrorCode::ValidationError, "aggregate arguments must be columns", agg.pos);
    }
    return resolved->index();
  }

  std::string aggName(AstAggFunc func, int arg) const {
    switch (func) {
      case AstAggFunc::CountStar: return "COUNT(*)";
      case AstAggFunc::Count:
        return fmt::format("COUNT({})", sourceType().field(arg).name);
      case AstAggFunc::Sum: return fmt::format("SUM({})", sourceType().field(arg).name);
      case AstAggFunc::Min: return fmt::format("MIN({})", sourceType().field(arg).name);
      case AstAggFunc::Max: return fmt::format("MAX({})", sourceType().field(arg).name);
      case AstAggFunc::Avg: return fmt::format("AVG({})", sourceType().field(arg).name);
    }
    return "?";
  }

  int ensureAggCall(AggFunc func, int arg) {
    for (size_t i = 0; i < aggCalls_.size(); ++i) {
      if (aggCalls_[i].func == func && aggCalls_[i].arg == arg) {
        return static_cast<int>(i);
      }
    }
    AstAggFunc astFunc;
    switch (func) {
      case AggFunc::CountStar: astFunc = AstAggFunc::CountStar; break;
      case AggFunc::Count: astFunc = AstAggFunc::Count; break;
      case AggFunc::Sum: astFunc = AstAggFunc::Sum; break;
      case AggFunc::Min: astFunc = AstAggFunc::Min; break;
      case AggFunc::Max: astFunc = AstAggFunc::Max; break;
    }
    aggCalls_.push_back({func, arg, aggName(astFunc, arg)});
    return static_cast<int>(aggCalls_.size() - 1);
  }

  void collectAggCalls(const AstExpr& e) {
    if (e.kind == AstExpr::Kind::Agg) {
      switch (e.aggFunc) {
        case AstAggFunc::CountStar: ensureAggCall(AggFunc::CountStar, -1); break;
        case AstAggFunc::Count: ensureAggCall(AggFunc::Count, aggArgColumn(e)); break;
        case AstAggFunc::Sum: ensureAggCall(AggFunc::Sum, aggArgColumn(e)); break;
        case AstAggFunc::Min: ensureAggCall(AggFunc::Min, aggArgColumn(e)); break;
        case AstAggFunc::Max: ensureAggCall(AggFunc::Max, aggArgColumn(e)); break;
        case AstAggFunc::Avg: {
          // AVG(x) lowers to SUM(x) / COUNT(x) with FLOAT64 division.
          int arg = aggArgColumn(e);
          ensureAggCall(AggFunc::Sum, arg);
          ensureAggCall(AggFunc::Count, arg);
          break;
        }
      }
      return;
    }
    for (const auto& a : e.args) {
      if (a) collectAggCalls(*a);
    }
  }

  RowType aggregateOutputType(const ValidatedAst& v) {
    RelNodePtr base = source_;
    if (v.where) base = makeFilter(base, v.where);
    RelNodePtr agg = makeAggregate(base, groupKeys_, aggCalls_);
    return agg->rowType();
  }

  // ---- expressions -------------------------------------------------------

  /// aggregated: references resolve against the aggregate output (group
  /// keys by position, aggregates by call slot); bare columns outside the
  /// group keys raise NotGrouped.
  ExprPtr resolveScalar(const AstExpr& e, bool aggregated, bool aggsAllowed) {
    switch (e.kind) {
      case AstExpr::Kind::Name: {
        int sourceIndex = resolveName(e.nameParts, e.pos);
        if (!aggregated) return ScalarExpr::columnRef(sourceIndex);
        for (size_t i = 0; i < groupKeys_.size(); ++i) {
          if (groupKeys_[i] == sourceIndex) {
            return ScalarExpr::columnRef(static_cast<int>(i));
          }
        }
        raise(ErrorCode::NotGrouped,
              fmt::format("column '{}' is neither grouped nor aggregated",
                          e.nameParts.back()),
              e.pos);
      }
      case AstExpr::Kind::Literal:
        return ScalarExpr::literal(e.literal, e.literalType);
      case AstExpr::Kind::Op: {
        std::vector<ExprPtr> args;
        args.reserve(e.args.size());
        for (const auto& a : e.args) {
          args.push_back(resolveScalar(*a, aggregated, aggsAllowed));
        }
        return withPos(e.pos, [&] { return ScalarExpr::call(e.opKind, std::move(args)); });
      }
      case AstExpr::Kind::Item: {
        ExprPtr container = resolveScalar(*e.args[0], aggregated, aggsAllowed);
        ExprPtr key = resolveScalar(*e.args[1], aggregated, aggsAllowed);
        return withPos(e.pos, [&] { return ex::item(container, key); });
      }
      case AstExpr::Kind::Cast: {
        ExprPtr arg = resolveScalar(*e.args[0], aggregated, aggsAllowed);
        return ScalarExpr::cast(std::move(arg), e.castTarget);
      }
      case AstExpr::Kind::Agg: {
        if (!aggsAllowed || !aggregated) {
          raise(ErrorCode::ValidationError, "aggregate is not allowed here", e.pos);
        }
        int keyCount = static_cast<int>(groupKeys_.size());
        switch (e.aggFunc) {
          case AstAggFunc::CountStar:
            return ScalarExpr::columnRef(keyCount + ensureAggCall(AggFunc::CountStar, -1));
          case AstAggFunc::Count:
            return ScalarExpr::columnRef(keyCount +
                                         ensureAggCall(AggFunc::Count, aggArgColumn(e)));
          case AstAggFunc::Sum:
            return ScalarExpr::columnRef(keyCount +
                                         ensureAggCall(AggFunc::Sum, aggArgColumn(e)));
          case AstAggFunc::Min:
            return ScalarExpr::columnRef(keyCount +
                                         ensureAggCall(AggFunc::Min, aggArgColumn(e)));
          case AstAggFunc::Max:
            return ScalarExpr::columnRef(keyCount +
                                         ensureAggCall(AggFunc::Max, aggArgColumn(e)));
          case AstAggFunc::Avg: {
            int arg = aggArgColumn(e);
            int sumSlot = keyCount + ensureAggCall(AggFunc::Sum, arg);
            int countSlot = keyCount + ensureAggCall(AggFunc::Count, arg);
            return ex::divide(
                ScalarExpr::cast(ScalarExpr::columnRef(sumSlot), ScalarType::float64()),
                ScalarExpr::columnRef(countSlot));
          }
        }
        raise(ErrorCode::ValidationError, "unknown aggregate", e.pos);
      }
    }
    raise(ErrorCode::ValidationError, "unknown expression form", e.pos);
  }

  std::string deriveItemName(const AstExpr& e) const {
    switch (e.kind) {
      case AstExpr::Kind::Name:
        return e.nameParts.back();
      case AstExpr::Kind::Agg: {
        // Canonical aggregate label, e.g. COUNT(*) / SUM(sal).
        if (e.aggFunc == AstAggFunc::CountStar) return "COUNT(*)";
        const AstExpr& arg = *e.args[0];
        std::string argName =
            arg.kind == AstExpr::Kind::Name ? arg.nameParts.back() : "?";
        switch (e.aggFunc) {
          case AstAggFunc::Count: return fmt::format("COUNT({})", argName);
          case AstAggFunc::Sum: return fmt::format("SUM({})", argName);
          case AstAggFunc::Min: return fmt::format("MIN({})", argName);
          case AstAggFunc::Max: return fmt::format("MAX({})", argName);
          case AstAggFunc::Avg: return fmt::format("AVG({})", argName);
          default: return "AGG";
        }
      }
      default:
        return fmt::format("EXPR{}", anonCounter_++);
    }
  }

  const Catalog& catalog_;
  std::set<std::string>* viewStack_;
  std::vector<Scope> scopes_;
  std::set<std::string> usingNames_;
  RelNodePtr source_;
  std::vector<int> groupKeys_;
  std::vector<AggCall> aggCalls_;
  RowType aggOutputType_;
  mutable int anonCounter_ = 0;
};

}  // namespace

ValidatedAst validate(const SelectStmt& stmt, const Catalog& catalog) {
  std::set<std::string> viewStack;
  Translator translator(catalog, &viewStack);
  return translator.run(stmt);
}

RelNodePtr toAlgebra(const ValidatedAst& v) {
  RelNodePtr plan = v.sourcePlan;
  if (v.where) plan = makeFilter(plan, v.where);
  if (v.hasAggregate) plan = makeAggregate(plan, v.groupKeys, v.aggCalls);
  if (v.having) plan = makeFilter(plan, v.having);
  plan = makeProject(plan, v.projections, v.projectionNames);
  if (!v.orderKeys.empty() || v.limit) {
    plan = makeSort(plan, v.orderKeys, v.limit, std::nullopt);
  }
  return plan;
}

RelNodePtr translateQuery(const SelectStmt& stmt, const Catalog& catalog) {
  return toAlgebra(validate(stmt, catalog));
}

}  // namespace relq::sql
