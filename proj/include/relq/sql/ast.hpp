#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relq/error.hpp"
#include "relq/rel_node.hpp"
#include "relq/types.hpp"
#include "relq/value.hpp"

namespace relq::sql {

struct AstExpr;
using AstExprPtr = std::shared_ptr<AstExpr>;

/// AVG exists only here; translation rewrites it to SUM/COUNT.
enum class AstAggFunc { CountStar, Count, Sum, Min, Max, Avg };

/// Unresolved expression; every node carries its source position.
struct AstExpr {
  enum class Kind { Name, Literal, Op, Cast, Agg, Item };

  Kind kind = Kind::Literal;
  SourcePos pos;

  // Name: t.c or c
  std::vector<std::string> nameParts;

  // Literal
  Value literal;
  ScalarType literalType;

  // Op (args in opKind arity), Item (container, key)
  OpKind opKind = OpKind::Eq;
  std::vector<AstExprPtr> args;

  // Cast
  ScalarType castTarget;

  // Agg
  AstAggFunc aggFunc = AstAggFunc::CountStar;
};

struct SelectStmt;

struct TableRefAst {
  std::vector<std::string> nameParts;  // empty for subqueries
  std::string alias;
  std::shared_ptr<SelectStmt> subquery;
  SourcePos pos;
};

struct JoinClauseAst {
  JoinType type = JoinType::Inner;
  TableRefAst right;
  AstExprPtr on;                       // nullptr when USING
  std::vector<std::string> usingCols;  // empty when ON
  SourcePos pos;
};

struct SelectItemAst {
  bool star = false;
  AstExprPtr expr;
  std::string alias;
  SourcePos pos;
};

struct OrderItemAst {
  AstExprPtr expr;
  Direction direction = Direction::Ascending;
  SourcePos pos;
};

struct SelectStmt {
  std::vector<SelectItemAst> items;
  std::optional<TableRefAst> from;
  std::vector<JoinClauseAst> joins;
  AstExprPtr where;
  std::vector<AstExprPtr> groupBy;
  AstExprPtr having;
  std::vector<OrderItemAst> orderBy;
  std::optional<int64_t> limit;
  SourcePos pos;
};

struct Statement {
  bool explain = false;
  std::shared_ptr<SelectStmt> query;
};

}  // namespace relq::sql
