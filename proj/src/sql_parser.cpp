#include "relq/sql/parser.hpp"

#include <fmt/format.h>

namespace relq::sql {

namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  Statement parse() {
    Statement stmt;
    if (atKeyword("EXPLAIN")) {
      next();
      expectKeyword("PLAN");
      expectKeyword("FOR");
      stmt.explain = true;
    }
    stmt.query = parseSelect();
    if (atSymbol(";")) next();
    if (cur().kind != TokenKind::End) fail("end of statement");
    return stmt;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(size_t n = 1) const {
    size_t i = pos_ + n;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  void next() {
    if (pos_ + 1 < tokens_.size()) pos_++;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = cur().kind == TokenKind::End
                            ? "end of input"
                            : fmt::format("'{}'", cur().text);
    raise(ErrorCode::SyntaxError,
          fmt::format("expected {}, found {}", expected, found), cur().pos);
  }

  bool atKeyword(const char* kw) const {
    return cur().kind == TokenKind::Keyword && cur().text == kw;
  }
  bool atSymbol(const char* sym) const {
    return cur().kind == TokenKind::Symbol && cur().text == sym;
  }
  void expectKeyword(const char* kw) {
    if (!atKeyword(kw)) fail(fmt::format("keyword {}", kw));
    next();
  }
  void expectSymbol(const char* sym) {
    if (!atSymbol(sym)) fail(fmt::format("'{}'", sym));
    next();
  }

  bool atIdent() const {
    return cur().kind == TokenKind::Ident || cur().kind == TokenKind::QuotedIdent;
  }
  std::string expectIdent() {
    if (!atIdent()) fail("an identifier");
    std::string text = cur().text;
    next();
    return text;
  }

  std::shared_ptr<SelectStmt> parseSelect() {
    auto stmt = std::make_shared<SelectStmt>();
    stmt->pos = cur().pos;
    expectKeyword("SELECT");
    stmt->items.push_back(parseSelectItem());
    while (atSymbol(",")) {
      next();
      stmt->items.push_back(parseSelectItem());
    }
    if (atKeyword("FROM")) {
      next();
      stmt->from = parseFromItem();
      while (atKeyword("JOIN") || atKeyword("INNER") || atKeyword("LEFT")) {
        stmt->joins.push_back(parseJoinClause());
      }
    }
    if (atKeyword("WHERE")) {
      next();
      stmt->where = parseExpr();
    }
    if (atKeyword("GROUP")) {
      next();
      expectKeyword("BY");
      stmt->groupBy.push_back(parseExpr());
      while (atSymbol(",")) {
        next();
        stmt->groupBy.push_back(parseExpr());
      }
    }
    if (atKeyword("HAVING")) {
      next();
      stmt->having = parseExpr();
    }
    if (atKeyword("ORDER")) {
      next();
      expectKeyword("BY");
      stmt->orderBy.push_back(parseOrderItem());
      while (atSymbol(",")) {
        next();
        stmt->orderBy.push_back(parseOrderItem());
      }
    }
    if (atKeyword("LIMIT")) {
      next();
      if (cur().kind != TokenKind::NumLit || cur().text.find('.') != std::string::npos) {
        fail("an integer limit");
      }
      stmt->limit = std::stoll(cur().text);
      next();
    }
    return stmt;
  }

  SelectItemAst parseSelectItem() {
    SelectItemAst item;
    item.pos = cur().pos;
    if (atSymbol("*")) {
      next();
      item.star = true;
      return item;
    }
    item.expr = parseExpr();
    if (atKeyword("AS")) {
      next();
      item.alias = expectIdent();
    } else if (atIdent()) {
      item.alias = expectIdent();
    }
    return item;
  }

  TableRefAst parseFromItem() {
    TableRefAst ref;
    ref.pos = cur().pos;
    if (atSymbol("(")) {
      next();
      ref.subquery = parseSelect();
      expectSymbol(")");
      if (atKeyword("AS")) next();
      ref.alias = expectIdent();
      return ref;
    }
    ref.nameParts.push_back(expectIdent());
    while (atSymbol(".")) {
      next();
      ref.nameParts.push_back(expectIdent());
    }
    if (atKeyword("AS")) {
      next();
      ref.alias = expectIdent();
    } else if (atIdent()) {
      ref.alias = expectIdent();
    }
    return ref;
  }

  JoinClauseAst parseJoinClause() {
    JoinClauseAst clause;
    clause.pos = cur().pos;
    clause.type = JoinType::Inner;
    if (atKeyword("INNER")) {
      next();
    } else if (atKeyword("LEFT")) {
      next();
      clause.type = JoinType::Left;
    }
    expectKeyword("JOIN");
    clause.right = parseFromItem();
    if (atKeyword("ON")) {
      next();
      clause.on = parseExpr();
    } else if (atKeyword("USING")) {
      next();
      expectSymbol("(");
      clause.usingCols.push_back(expectIdent());
      while (atSymbol(",")) {
        next();
        clause.usingCols.push_back(expectIdent());
      }
      expectSymbol(")");
    } else {
      fail("ON or USING");
    }
    return clause;
  }

  OrderItemAst parseOrderItem() {
    OrderItemAst item;
    item.pos = cur().pos;
    item.expr = parseExpr();
    if (atKeyword("ASC")) {
      next();
    } else if (atKeyword("DESC")) {
      next();
      item.direction = Direction::Descending;
    }
    return item;
  }

  AstExprPtr makeOp(OpKind op, std::vector<AstExprPtr> args, SourcePos pos) {
    auto e = std::make_shared<AstExpr>();
    e->kind = AstExpr::Kind::Op;
    e->opKind = op;
    e->args = std::move(args);
    e->pos = pos;
    return e;
  }

  AstExprPtr parseExpr() { return parseOr(); }

  AstExprPtr parseOr() {
    AstExprPtr left = parseAnd();
    while (atKeyword("OR")) {
      SourcePos pos = cur().pos;
      next();
      left = makeOp(OpKind::Or, {left, parseAnd()}, pos);
    }
    return left;
  }

  AstExprPtr parseAnd() {
    AstExprPtr left = parseNot();
    while (atKeyword("AND")) {
      SourcePos pos = cur().pos;
      next();
      left = makeOp(OpKind::And, {left, parseNot()}, pos);
    }
    return left;
  }

  AstExprPtr parseNot() {
    if (atKeyword("NOT")) {
      SourcePos pos = cur().pos;
      next();
      return makeOp(OpKind::Not, {parseNot()}, pos);
    }
    return parseComparison();
  }

  AstExprPtr parseComparison() {
    AstExprPtr left = parseAdditive();
    if (cur().kind == TokenKind::Symbol) {
      OpKind op;
      const std::string& s = cur().text;
      if (s == "=") op = OpKind::Eq;
      else if (s == "<>") op = OpKind::Ne;
      else if (s == "<") op = OpKind::Lt;
      else if (s == "<=") op = OpKind::Le;
      else if (s == ">") op = OpKind::Gt;
      else if (s == ">=") op = OpKind::Ge;
      else return maybeIs(left);
      SourcePos pos = cur().pos;
      next();
      return makeOp(op, {left, parseAdditive()}, pos);
    }
    return maybeIs(left);
  }

  AstExprPtr maybeIs(AstExprPtr left) {
    if (atKeyword("IS")) {
      SourcePos pos = cur().pos;
      next();
      bool negated = false;
      if (atKeyword("NOT")) {
        next();
        negated = true;
      }
      expectKeyword("NULL");
      return makeOp(negated ? OpKind::IsNotNull : OpKind::IsNull, {left}, pos);
    }
    return left;
  }

  AstExprPtr parseAdditive() {
    AstExprPtr left = parseMultiplicative();
    while (atSymbol("+") || atSymbol("-")) {
      OpKind op = cur().text == "+" ? OpKind::Plus : OpKind::Minus;
      SourcePos pos = cur().pos;
      next();
      left = makeOp(op, {left, parseMultiplicative()}, pos);
    }
    return left;
  }

  AstExprPtr parseMultiplicative() {
    AstExprPtr left = parseUnary();
    while (atSymbol("*") || atSymbol("/")) {
      OpKind op = cur().text == "*" ? OpKind::Times : OpKind::Divide;
      SourcePos pos = cur().pos;
      next();
      left = makeOp(op, {left, parseUnary()}, pos);
    }
    return left;
  }

  AstExprPtr parseUnary() {
    if (atSymbol("-")) {
      SourcePos pos = cur().pos;
      next();
      AstExprPtr operand = parseUnary();
      if (operand->kind == AstExpr::Kind::Literal && operand->literal.isNumeric()) {
        if (operand->literal.kind() == Value::Kind::Int) {
          operand->literal = Value::int64(-operand->literal.asInt());
        } else {
          operand->literal = Value::float64(-operand->literal.asFloat());
        }
        return operand;
      }
      auto zero = std::make_shared<AstExpr>();
      zero->kind = AstExpr::Kind::Literal;
      zero->literal = Value::int64(0);
      zero->literalType = ScalarType::int64(false);
      zero->pos = pos;
      return makeOp(OpKind::Minus, {zero, operand}, pos);
    }
    return parsePostfix();
  }

  AstExprPtr parsePostfix() {
    AstExprPtr e = parsePrimary();
    while (atSymbol("[")) {
      SourcePos pos = cur().pos;
      next();
      AstExprPtr key = parseExpr();
      expectSymbol("]");
      auto item = std::make_shared<AstExpr>();
      item->kind = AstExpr::Kind::Item;
      item->args = {e, key};
      item->pos = pos;
      e = item;
    }
    return e;
  }

  ScalarType parseTypeName() {
    if (!atIdent()) fail("a type name");
    SourcePos pos = cur().pos;
    std::string name = expectIdent();
    auto type = ScalarType::fromName(name);
    if (!type) {
      raise(ErrorCode::SyntaxError, fmt::format("unknown type name '{}'", name), pos);
    }
    if (atSymbol("(")) {  // VARCHAR(20): length is accepted and ignored
      next();
      if (cur().kind != TokenKind::NumLit) fail("a length");
      next();
      expectSymbol(")");
    }
    return *type;
  }

  AstExprPtr parseAggregate() {
    auto e = std::make_shared<AstExpr>();
    e->kind = AstExpr::Kind::Agg;
    e->pos = cur().pos;
    std::string func = cur().text;
    next();
    expectSymbol("(");
    if (func == "COUNT") {
      if (atSymbol("*")) {
        next();
        e->aggFunc = AstAggFunc::CountStar;
      } else {
        e->aggFunc = AstAggFunc::Count;
        e->args = {parseExpr()};
      }
    } else {
      if (func == "SUM") e->aggFunc = AstAggFunc::Sum;
      else if (func == "MIN") e->aggFunc = AstAggFunc::Min;
      else if (func == "MAX") e->aggFunc = AstAggFunc::Max;
      else e->aggFunc = AstAggFunc::Avg;
      e->args = {parseExpr()};
    }
    expectSymbol(")");
    return e;
  }

  AstExprPtr parsePrimary() {
    SourcePos pos = cur().pos;
    if (cur().kind == TokenKind::NumLit) {
      auto e = std::make_shared<AstExpr>();
      e->kind = AstExpr::Kind::Literal;
      e->pos = pos;
      if (cur().text.find('.') != std::string::npos) {
        e->literal = Value::float64(std::stod(cur().text));
        e->literalType = ScalarType::float64(false);
      } else {
        e->literal = Value::int64(std::stoll(cur().text));
        e->literalType = ScalarType::int64(false);
      }
      next();
      return e;
    }
    if (cur().kind == TokenKind::StringLit) {
      auto e = std::make_shared<AstExpr>();
      e->kind = AstExpr::Kind::Literal;
      e->pos = pos;
      e->literal = Value::string(cur().text);
      e->literalType = ScalarType::string(false);
      next();
      return e;
    }
    if (atKeyword("TRUE") || atKeyword("FALSE")) {
      auto e = std::make_shared<AstExpr>();
      e->kind = AstExpr::Kind::Literal;
      e->pos = pos;
      e->literal = Value::boolean(atKeyword("TRUE"));
      e->literalType = ScalarType::boolean(false);
      next();
      return e;
    }
    if (atKeyword("NULL")) {
      auto e = std::make_shared<AstExpr>();
      e->kind = AstExpr::Kind::Literal;
      e->pos = pos;
      e->literal = Value::null();
      e->literalType = ScalarType::any(true);
      next();
      return e;
    }
    if (atKeyword("CAST")) {
      next();
      expectSymbol("(");
      AstExprPtr arg = parseExpr();
      expectKeyword("AS");
      ScalarType target = parseTypeName();
      expectSymbol(")");
      auto e = std::make_shared<AstExpr>();
      e->kind = AstExpr::Kind::Cast;
      e->pos = pos;
      e->args = {arg};
      e->castTarget = target;
      return e;
    }
    if (atKeyword("COUNT") || atKeyword("SUM") || atKeyword("MIN") ||
        atKeyword("MAX") || atKeyword("AVG")) {
      return parseAggregate();
    }
    if (atSymbol("(")) {
      next();
      AstExprPtr e = parseExpr();
      expectSymbol(")");
      return e;
    }
    if (atIdent()) {
      auto e = std::make_shared<AstExpr>();
      e->kind = AstExpr::Kind::Name;
      e->pos = pos;
      e->nameParts.push_back(expectIdent());
      while (atSymbol(".") &&
             (peek().kind == TokenKind::Ident || peek().kind == TokenKind::QuotedIdent)) {
        next();
        e->nameParts.push_back(expectIdent());
      }
      return e;
    }
    fail("an expression");
  }

  const std::vector<Token>& tokens_;
  size_t pos_ = 0;
};

}  // namespace

Statement parseStatement(const std::vector<Token>& tokens) {
  return Parser(tokens).parse();
}

Statement parseStatement(const std::string& sql) {
  return parseStatement(tokenize(sql));
}

}  // namespace relq::sql
