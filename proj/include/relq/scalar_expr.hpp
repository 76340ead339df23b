#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "relq/types.hpp"
#include "relq/value.hpp"

namespace relq {

enum class OpKind {
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Not,
  Plus, Minus, Times, Divide,
  IsNull, IsNotNull,
  Item,
  Cast,
};

const char* opName(OpKind op);

class ScalarExpr;
using ExprPtr = std::shared_ptr<const ScalarExpr>;

/// Immutable scalar expression: a positional column reference, a typed
/// literal, or an operator call. Column indexes resolve against the
/// concatenated input row types of the enclosing operator.
class ScalarExpr {
 public:
  enum class Variant { ColumnRef, Literal, Call };

  static ExprPtr columnRef(int index);
  static ExprPtr literal(Value value, ScalarType type);
  static ExprPtr call(OpKind op, std::vector<ExprPtr> args);
  static ExprPtr cast(ExprPtr arg, ScalarType target);

  Variant variant() const { return variant_; }
  int index() const { return index_; }
  const Value& value() const { return value_; }
  const ScalarType& literalType() const { return type_; }
  OpKind op() const { return op_; }
  const std::vector<ExprPtr>& args() const { return args_; }
  const ScalarType& castTarget() const { return type_; }

  bool isLiteralTrue() const;
  bool isLiteralFalse() const;

  /// Output type given the input row; total or raises ColumnOutOfRange /
  /// TypeMismatch.
  ScalarType deriveType(const RowType& input) const;

  /// Infix text: $1 > 10, CAST($0 AS STRING), $0['city'].
  std::string render() const;

  /// Canonical text for identity: commutative operators (AND/OR/EQ/NE/
  /// PLUS/TIMES) order their operands by digest so commutatively-equal
  /// predicates collide.
  std::string digest() const;

  void collectColumns(std::vector<int>& out) const;

  /// Rebuilds with every column index mapped; the mapper must be total.
  ExprPtr remapColumns(const std::function<int(int)>& mapper) const;
  ExprPtr shiftColumns(int delta) const;

 private:
  ScalarExpr() = default;

  Variant variant_ = Variant::Literal;
  int index_ = -1;
  Value value_;
  ScalarType type_;  // literal type or cast target
  OpKind op_ = OpKind::Eq;
  std::vector<ExprPtr> args_;
};

namespace ex {

ExprPtr col(int index);
ExprPtr lit(int64_t v);
ExprPtr lit(double v);
ExprPtr lit(const char* v);
ExprPtr lit(const std::string& v);
ExprPtr lit(bool v);
ExprPtr nullLit();
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr ne(ExprPtr a, ExprPtr b);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr le(ExprPtr a, ExprPtr b);
ExprPtr gt(ExprPtr a, ExprPtr b);
ExprPtr ge(ExprPtr a, ExprPtr b);
ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr not_(ExprPtr a);
ExprPtr plus(ExprPtr a, ExprPtr b);
ExprPtr minus(ExprPtr a, ExprPtr b);
ExprPtr times(ExprPtr a, ExprPtr b);
ExprPtr divide(ExprPtr a, ExprPtr b);
ExprPtr isNull(ExprPtr a);
ExprPtr isNotNull(ExprPtr a);
ExprPtr item(ExprPtr container, ExprPtr key);

}  // namespace ex

/// Flattens nested ANDs into conjuncts.
void flattenConjuncts(const ExprPtr& expr, std::vector<ExprPtr>& out);
std::vector<ExprPtr> conjunctsOf(const ExprPtr& expr);

/// ANDs the conjuncts back together, dropping literal TRUE terms.
/// Empty (or all-TRUE) input yields literal TRUE.
ExprPtr makeConjunction(std::vector<ExprPtr> conjuncts);

}  // namespace relq
