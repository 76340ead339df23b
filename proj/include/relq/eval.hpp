#pragma once

#include "relq/scalar_expr.hpp"
#include "relq/types.hpp"
#include "relq/value.hpp"

namespace relq {

/// Evaluates a validated scalar expression against one row. Three-valued
/// logic: comparisons with NULL yield NULL, AND/OR are Kleene, ITEM on a
/// missing key or out-of-range index yields NULL. CAST failures yield NULL
/// when the source's static type is ANY and raise TypeMismatch otherwise.
/// The row type is the expression's input schema (needed for that CAST rule).
Value evalExpr(const ScalarExpr& expr, const Row& row, const RowType& inputType);

/// TRUE / FALSE / NULL; anything else raises TypeMismatch.
bool evalPredicate(const ScalarExpr& expr, const Row& row, const RowType& inputType);

Value castValue(const Value& v, const ScalarType& target, bool sourceIsAny);

}  // namespace relq
