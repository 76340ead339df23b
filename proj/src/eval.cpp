#include "relq/eval.hpp"

#include <fmt/format.h>

#include <cmath>

#include "relq/error.hpp"

namespace relq {

namespace {

[[noreturn]] void typeError(const std::string& msg) {
  raise(ErrorCode::TypeMismatch, msg);
}

Value compareOp(OpKind op, const Value& a, const Value& b) {
  if (a.isNull() || b.isNull()) return Value::null();
  int c = a.compare(b);
  bool r = false;
  switch (op) {
    case OpKind::Eq: r = c == 0; break;
    case OpKind::Ne: r = c != 0; break;
    case OpKind::Lt: r = c < 0; break;
    case OpKind::Le: r = c <= 0; break;
    case OpKind::Gt: r = c > 0; break;
    case OpKind::Ge: r = c >= 0; break;
    default: typeError("not a comparison");
  }
  return Value::boolean(r);
}

Value arithmeticOp(OpKind op, const Value& a, const Value& b) {
  if (a.isNull() || b.isNull()) return Value::null();
  if (!a.isNumeric() || !b.isNumeric()) {
    typeError(fmt::format("operator {} requires numbers, got {} and {}", opName(op),
                          a.render(), b.render()));
  }
  bool intOp = a.kind() == Value::Kind::Int && b.kind() == Value::Kind::Int;
  if (op == OpKind::Divide) {
    if (intOp) {
      int64_t d = b.asInt();
      if (d == 0) raise(ErrorCode::DivisionByZero, "integer division by zero");
      return Value::int64(a.asInt() / d);
    }
    double d = b.asFloat();
    if (d == 0.0) raise(ErrorCode::DivisionByZero, "division by zero");
    return Value::float64(a.asFloat() / d);
  }
  if (intOp) {
    int64_t x = a.asInt(), y = b.asInt();
    switch (op) {
      case OpKind::Plus: return Value::int64(x + y);
      case OpKind::Minus: return Value::int64(x - y);
      case OpKind::Times: return Value::int64(x * y);
      default: break;
    }
  }
  double x = a.asFloat(), y = b.asFloat();
  switch (op) {
    case OpKind::Plus: return Value::float64(x + y);
    case OpKind::Minus: return Value::float64(x - y);
    case OpKind::Times: return Value::float64(x * y);
    default: break;
  }
  typeError("not an arithmetic operator");
}

Value itemOp(const Value& container, const Value& key) {
  if (container.isNull() || key.isNull()) return Value::null();
  switch (container.kind()) {
    case Value::Kind::Map: {
      if (key.kind() != Value::Kind::String) {
        typeError(fmt::format("map access requires a string key, got {}", key.render()));
      }
      const auto& m = container.asMap();
      auto it = m.find(key.asString());
      return it == m.end() ? Value::null() : it->second;
    }
    case Value::Kind::Array: {
      if (key.kind() != Value::Kind::Int) {
        typeError(fmt::format("array access requires an integer index, got {}",
                              key.render()));
      }
      const auto& xs = container.asArray();
      int64_t i = key.asInt();
      if (i < 0 || static_cast<size_t>(i) >= xs.size()) return Value::null();
      return xs[static_cast<size_t>(i)];
    }
    default:
      // Schemaless access on a scalar behaves like a missing key.
      return Value::null();
  }
}

std::optional<bool> toTristate(const Value& v) {
  if (v.isNull()) return std::nullopt;
  if (v.kind() != Value::Kind::Bool) {
    typeError(fmt::format("expected BOOLEAN, got {}", v.render()));
  }
  return v.asBool();
}

Value fromTristate(std::optional<bool> b) {
  return b ? Value::boolean(*b) : Value::null();
}

}  // namespace

Value castValue(const Value& v, const ScalarType& target, bool sourceIsAny) {
  if (v.isNull()) return Value::null();
  auto fail = [&]() -> Value {
    if (sourceIsAny) return Value::null();
    typeError(fmt::format("cannot cast {} to {}", v.render(), target.render()));
  };
  switch (target.kind()) {
    case ScalarType::Kind::Boolean:
      switch (v.kind()) {
        case Value::Kind::Bool: return v;
        case Value::Kind::String: {
          std::string s = toLower(v.asString());
          if (s == "true") return Value::boolean(true);
          if (s == "false") return Value::boolean(false);
          return fail();
        }
        default: return fail();
      }
    case ScalarType::Kind::Int64:
      switch (v.kind()) {
        case Value::Kind::Int: return v;
        case Value::Kind::Float: return Value::int64(static_cast<int64_t>(v.asFloat()));
        case Value::Kind::Bool: return Value::int64(v.asBool() ? 1 : 0);
        case Value::Kind::String: {
          try {
            size_t used = 0;
            int64_t parsed = std::stoll(v.asString(), &used);
            if (used != v.asString().size()) return fail();
            return Value::int64(parsed);
          } catch (const std::exception&) {
            return fail();
          }
        }
        default: return fail();
      }
    case ScalarType::Kind::Float64:
      switch (v.kind()) {
        case Value::Kind::Int: return Value::float64(static_cast<double>(v.asInt()));
        case Value::Kind::Float: return v;
        case Value::Kind::String: {
          try {
            size_t used = 0;
            double parsed = std::stod(v.asString(), &used);
            if (used != v.asString().size()) return fail();
            return Value::float64(parsed);
          } catch (const std::exception&) {
            return fail();
          }
        }
        default: return fail();
      }
    case ScalarType::Kind::String:
      switch (v.kind()) {
        case Value::Kind::String: return v;
        case Value::Kind::Int: return Value::string(fmt::format("{}", v.asInt()));
        case Value::Kind::Float: return Value::string(renderDouble(v.asFloat()));
        case Value::Kind::Bool: return Value::string(v.asBool() ? "true" : "false");
        default: return fail();
      }
    case ScalarType::Kind::Any:
      return v;
    case ScalarType::Kind::Array:
      return v.kind() == Value::Kind::Array ? v : fail();
    case ScalarType::Kind::Map:
      return v.kind() == Value::Kind::Map ? v : fail();
  }
  return fail();
}

Value evalExpr(const ScalarExpr& expr, const Row& row, const RowType& inputType) {
  switch (expr.variant()) {
    case ScalarExpr::Variant::ColumnRef: {
      int i = expr.index();
      if (i < 0 || static_cast<size_t>(i) >= row.size()) {
        raise(ErrorCode::ColumnOutOfRange,
              fmt::format("column ${} out of range at evaluation", i));
      }
      return row[static_cast<size_t>(i)];
    }
    case ScalarExpr::Variant::Literal:
      return expr.value();
    case ScalarExpr::Variant::Call:
      break;
  }

  OpKind op = expr.op();
  switch (op) {
    case OpKind::And: {
      auto a = toTristate(evalExpr(*expr.args()[0], row, inputType));
      if (a.has_value() && !*a) return Value::boolean(false);
      auto b = toTristate(evalExpr(*expr.args()[1], row, inputType));
      if (b.has_value() && !*b) return Value::boolean(false);
      if (a.has_value() && b.has_value()) return Value::boolean(true);
      return Value::null();
    }
    case OpKind::Or: {
      auto a = toTristate(evalExpr(*expr.args()[0], row, inputType));
      if (a.has_value() && *a) return Value::boolean(true);
      auto b = toTristate(evalExpr(*expr.args()[1], row, inputType));
      if (b.has_value() && *b) return Value::boolean(true);
      if (a.has_value() && b.has_value()) return Value::boolean(false);
      return Value::null();
    }
    case OpKind::Not: {
      auto a = toTristate(evalExpr(*expr.args()[0], row, inputType));
      return fromTristate(a ? std::optional<bool>(!*a) : std::nullopt);
    }
    case OpKind::IsNull:
      return Value::boolean(evalExpr(*expr.args()[0], row, inputType).isNull());
    case OpKind::IsNotNull:
      return Value::boolean(!evalExpr(*expr.args()[0], row, inputType).isNull());
    case OpKind::Cast: {
      Value v = evalExpr(*expr.args()[0], row, inputType);
      bool sourceIsAny = expr.args()[0]->deriveType(inputType).isAny();
      return castValue(v, expr.castTarget(), sourceIsAny);
    }
    case OpKind::Item: {
      Value c = evalExpr(*expr.args()[0], row, inputType);
      Value k = evalExpr(*expr.args()[1], row, inputType);
      return itemOp(c, k);
    }
    case OpKind::Eq:
    case OpKind::Ne:
    case OpKind::Lt:
    case OpKind::Le:
    case OpKind::Gt:
    case OpKind::Ge:
      return compareOp(op, evalExpr(*expr.args()[0], row, inputType),
                       evalExpr(*expr.args()[1], row, inputType));
    case OpKind::Plus:
    case OpKind::Minus:
    case OpKind::Times:
    case OpKind::Divide:
      return arithmeticOp(op, evalExpr(*expr.args()[0], row, inputType),
                          evalExpr(*expr.args()[1], row, inputType));
  }
  typeError("unhandled operator");
}

bool evalPredicate(const ScalarExpr& expr, const Row& row, const RowType& inputType) {
  Value v = evalExpr(expr, row, inputType);
  if (v.isNull()) return false;
  if (v.kind() != Value::Kind::Bool) {
    typeError(fmt::format("predicate evaluated to non-boolean {}", v.render()));
  }
  return v.asBool();
}

}  // namespace relq
