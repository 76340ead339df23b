#include "relq/scalar_expr.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "relq/error.hpp"

namespace relq {

const char* opName(OpKind op) {
  switch (op) {
    case OpKind::Eq: return "=";
    case OpKind::Ne: return "<>";
    case OpKind::Lt: return "<";
    case OpKind::Le: return "<=";
    case OpKind::Gt: return ">";
    case OpKind::Ge: return ">=";
    case OpKind::And: return "AND";
    case OpKind::Or: return "OR";
    case OpKind::Not: return "NOT";
    case OpKind::Plus: return "+";
    case OpKind::Minus: return "-";
    case OpKind::Times: return "*";
    case OpKind::Divide: return "/";
    case OpKind::IsNull: return "IS NULL";
    case OpKind::IsNotNull: return "IS NOT NULL";
    case OpKind::Item: return "ITEM";
    case OpKind::Cast: return "CAST";
  }
  return "?";
}

namespace {

size_t expectedArity(OpKind op) {
  switch (op) {
    case OpKind::Not:
    case OpKind::IsNull:
    case OpKind::IsNotNull:
    case OpKind::Cast:
      return 1;
    default:
      return 2;
  }
}

bool isComparison(OpKind op) {
  switch (op) {
    case OpKind::Eq:
    case OpKind::Ne:
    case OpKind::Lt:
    case OpKind::Le:
    case OpKind::Gt:
    case OpKind::Ge:
      return true;
    default:
      return false;
  }
}

bool isArithmetic(OpKind op) {
  switch (op) {
    case OpKind::Plus:
    case OpKind::Minus:
    case OpKind::Times:
    case OpKind::Divide:
      return true;
    default:
      return false;
  }
}

// Operand order in digests is irrelevant for these.
bool isCommutative(OpKind op) {
  switch (op) {
    case OpKind::And:
    case OpKind::Or:
    case OpKind::Eq:
    case OpKind::Ne:
    case OpKind::Plus:
    case OpKind::Times:
      return true;
    default:
      return false;
  }
}

int precedence(OpKind op) {
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
    case OpKind::Item: return 8;
    case OpKind::Cast: return 9;
  }
  return 9;
}

}  // namespace

ExprPtr ScalarExpr::columnRef(int index) {
  if (index < 0) {
    raise(ErrorCode::ColumnOutOfRange, fmt::format("negative column index {}", index));
  }
  auto e = std::shared_ptr<ScalarExpr>(new ScalarExpr());
  e->variant_ = Variant::ColumnRef;
  e->index_ = index;
  return e;
}

ExprPtr ScalarExpr::literal(Value value, ScalarType type) {
  auto e = std::shared_ptr<ScalarExpr>(new ScalarExpr());
  e->variant_ = Variant::Literal;
  e->value_ = std::move(value);
  e->type_ = std::move(type);
  return e;
}

ExprPtr ScalarExpr::call(OpKind op, std::vector<ExprPtr> args) {
  if (op == OpKind::Cast) {
    raise(ErrorCode::ValidationError, "use ScalarExpr::cast for CAST");
  }
  if (args.size() != expectedArity(op)) {
    raise(ErrorCode::ArityError,
          fmt::format("operator {} expects {} argument(s), got {}", opName(op),
                      expectedArity(op), args.size()));
  }
  auto e = std::shared_ptr<ScalarExpr>(new ScalarExpr());
  e->variant_ = Variant::Call;
  e->op_ = op;
  e->args_ = std::move(args);
  return e;
}

ExprPtr ScalarExpr::cast(ExprPtr arg, ScalarType target) {
  auto e = std::shared_ptr<ScalarExpr>(new ScalarExpr());
  e->variant_ = Variant::Call;
  e->op_ = OpKind::Cast;
  e->args_ = {std::move(arg)};
  e->type_ = std::move(target);
  return e;
}

bool ScalarExpr::isLiteralTrue() const {
  return variant_ == Variant::Literal && value_.kind() == Value::Kind::Bool &&
         value_.asBool();
}

bool ScalarExpr::isLiteralFalse() const {
  return variant_ == Variant::Literal && value_.kind() == Value::Kind::Bool &&
         !value_.asBool();
}

ScalarType ScalarExpr::deriveType(const RowType& input) const {
  switch (variant_) {
    case Variant::ColumnRef:
      if (index_ < 0 || static_cast<size_t>(index_) >= input.size()) {
        raise(ErrorCode::ColumnOutOfRange,
              fmt::format("column ${} out of range for row of {} field(s)",
                          index_, input.size()));
      }
      return input.field(index_).type;
    case Variant::Literal:
      return type_;
    case Variant::Call:
      break;
  }

  if (op_ == OpKind::Cast) {
    args_[0]->deriveType(input);  // argument must itself be valid
    return type_.withNullable(true);
  }

  std::vector<ScalarType> argTypes;
  argTypes.reserve(args_.size());
  for (const auto& a : args_) argTypes.push_back(a->deriveType(input));
  bool anyNullable = false;
  for (const auto& t : argTypes) anyNullable = anyNullable || t.nullable();

  if (isComparison(op_)) {
    const auto& a = argTypes[0];
    const auto& b = argTypes[1];
    bool ok = a.isAny() || b.isAny() || (a.isNumeric() && b.isNumeric()) ||
              a.sameAs(b);
    if (!ok) {
      raise(ErrorCode::TypeMismatch,
            fmt::format("cannot compare {} with {}", a.render(), b.render()));
    }
    return ScalarType::boolean(anyNullable || a.isAny() || b.isAny());
  }
  if (isArithmetic(op_)) {
    const auto& a = argTypes[0];
    const auto& b = argTypes[1];
    if (a.isAny() || b.isAny()) return ScalarType::any(true);
    if (!a.isNumeric() || !b.isNumeric()) {
      raise(ErrorCode::TypeMismatch,
            fmt::format("operator {} requires numeric arguments, got {} and {}",
                        opName(op_), a.render(), b.render()));
    }
    bool isFloat = a.kind() == ScalarType::Kind::Float64 ||
                   b.kind() == ScalarType::Kind::Float64;
    return isFloat ? ScalarType::float64(anyNullable) : ScalarType::int64(anyNullable);
  }

  switch (op_) {
    case OpKind::And:
    case OpKind::Or: {
      for (const auto& t : argTypes) {
        if (t.kind() != ScalarType::Kind::Boolean && !t.isAny()) {
          raise(ErrorCode::TypeMismatch,
                fmt::format("{} requires BOOLEAN arguments, got {}", opName(op_),
                            t.render()));
        }
      }
      return ScalarType::boolean(anyNullable);
    }
    case OpKind::Not: {
      if (argTypes[0].kind() != ScalarType::Kind::Boolean && !argTypes[0].isAny()) {
        raise(ErrorCode::TypeMismatch,
              fmt::format("NOT requires a BOOLEAN argument, got {}",
                          argTypes[0].render()));
      }
      return ScalarType::boolean(anyNullable);
    }
    case OpKind::IsNull:
    case OpKind::IsNotNull:
      return ScalarType::boolean(false);
    case OpKind::Item: {
      const auto& container = argTypes[0];
      const auto& key = argTypes[1];
      switch (container.kind()) {
        case ScalarType::Kind::Map:
          if (key.kind() != ScalarType::Kind::String && !key.isAny()) {
            raise(ErrorCode::TypeMismatch, "map access requires a STRING key");
          }
          return container.element().withNullable(true);
        case ScalarType::Kind::Array:
          if (key.kind() != ScalarType::Kind::Int64 && !key.isAny()) {
            raise(ErrorCode::TypeMismatch, "array access requires an INT64 index");
          }
          return container.element().withNullable(true);
        case ScalarType::Kind::Any:
          if (key.kind() != ScalarType::Kind::String &&
              key.kind() != ScalarType::Kind::Int64 && !key.isAny()) {
            raise(ErrorCode::TypeMismatch,
                  "item access requires a STRING or INT64 key");
          }
          return ScalarType::any(true);
        default:
          raise(ErrorCode::TypeMismatch,
                fmt::format("[] requires a MAP, ARRAY or ANY operand, got {}",
                            container.render()));
      }
    }
    default:
      break;
  }
  raise(ErrorCode::TypeMismatch, fmt::format("cannot type operator {}", opName(op_)));
}

namespace {

std::string renderImpl(const ScalarExpr& e, bool canonical);

std::string renderChild(const ScalarExpr& parent, const ScalarExpr& child,
                        bool canonical, bool rightSide) {
  std::string text = renderImpl(child, canonical);
  if (child.variant() != ScalarExpr::Variant::Call) return text;
  OpKind po = parent.op();
  OpKind co = child.op();
  if (co == OpKind::Cast || co == OpKind::Item) return text;
  int pp = precedence(po);
  int cp = precedence(co);
  bool needParens = cp < pp;
  if (!needParens && cp == pp && rightSide &&
      (po == OpKind::Minus || po == OpKind::Divide)) {
    needParens = true;
  }
  // NOT/IS arguments of equal precedence read badly without parens.
  if (!needParens && (po == OpKind::Not || po == OpKind::IsNull ||
                      po == OpKind::IsNotNull) &&
      cp <= pp) {
    needParens = true;
  }
  return needParens ? "(" + text + ")" : text;
}

std::string renderImpl(const ScalarExpr& e, bool canonical) {
  switch (e.variant()) {
    case ScalarExpr::Variant::ColumnRef:
      return fmt::format("${}", e.index());
    case ScalarExpr::Variant::Literal:
      return e.value().render();
    case ScalarExpr::Variant::Call:
      break;
  }
  OpKind op = e.op();
  switch (op) {
    case OpKind::Cast:
      return fmt::format("CAST({} AS {})", renderImpl(*e.args()[0], canonical),
                         e.castTarget().render());
    case OpKind::Item:
      return fmt::format("{}[{}]", renderChild(e, *e.args()[0], canonical, false),
                         renderImpl(*e.args()[1], canonical));
    case OpKind::IsNull:
    case OpKind::IsNotNull:
      return fmt::format("{} {}", renderChild(e, *e.args()[0], canonical, false),
                         opName(op));
    case OpKind::Not:
      return fmt::format("NOT {}", renderChild(e, *e.args()[0], canonical, false));
    default: {
      std::string left = renderChild(e, *e.args()[0], canonical, false);
      std::string right = renderChild(e, *e.args()[1], canonical, true);
      if (canonical && isCommutative(op) && right < left) std::swap(left, right);
      return fmt::format("{} {} {}", left, opName(op), right);
    }
  }
}

}  // namespace

std::string ScalarExpr::render() const { return renderImpl(*this, false); }

std::string ScalarExpr::digest() const {
  if (variant_ == Variant::Call && (op_ == OpKind::And || op_ == OpKind::Or)) {
    // Flatten same-operator chains and sort, so (a AND b) AND c == a AND (b AND c).
    std::vector<std::string> parts;
    std::vector<const ScalarExpr*> stack{this};
    while (!stack.empty()) {
      const ScalarExpr* cur = stack.back();
      stack.pop_back();
      if (cur->variant_ == Variant::Call && cur->op_ == op_) {
        for (const auto& a : cur->args_) stack.push_back(a.get());
      } else {
        parts.push_back(cur->digest());
      }
    }
    std::sort(parts.begin(), parts.end());
    return fmt::format("{}({})", op_ == OpKind::And ? "AND" : "OR",
                       fmt::join(parts, ", "));
  }
  return renderImpl(*this, true);
}

void ScalarExpr::collectColumns(std::vector<int>& out) const {
  switch (variant_) {
    case Variant::ColumnRef:
      out.push_back(index_);
      return;
    case Variant::Literal:
      return;
    case Variant::Call:
      for (const auto& a : args_) a->collectColumns(out);
      return;
  }
}

ExprPtr ScalarExpr::remapColumns(const std::function<int(int)>& mapper) const {
  switch (variant_) {
    case Variant::ColumnRef:
      return columnRef(mapper(index_));
    case Variant::Literal:
      return literal(value_, type_);
    case Variant::Call: {
      std::vector<ExprPtr> newArgs;
      newArgs.reserve(args_.size());
      for (const auto& a : args_) newArgs.push_back(a->remapColumns(mapper));
      if (op_ == OpKind::Cast) return cast(std::move(newArgs[0]), type_);
      return call(op_, std::move(newArgs));
    }
  }
  return nullptr;
}

ExprPtr ScalarExpr::shiftColumns(int delta) const {
  return remapColumns([delta](int i) { return i + delta; });
}

namespace ex {

ExprPtr col(int index) { return ScalarExpr::columnRef(index); }
ExprPtr lit(int64_t v) { return ScalarExpr::literal(Value::int64(v), ScalarType::int64(false)); }
ExprPtr lit(double v) { return ScalarExpr::literal(Value::float64(v), ScalarType::float64(false)); }
ExprPtr lit(const char* v) { return lit(std::string(v)); }
ExprPtr lit(const std::string& v) {
  return ScalarExpr::literal(Value::string(v), ScalarType::string(false));
}
ExprPtr lit(bool v) { return ScalarExpr::literal(Value::boolean(v), ScalarType::boolean(false)); }
ExprPtr nullLit() { return ScalarExpr::literal(Value::null(), ScalarType::any(true)); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Eq, {std::move(a), std::move(b)}); }
ExprPtr ne(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Ne, {std::move(a), std::move(b)}); }
ExprPtr lt(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Lt, {std::move(a), std::move(b)}); }
ExprPtr le(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Le, {std::move(a), std::move(b)}); }
ExprPtr gt(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Gt, {std::move(a), std::move(b)}); }
ExprPtr ge(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Ge, {std::move(a), std::move(b)}); }
ExprPtr and_(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::And, {std::move(a), std::move(b)}); }
ExprPtr or_(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Or, {std::move(a), std::move(b)}); }
ExprPtr not_(ExprPtr a) { return ScalarExpr::call(OpKind::Not, {std::move(a)}); }
ExprPtr plus(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Plus, {std::move(a), std::move(b)}); }
ExprPtr minus(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Minus, {std::move(a), std::move(b)}); }
ExprPtr times(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Times, {std::move(a), std::move(b)}); }
ExprPtr divide(ExprPtr a, ExprPtr b) { return ScalarExpr::call(OpKind::Divide, {std::move(a), std::move(b)}); }
ExprPtr isNull(ExprPtr a) { return ScalarExpr::call(OpKind::IsNull, {std::move(a)}); }
ExprPtr isNotNull(ExprPtr a) { return ScalarExpr::call(OpKind::IsNotNull, {std::move(a)}); }
ExprPtr item(ExprPtr container, ExprPtr key) {
  return ScalarExpr::call(OpKind::Item, {std::move(container), std::move(key)});
}

}  // namespace ex

void flattenConjuncts(const ExprPtr& expr, std::vector<ExprPtr>& out) {
  if (expr->variant() == ScalarExpr::Variant::Call && expr->op() == OpKind::And) {
    for (const auto& a : expr->args()) flattenConjuncts(a, out);
    return;
  }
  out.push_back(expr);
}

std::vector<ExprPtr> conjunctsOf(const ExprPtr& expr) {
  std::vector<ExprPtr> out;
  flattenConjuncts(expr, out);
  return out;
}

ExprPtr makeConjunction(std::vector<ExprPtr> conjuncts) {
  std::vector<ExprPtr> kept;
  for (auto& c : conjuncts) {
    if (c && !c->isLiteralTrue()) kept.push_back(std::move(c));
  }
  if (kept.empty()) return ex::lit(true);
  ExprPtr result = kept[0];
  for (size_t i = 1; i < kept.size(); ++i) {
    result = ex::and_(result, kept[i]);
  }
  return result;
}

}  // namespace relq
