#include "relq/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <set>

#include "relq/error.hpp"

namespace relq {

namespace {

ScalarType makeScalar(ScalarType::Kind kind, bool nullable) {
  switch (kind) {
    case ScalarType::Kind::Boolean: return ScalarType::boolean(nullable);
    case ScalarType::Kind::Int64: return ScalarType::int64(nullable);
    case ScalarType::Kind::Float64: return ScalarType::float64(nullable);
    case ScalarType::Kind::String: return ScalarType::string(nullable);
    default: return ScalarType::any(nullable);
  }
}

}  // namespace

ScalarType ScalarType::boolean(bool nullable) {
  ScalarType t;
  t.kind_ = Kind::Boolean;
  t.nullable_ = nullable;
  return t;
}

ScalarType ScalarType::int64(bool nullable) {
  ScalarType t;
  t.kind_ = Kind::Int64;
  t.nullable_ = nullable;
  return t;
}

ScalarType ScalarType::float64(bool nullable) {
  ScalarType t;
  t.kind_ = Kind::Float64;
  t.nullable_ = nullable;
  return t;
}

ScalarType ScalarType::string(bool nullable) {
  ScalarType t;
  t.kind_ = Kind::String;
  t.nullable_ = nullable;
  return t;
}

ScalarType ScalarType::any(bool nullable) {
  ScalarType t;
  t.kind_ = Kind::Any;
  t.nullable_ = nullable;
  return t;
}

ScalarType ScalarType::array(ScalarType element, bool nullable) {
  ScalarType t;
  t.kind_ = Kind::Array;
  t.nullable_ = nullable;
  t.element_ = std::make_shared<const ScalarType>(std::move(element));
  return t;
}

ScalarType ScalarType::map(ScalarType value, bool nullable) {
  ScalarType t;
  t.kind_ = Kind::Map;
  t.nullable_ = nullable;
  t.element_ = std::make_shared<const ScalarType>(std::move(value));
  return t;
}

const ScalarType& ScalarType::element() const {
  static const ScalarType kAny = ScalarType::any();
  return element_ ? *element_ : kAny;
}

ScalarType ScalarType::withNullable(bool nullable) const {
  ScalarType t = *this;
  t.nullable_ = nullable;
  return t;
}

bool ScalarType::sameAs(const ScalarType& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Array || kind_ == Kind::Map) {
    return element().sameAs(other.element());
  }
  return true;
}

std::string ScalarType::render() const {
  switch (kind_) {
    case Kind::Boolean: return "BOOLEAN";
    case Kind::Int64: return "INT64";
    case Kind::Float64: return "FLOAT64";
    case Kind::String: return "STRING";
    case Kind::Any: return "ANY";
    case Kind::Array: return fmt::format("ARRAY<{}>", element().render());
    case Kind::Map: return fmt::format("MAP<{}>", element().render());
  }
  return "?";
}

std::optional<ScalarType> ScalarType::fromName(const std::string& name) {
  std::string n = toUpper(name);
  if (n == "BOOLEAN" || n == "BOOL") return makeScalar(Kind::Boolean, true);
  if (n == "BIGINT" || n == "INT" || n == "INTEGER" || n == "INT64") {
    return makeScalar(Kind::Int64, true);
  }
  if (n == "DOUBLE" || n == "FLOAT" || n == "FLOAT64" || n == "REAL") {
    return makeScalar(Kind::Float64, true);
  }
  if (n == "VARCHAR" || n == "STRING" || n == "CHAR") {
    return makeScalar(Kind::String, true);
  }
  if (n == "ANY") return makeScalar(Kind::Any, true);
  return std::nullopt;
}

std::string toLower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string toUpper(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return out;
}

RowType::RowType(std::vector<RowField> fields) : fields_(std::move(fields)) {
  std::set<std::string> seen;
  for (const auto& f : fields_) {
    if (!seen.insert(toLower(f.name)).second) {
      raise(ErrorCode::ValidationError,
            fmt::format("duplicate field name '{}' in row type", f.name));
    }
  }
}

int RowType::indexOf(const std::string& name) const {
  std::string n = toLower(name);
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (toLower(fields_[i].name) == n) return static_cast<int>(i);
  }
  return -1;
}

bool RowType::sameTypes(const RowType& other) const {
  if (size() != other.size()) return false;
  for (size_t i = 0; i < size(); ++i) {
    if (!fields_[i].type.sameAs(other.fields_[i].type)) return false;
  }
  return true;
}

bool RowType::equivalent(const RowType& other) const {
  if (!sameTypes(other)) return false;
  for (size_t i = 0; i < size(); ++i) {
    if (toLower(fields_[i].name) != toLower(other.fields_[i].name)) return false;
  }
  return true;
}

std::string RowType::render() const {
  std::string out = "(";
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("{}: {}", fields_[i].name, fields_[i].type.render());
  }
  return out + ")";
}

std::vector<std::string> uniquifyNames(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& name : names) {
    std::string candidate = name;
    int suffix = 0;
    while (seen.count(toLower(candidate)) > 0) {
      candidate = fmt::format("{}{}", name, suffix++);
    }
    seen.insert(toLower(candidate));
    out.push_back(candidate);
  }
  return out;
}

RowType concatRowTypes(const RowType& left, const RowType& right, bool rightNullable) {
  std::vector<std::string> names;
  names.reserve(left.size() + right.size());
  for (const auto& f : left.fields()) names.push_back(f.name);
  for (const auto& f : right.fields()) names.push_back(f.name);
  names = uniquifyNames(names);

  std::vector<RowField> fields;
  fields.reserve(names.size());
  size_t i = 0;
  for (const auto& f : left.fields()) fields.push_back({names[i++], f.type});
  for (const auto& f : right.fields()) {
    ScalarType t = rightNullable ? f.type.withNullable(true) : f.type;
    fields.push_back({names[i++], t});
  }
  return RowType(std::move(fields));
}

}  // namespace relq
