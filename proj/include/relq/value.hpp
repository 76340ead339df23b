#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace relq {

class Value;
using ValueList = std::vector<Value>;
// Ordered map keeps rendering and digests deterministic.
using ValueMap = std::map<std::string, Value>;

/// Dynamically typed runtime value: NULL, BOOL, INT64, FLOAT64, STRING,
/// ARRAY or string-keyed MAP. Arrays and maps share their payload.
class Value {
 public:
  enum class Kind { Null, Bool, Int, Float, String, Array, Map };

  Value() = default;  // NULL

  static Value null() { return Value(); }
  static Value boolean(bool v);
  static Value int64(int64_t v);
  static Value float64(double v);
  static Value string(std::string v);
  static Value array(ValueList v);
  static Value map(ValueMap v);

  Kind kind() const;
  bool isNull() const { return kind() == Kind::Null; }
  bool isNumeric() const { return kind() == Kind::Int || kind() == Kind::Float; }

  bool asBool() const;
  int64_t asInt() const;
  /// Numeric access, widening INT64.
  double asFloat() const;
  const std::string& asString() const;
  const ValueList& asArray() const;
  const ValueMap& asMap() const;

  /// Total order for sort keys. NULL ordering is the caller's business
  /// (the comparator never sees NULL from the sort path). Numerics compare
  /// widened; mixing other kinds raises TypeMismatch.
  int compare(const Value& other) const;

  /// Equality used for join/group keys: FLOAT64 compares bitwise with -0.0
  /// normalized to 0.0; NULL equals NULL (grouping semantics); no numeric
  /// cross-kind widening.
  bool keyEquals(const Value& other) const;
  size_t keyHash() const;

  /// SQL-ish literal text: NULL, TRUE, 42, 1.5, 'abc', [1, 2], {'k': 1}.
  /// FLOAT64 always renders with a decimal point or exponent.
  std::string render() const;

  bool operator==(const Value& other) const { return keyEquals(other); }
  bool operator!=(const Value& other) const { return !keyEquals(other); }

 private:
  std::variant<std::monostate, bool, int64_t, double, std::string,
               std::shared_ptr<const ValueList>, std::shared_ptr<const ValueMap>>
      data_;
};

using Row = std::vector<Value>;

std::string renderRow(const Row& row);
std::string renderDouble(double v);

}  // namespace relq
