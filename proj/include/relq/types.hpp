#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace relq {

/// Column type. ARRAY carries an element type, MAP a value type (keys are
/// strings). ANY is the type of values extracted from schemaless documents
/// before an explicit CAST.
class ScalarType {
 public:
  enum class Kind { Boolean, Int64, Float64, String, Array, Map, Any };

  ScalarType() : kind_(Kind::Any), nullable_(true) {}

  static ScalarType boolean(bool nullable = true);
  static ScalarType int64(bool nullable = true);
  static ScalarType float64(bool nullable = true);
  static ScalarType string(bool nullable = true);
  static ScalarType any(bool nullable = true);
  static ScalarType array(ScalarType element, bool nullable = true);
  static ScalarType map(ScalarType value, bool nullable = true);

  Kind kind() const { return kind_; }
  bool nullable() const { return nullable_; }
  /// Element type of ARRAY / value type of MAP.
  const ScalarType& element() const;

  ScalarType withNullable(bool nullable) const;

  bool isNumeric() const { return kind_ == Kind::Int64 || kind_ == Kind::Float64; }
  bool isAny() const { return kind_ == Kind::Any; }

  /// Type equality ignoring nullability.
  bool sameAs(const ScalarType& other) const;

  /// BOOLEAN, INT64, FLOAT64, STRING, ANY, ARRAY<...>, MAP<...>
  std::string render() const;

  /// Parses SQL/model names: BOOLEAN, BIGINT/INT/INT64, DOUBLE/FLOAT/FLOAT64,
  /// VARCHAR/STRING, ANY. Returns nullopt for unknown names.
  static std::optional<ScalarType> fromName(const std::string& name);

 private:
  Kind kind_;
  bool nullable_;
  std::shared_ptr<const ScalarType> element_;
};

struct RowField {
  std::string name;
  ScalarType type;
};

/// Ordered field list; the field index is the canonical column reference.
/// Names are unique case-insensitively.
class RowType {
 public:
  RowType() = default;
  explicit RowType(std::vector<RowField> fields);

  size_t size() const { return fields_.size(); }
  const RowField& field(size_t i) const { return fields_[i]; }
  const std::vector<RowField>& fields() const { return fields_; }

  /// Case-insensitive lookup; -1 when absent.
  int indexOf(const std::string& name) const;

  bool sameTypes(const RowType& other) const;
  /// Names (case-insensitive) and types.
  bool equivalent(const RowType& other) const;

  /// (a: INT64, b: STRING)
  std::string render() const;

 private:
  std::vector<RowField> fields_;
};

std::string toLower(const std::string& s);
std::string toUpper(const std::string& s);

/// Appends right's fields to left's, renaming clashes "name" -> "name0", ...
/// When rightNullable is set, right-side fields become nullable (LEFT join).
RowType concatRowTypes(const RowType& left, const RowType& right, bool rightNullable);

/// Makes every name unique case-insensitively by appending 0, 1, ...
std::vector<std::string> uniquifyNames(const std::vector<std::string>& names);

}  // namespace relq
