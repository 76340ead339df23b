#include "relq/value.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <functional>

#include "relq/error.hpp"

namespace relq {

Value Value::boolean(bool v) {
  Value r;
  r.data_ = v;
  return r;
}

Value Value::int64(int64_t v) {
  Value r;
  r.data_ = v;
  return r;
}

Value Value::float64(double v) {
  Value r;
  r.data_ = v;
  return r;
}

Value Value::string(std::string v) {
  Value r;
  r.data_ = std::move(v);
  return r;
}

Value Value::array(ValueList v) {
  Value r;
  r.data_ = std::make_shared<const ValueList>(std::move(v));
  return r;
}

Value Value::map(ValueMap v) {
  Value r;
  r.data_ = std::make_shared<const ValueMap>(std::move(v));
  return r;
}

Value::Kind Value::kind() const {
  switch (data_.index()) {
    case 0: return Kind::Null;
    case 1: return Kind::Bool;
    case 2: return Kind::Int;
    case 3: return Kind::Float;
    case 4: return Kind::String;
    case 5: return Kind::Array;
    default: return Kind::Map;
  }
}

bool Value::asBool() const { return std::get<bool>(data_); }
int64_t Value::asInt() const { return std::get<int64_t>(data_); }

double Value::asFloat() const {
  if (kind() == Kind::Int) return static_cast<double>(std::get<int64_t>(data_));
  return std::get<double>(data_);
}

const std::string& Value::asString() const { return std::get<std::string>(data_); }
const ValueList& Value::asArray() const {
  return *std::get<std::shared_ptr<const ValueList>>(data_);
}
const ValueMap& Value::asMap() const {
  return *std::get<std::shared_ptr<const ValueMap>>(data_);
}

namespace {

// -0.0 -> 0.0 so grouping treats them as one key; NaN kept as-is.
double normalizeDouble(double v) { return v == 0.0 ? 0.0 : v; }

int compareDoubles(double a, double b) {
  // NaN sorts after everything and equals itself, keeping sorts total.
  bool na = std::isnan(a), nb = std::isnan(b);
  if (na || nb) return na == nb ? 0 : (na ? 1 : -1);
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

}  // namespace

int Value::compare(const Value& other) const {
  Kind a = kind(), b = other.kind();
  if (a == Kind::Null || b == Kind::Null) {
    // Callers order NULLs themselves; make this total anyway.
    if (a == b) return 0;
    return a == Kind::Null ? -1 : 1;
  }
  if (isNumeric() && other.isNumeric()) {
    if (a == Kind::Int && b == Kind::Int) {
      int64_t x = asInt(), y = other.asInt();
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    return compareDoubles(asFloat(), other.asFloat());
  }
  if (a != b) {
    raise(ErrorCode::TypeMismatch,
          fmt::format("cannot compare {} with {}", render(), other.render()));
  }
  switch (a) {
    case Kind::Bool: {
      int x = asBool() ? 1 : 0, y = other.asBool() ? 1 : 0;
      return x - y;
    }
    case Kind::String: {
      int c = asString().compare(other.asString());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Array: {
      const auto& x = asArray();
      const auto& y = other.asArray();
      size_t n = std::min(x.size(), y.size());
      for (size_t i = 0; i < n; ++i) {
        int c = x[i].compare(y[i]);
        if (c != 0) return c;
      }
      return x.size() < y.size() ? -1 : (x.size() > y.size() ? 1 : 0);
    }
    case Kind::Map: {
      const auto& x = asMap();
      const auto& y = other.asMap();
      auto xi = x.begin();
      auto yi = y.begin();
      for (; xi != x.end() && yi != y.end(); ++xi, ++yi) {
        int c = xi->first.compare(yi->first);
        if (c != 0) return c < 0 ? -1 : 1;
        c = xi->second.compare(yi->second);
        if (c != 0) return c;
      }
      return x.size() < y.size() ? -1 : (x.size() > y.size() ? 1 : 0);
    }
    default: return 0;  // unreachable
  }
}

bool Value::keyEquals(const Value& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Null: return true;
    case Kind::Bool: return asBool() == other.asBool();
    case Kind::Int: return asInt() == other.asInt();
    case Kind::Float:
      return std::bit_cast<uint64_t>(normalizeDouble(asFloat())) ==
             std::bit_cast<uint64_t>(normalizeDouble(other.asFloat()));
    case Kind::String: return asString() == other.asString();
    case Kind::Array: {
      const auto& x = asArray();
      const auto& y = other.asArray();
      if (x.size() != y.size()) return false;
      for (size_t i = 0; i < x.size(); ++i) {
        if (!x[i].keyEquals(y[i])) return false;
      }
      return true;
    }
    case Kind::Map: {
      const auto& x = asMap();
      const auto& y = other.asMap();
      if (x.size() != y.size()) return false;
      auto yi = y.begin();
      for (auto xi = x.begin(); xi != x.end(); ++xi, ++yi) {
        if (xi->first != yi->first || !xi->second.keyEquals(yi->second)) return false;
      }
      return true;
    }
  }
  return false;
}

size_t Value::keyHash() const {
  auto combine = [](size_t seed, size_t h) {
    return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  };
  switch (kind()) {
    case Kind::Null: return 0x6e756c6c;
    case Kind::Bool: return asBool() ? 0x74727565 : 0x66616c73;
    case Kind::Int: return std::hash<int64_t>{}(asInt());
    case Kind::Float:
      return std::hash<uint64_t>{}(std::bit_cast<uint64_t>(normalizeDouble(asFloat())));
    case Kind::String: return std::hash<std::string>{}(asString());
    case Kind::Array: {
      size_t h = 0xa55a;
      for (const auto& v : asArray()) h = combine(h, v.keyHash());
      return h;
    }
    case Kind::Map: {
      size_t h = 0x3c3c;
      for (const auto& [k, v] : asMap()) {
        h = combine(h, std::hash<std::string>{}(k));
        h = combine(h, v.keyHash());
      }
      return h;
    }
  }
  return 0;
}

std::string renderDouble(double v) {
  std::string s = fmt::format("{}", v);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string Value::render() const {
  switch (kind()) {
    case Kind::Null: return "NULL";
    case Kind::Bool: return asBool() ? "TRUE" : "FALSE";
    case Kind::Int: return fmt::format("{}", asInt());
    case Kind::Float: return renderDouble(asFloat());
    case Kind::String: {
      std::string out = "'";
      for (char c : asString()) {
        out += c;
        if (c == '\'') out += '\'';
      }
      out += '\'';
      return out;
    }
    case Kind::Array: {
      std::string out = "[";
      bool first = true;
      for (const auto& v : asArray()) {
        if (!first) out += ", ";
        first = false;
        out += v.render();
      }
      return out + "]";
    }
    case Kind::Map: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, v] : asMap()) {
        if (!first) out += ", ";
        first = false;
        out += fmt::format("'{}': {}", k, v.render());
      }
      return out + "}";
    }
  }
  return "?";
}

std::string renderRow(const Row& row) {
  std::string out = "(";
  for (size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ", ";
    out += row[i].render();
  }
  return out + ")";
}

}  // namespace relq
