#include "relq/adapters/csv_adapter.hpp"

#include <fmt/format.h>

#include <fstream>
#include <optional>

#include "relq/error.hpp"

namespace relq {

namespace {

struct CsvField {
  std::optional<std::string> text;  // nullopt = unquoted empty = NULL
  int col = 0;
};

// One line, minimal RFC quoting: fields may be wrapped in double quotes with
// "" escaping; separator is a comma.
std::vector<CsvField> splitCsvLine(const std::string& line, int lineNo,
                                   const std::string& where) {
  std::vector<CsvField> fields;
  size_t i = 0;
  int col = 1;
  while (true) {
    CsvField field;
    field.col = col;
    if (i < line.size() && line[i] == '"') {
      std::string text;
      i++;
      col++;
      while (true) {
        if (i >= line.size()) {
          raise(ErrorCode::ParseError,
                fmt::format("unterminated quoted field in {} line {}", where, lineNo));
        }
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            text += '"';
            i += 2;
            col += 2;
            continue;
          }
          i++;
          col++;
          break;
        }
        text += line[i++];
        col++;
      }
      field.text = text;
    } else {
      std::string text;
      while (i < line.size() && line[i] != ',') {
        text += line[i++];
        col++;
      }
      if (!text.empty()) field.text = text;
    }
    fields.push_back(std::move(field));
    if (i >= line.size()) break;
    if (line[i] != ',') {
      raise(ErrorCode::ParseError,
            fmt::format("malformed field in {} line {} col {}", where, lineNo, col));
    }
    i++;  // comma
    col++;
  }
  return fields;
}

Value parseField(const CsvField& field, const ScalarType& type, int lineNo,
                 const std::string& fieldName, const std::string& where) {
  if (!field.text) return Value::null();
  const std::string& text = *field.text;
  auto fail = [&]() -> Value {
    raise(ErrorCode::ParseError,
          fmt::format("cannot parse '{}' as {} for field '{}' in {} (line {}, col {})",
                      text, type.render(), fieldName, where, lineNo, field.col));
  };
  switch (type.kind()) {
    case ScalarType::Kind::Int64: {
      try {
        size_t used = 0;
        int64_t v = std::stoll(text, &used);
        if (used != text.size()) return fail();
        return Value::int64(v);
      } catch (const std::exception&) {
        return fail();
      }
    }
    case ScalarType::Kind::Float64: {
      try {
        size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) return fail();
        return Value::float64(v);
      } catch (const std::exception&) {
        return fail();
      }
    }
    case ScalarType::Kind::Boolean: {
      std::string lower = toLower(text);
      if (lower == "true") return Value::boolean(true);
      if (lower == "false") return Value::boolean(false);
      return fail();
    }
    case ScalarType::Kind::String:
      return Value::string(text);
    default:
      return fail();  // ARRAY/MAP/ANY never appear in csv schemas
  }
}

}  // namespace

std::vector<Row> parseCsvFile(const std::filesystem::path& path, const RowType& rowType,
                              const std::vector<int>& columns) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::MissingFile, fmt::format("cannot open '{}'", path.string()));
  }
  std::string where = path.filename().string();
  std::string line;
  int lineNo = 0;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    lineNo++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::vector<CsvField> fields = splitCsvLine(line, lineNo, where);
    if (lineNo == 1) {
      // header must match the declared field names, in order
      if (fields.size() != rowType.size()) {
        raise(ErrorCode::HeaderMismatch,
              fmt::format("{} declares {} columns but header has {} fields", where,
                          rowType.size(), fields.size()));
      }
      for (size_t i = 0; i < fields.size(); ++i) {
        std::string got = fields[i].text.value_or("");
        if (toLower(got) != toLower(rowType.field(i).name)) {
          raise(ErrorCode::HeaderMismatch,
                fmt::format("{} header field {} is '{}', expected '{}'", where, i, got,
                            rowType.field(i).name));
        }
      }
      continue;
    }
    if (fields.size() != rowType.size()) {
      raise(ErrorCode::ParseError,
            fmt::format("{} line {} has {} fields, expected {}", where, lineNo,
                        fields.size(), rowType.size()));
    }
    Row row;
    if (columns.empty()) {
      row.reserve(rowType.size());
      for (size_t i = 0; i < fields.size(); ++i) {
        row.push_back(
            parseField(fields[i], rowType.field(i).type, lineNo,
                       rowType.field(i).name, where));
      }
    } else {
      row.reserve(columns.size());
      for (int c : columns) {
        row.push_back(parseField(fields[c], rowType.field(c).type, lineNo,
                                 rowType.field(c).name, where));
      }
    }
    rows.push_back(std::move(row));
  }
  if (lineNo == 0) {
    raise(ErrorCode::HeaderMismatch, fmt::format("{} is empty (no header row)", where));
  }
  return rows;
}

CsvTable::CsvTable(std::string schemaName, std::string name, RowType rowType,
                   Statistics stats, Collation collation, Capabilities caps,
                   std::filesystem::path path)
    : Table(std::move(schemaName), std::move(name), std::move(rowType),
            std::move(stats), std::move(collation), caps),
      path_(std::move(path)) {}

std::vector<Row> CsvTable::scanAll() const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    scanRequests_.push_back({});
  }
  return parseCsvFile(path_, rowType(), {});
}

std::vector<Row> CsvTable::scan(const std::vector<int>& columns) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    scanRequests_.push_back(columns);
  }
  return parseCsvFile(path_, rowType(), columns);
}

std::vector<std::vector<int>> CsvTable::scanRequests() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return scanRequests_;
}

std::string csvEscapeField(const std::string& field) {
  bool needsQuotes = field.find_first_of(",\"\n") != std::string::npos;
  if (!needsQuotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string renderCsv(const RowType& rowType, const std::vector<Row>& rows) {
  std::string out;
  for (size_t i = 0; i < rowType.size(); ++i) {
    if (i > 0) out += ',';
    out += csvEscapeField(rowType.field(i).name);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      const Value& v = row[i];
      switch (v.kind()) {
        case Value::Kind::Null:
          break;  // empty field
        case Value::Kind::Bool:
          out += v.asBool() ? "true" : "false";
          break;
        case Value::Kind::Int:
          out += fmt::format("{}", v.asInt());
          break;
        case Value::Kind::Float:
          out += renderDouble(v.asFloat());
          break;
        case Value::Kind::String:
          out += csvEscapeField(v.asString());
          break;
        default:
          out += csvEscapeField(v.render());
          break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace relq
