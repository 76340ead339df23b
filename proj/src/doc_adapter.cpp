#include "relq/adapters/doc_adapter.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>

#include "relq/error.hpp"

namespace relq {

namespace {

Value jsonToValue(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return Value::null();
    case nlohmann::json::value_t::boolean:
      return Value::boolean(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned:
      return Value::int64(j.get<int64_t>());
    case nlohmann::json::value_t::number_float:
      return Value::float64(j.get<double>());
    case nlohmann::json::value_t::string:
      return Value::string(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      ValueList items;
      items.reserve(j.size());
      for (const auto& item : j) items.push_back(jsonToValue(item));
      return Value::array(std::move(items));
    }
    case nlohmann::json::value_t::object: {
      ValueMap entries;
      for (const auto& [key, value] : j.items()) entries[key] = jsonToValue(value);
      return Value::map(std::move(entries));
    }
    default:
      return Value::null();
  }
}

}  // namespace

RowType docTableRowType() {
  return RowType({{"_MAP", ScalarType::map(ScalarType::any(), true)}});
}

DocTable::DocTable(std::string schemaName, std::string name, Statistics stats,
                   std::filesystem::path path)
    : Table(std::move(schemaName), std::move(name), docTableRowType(),
            std::move(stats), {}, Capabilities{}),
      path_(std::move(path)) {}

std::vector<Row> DocTable::scanAll() const {
  std::ifstream in(path_);
  if (!in) {
    raise(ErrorCode::MissingFile, fmt::format("cannot open '{}'", path_.string()));
  }
  std::vector<Row> rows;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    lineNo++;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      raise(ErrorCode::DocumentParseError,
            fmt::format("{} line {} is not a JSON object", path_.filename().string(),
                        lineNo));
    }
    rows.push_back(Row{jsonToValue(doc)});
  }
  return rows;
}

}  // namespace relq
