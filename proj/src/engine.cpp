#include "relq/engine.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "relq/adapters/csv_adapter.hpp"
#include "relq/adapters/sql_gen.hpp"
#include "relq/exec.hpp"
#include "relq/rules.hpp"
#include "relq/sql/parser.hpp"
#include "relq/sql/translator.hpp"

namespace relq {

namespace {

PlannerConfig effectiveConfig(const Catalog& catalog, const QueryOptions& options) {
  PlannerConfig config = options.plannerConfig;
  if (config.ruleSet.empty()) {
    config.ruleSet = defaultRuleSet(catalog, options.disabledRules);
  }
  config.useMaterializations = !options.noMaterializations;
  return config;
}

RelNodePtr optimize(const RelNodePtr& logical, const Catalog& catalog,
                    const QueryOptions& options, TraceSink* trace) {
  if (options.planner == QueryOptions::Planner::Exhaustive) {
    PlannerConfig config = effectiveConfig(catalog, options);
    std::vector<RulePtr> directed;
    for (const auto& rule : config.ruleSet) {
      if (rule->directed()) directed.push_back(rule);
    }
    RelNodePtr rewritten =
        optimizeExhaustive(logical, directed, config.maxIterations, trace, &catalog);
    return physicalize(rewritten, catalog);
  }
  PlannerConfig config = effectiveConfig(catalog, options);
  return optimizeCost(logical, config, catalog, trace);
}

}  // namespace

RelNodePtr Engine::logicalPlan(const std::string& sql) const {
  sql::Statement stmt = sql::parseStatement(sql);
  return sql::translateQuery(*stmt.query, catalog_);
}

RelNodePtr Engine::physicalPlan(const std::string& sql, const QueryOptions& options) const {
  sql::Statement stmt = sql::parseStatement(sql);
  RelNodePtr logical = sql::translateQuery(*stmt.query, catalog_);
  return optimize(logical, catalog_, options, nullptr);
}

QueryResult Engine::run(const std::string& sql, const QueryOptions& options) const {
  sql::Statement stmt = sql::parseStatement(sql);
  RelNodePtr logical = sql::translateQuery(*stmt.query, catalog_);

  TraceSink trace;
  RelNodePtr physical =
      optimize(logical, catalog_, options, options.trace ? &trace : nullptr);

  QueryResult result;
  result.wasExplain = stmt.explain;
  result.planText = explainPlanText(physical);
  result.planDigest = physical->digest();
  result.trace = trace.lines();
  if (!stmt.explain) {
    result.rowType = physical->rowType();
    result.rows = execute(physical);
  }
  return result;
}

namespace {

std::string valueForCell(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Null: return "NULL";
    case Value::Kind::String: return v.asString();
    case Value::Kind::Bool: return v.asBool() ? "true" : "false";
    case Value::Kind::Int: return fmt::format("{}", v.asInt());
    case Value::Kind::Float: return renderDouble(v.asFloat());
    default: return v.render();
  }
}

std::string formatAlignedTable(const RowType& rowType, const std::vector<Row>& rows) {
  std::vector<size_t> widths;
  std::vector<std::vector<std::string>> cells;
  widths.reserve(rowType.size());
  for (size_t i = 0; i < rowType.size(); ++i) {
    widths.push_back(rowType.field(i).name.size());
  }
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (size_t i = 0; i < row.size(); ++i) {
      line.push_back(valueForCell(row[i]));
      widths[i] = std::max(widths[i], line.back().size());
    }
    cells.push_back(std::move(line));
  }

  std::string out;
  auto writeRow = [&](const std::vector<std::string>& line) {
    for (size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out += " | ";
      out += line[i];
      out += std::string(widths[i] - line[i].size(), ' ');
    }
    out += '\n';
  };
  std::vector<std::string> header;
  for (const auto& field : rowType.fields()) header.push_back(field.name);
  writeRow(header);
  for (size_t i = 0; i < rowType.size(); ++i) {
    if (i > 0) out += "-+-";
    out += std::string(widths[i], '-');
  }
  out += '\n';
  for (const auto& line : cells) writeRow(line);
  return out;
}

nlohmann::json valueToJson(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Null: return nullptr;
    case Value::Kind::Bool: return v.asBool();
    case Value::Kind::Int: return v.asInt();
    case Value::Kind::Float: return v.asFloat();
    case Value::Kind::String: return v.asString();
    case Value::Kind::Array: {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& item : v.asArray()) out.push_back(valueToJson(item));
      return out;
    }
    case Value::Kind::Map: {
      nlohmann::json out = nlohmann::json::object();
      for (const auto& [key, value] : v.asMap()) out[key] = valueToJson(value);
      return out;
    }
  }
  return nullptr;
}

std::string formatDocs(const RowType& rowType, const std::vector<Row>& rows) {
  std::string out;
  for (const auto& row : rows) {
    nlohmann::json doc = nlohmann::json::object();
    for (size_t i = 0; i < row.size(); ++i) {
      doc[rowType.field(i).name] = valueToJson(row[i]);
    }
    out += doc.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

std::string formatRows(const RowType& rowType, const std::vector<Row>& rows,
                       OutputFormat format) {
  switch (format) {
    case OutputFormat::Table: return formatAlignedTable(rowType, rows);
    case OutputFormat::Csv: return renderCsv(rowType, rows);
    case OutputFormat::Docs: return formatDocs(rowType, rows);
  }
  return "";
}

}  // namespace relq
