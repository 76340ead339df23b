#include "relq/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "relq/adapters/model.hpp"
#include "relq/engine.hpp"
#include "relq/error.hpp"

namespace relq {

namespace {

struct CliConfig {
  std::string modelPath;
  std::string query;
  std::string scriptPath;
  std::string format = "table";
  std::string planner = "cost";
  std::vector<std::string> disabledRules;
  bool trace = false;
  bool noMaterializations = false;
};

OutputFormat parseFormat(const std::string& name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "docs") return OutputFormat::Docs;
  raise(ErrorCode::ValidationError, fmt::format("unknown output format '{}'", name));
}

// Splits a script on top-level semicolons (quotes respected).
std::vector<std::string> splitStatements(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  char quote = 0;
  for (char c : text) {
    if (quote != 0) {
      current += c;
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      current += c;
      continue;
    }
    if (c == ';') {
      if (current.find_first_not_of(" \t\r\n") != std::string::npos) {
        out.push_back(current);
      }
      current.clear();
      continue;
    }
    current += c;
  }
  if (current.find_first_not_of(" \t\r\n") != std::string::npos) out.push_back(current);
  return out;
}

int runStatement(const Engine& engine, const std::string& sql, const QueryOptions& options,
                 OutputFormat format, std::ostream& out, std::ostream& err) {
  try {
    QueryResult result = engine.run(sql, options);
    for (const auto& line : result.trace) out << line << "\n";
    if (result.wasExplain) {
      out << result.planText;
    } else {
      out << formatRows(result.rowType, result.rows, format);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"relq - embeddable federated query engine shell"};
  CliConfig config;
  app.add_option("--model", config.modelPath, "model file (JSON)")->required();
  auto* queryOpt = app.add_option("-e,--execute", config.query, "run one SQL statement");
  auto* fileOpt = app.add_option("--file", config.scriptPath, "run a SQL script");
  app.add_option("--format", config.format, "output format: table|csv|docs")
      ->check(CLI::IsMember({"table", "csv", "docs"}));
  app.add_option("--planner", config.planner, "planner engine: cost|exhaustive")
      ->check(CLI::IsMember({"cost", "exhaustive"}));
  app.add_option("--disable-rule", config.disabledRules, "disable a planner rule by name")
      ->take_all();
  app.add_flag("--trace", config.trace, "print planner trace lines");
  app.add_flag("--no-materializations", config.noMaterializations,
               "ignore registered materializations");
  queryOpt->excludes(fileOpt);

  std::vector<std::string> argv = args;
  try {
    app.parse(std::vector<std::string>(argv.rbegin(), argv.rend()));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  QueryOptions options;
  options.planner = config.planner == "exhaustive" ? QueryOptions::Planner::Exhaustive
                                                   : QueryOptions::Planner::Cost;
  options.disabledRules = config.disabledRules;
  options.trace = config.trace;
  options.noMaterializations = config.noMaterializations;
  OutputFormat format;
  try {
    format = parseFormat(config.format);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Catalog catalog;
  try {
    catalog = loadModel(config.modelPath);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  Engine engine(std::move(catalog));

  if (!config.query.empty()) {
    return runStatement(engine, config.query, options, format, out, err);
  }
  if (!config.scriptPath.empty()) {
    std::ifstream script(config.scriptPath);
    if (!script) {
      err << fmt::format("error: cannot open script '{}'\n", config.scriptPath);
      return 2;
    }
    std::stringstream buffer;
    buffer << script.rdbuf();
    int rc = 0;
    for (const auto& sql : splitStatements(buffer.str())) {
      rc = std::max(rc, runStatement(engine, sql, options, format, out, err));
    }
    return rc;
  }

  // Interactive: plain line-based loop, statements end with ';'.
  std::string pending;
  std::string line;
  while (std::getline(in, line)) {
    pending += line;
    pending += '\n';
    if (line.find(';') == std::string::npos) continue;
    for (const auto& sql : splitStatements(pending)) {
      runStatement(engine, sql, options, format, out, err);
    }
    pending.clear();
  }
  return 0;
}

}  // namespace relq
