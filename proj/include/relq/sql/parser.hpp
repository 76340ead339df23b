#pragma once

#include <string>

#include "relq/sql/ast.hpp"
#include "relq/sql/lexer.hpp"

namespace relq::sql {

/// Parses one statement (an optional `EXPLAIN PLAN FOR` wrapper around a
/// SELECT query, optionally `;`-terminated). SyntaxError carries the
/// expected-token description and position.
Statement parseStatement(const std::string& sql);
Statement parseStatement(const std::vector<Token>& tokens);

}  // namespace relq::sql
