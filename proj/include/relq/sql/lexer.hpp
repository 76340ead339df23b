#pragma once

#include <string>
#include <vector>

#include "relq/error.hpp"

namespace relq::sql {

enum class TokenKind { Keyword, Ident, QuotedIdent, StringLit, NumLit, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // keywords uppercased; literals unescaped
  SourcePos pos;
};

/// Full-cover tokenization. Keywords are case-insensitive; "..." quoted
/// identifiers preserve case; '...' string literals use doubled-quote
/// escaping. The stream ends with an End token.
std::vector<Token> tokenize(const std::string& sql);

bool isKeyword(const std::string& upper);

}  // namespace relq::sql
