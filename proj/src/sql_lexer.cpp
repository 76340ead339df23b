#include "relq/sql/lexer.hpp"

#include <fmt/format.h>

#include <cctype>
#include <set>

#include "relq/types.hpp"

namespace relq::sql {

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> kKeywords = {
      "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT",
      "JOIN", "INNER", "LEFT", "ON", "USING", "AS", "AND", "OR", "NOT",
      "NULL", "IS", "TRUE", "FALSE", "CAST", "COUNT", "SUM", "MIN", "MAX",
      "AVG", "ASC", "DESC", "EXPLAIN", "PLAN", "FOR",
  };
  return kKeywords;
}

bool identStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool identPart(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

bool isKeyword(const std::string& upper) { return keywords().count(upper) > 0; }

std::vector<Token> tokenize(const std::string& sql) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (sql[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
      i++;
    }
  };

  while (i < sql.size()) {
    char c = sql[i];
    SourcePos pos{line, col};
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (identStart(c)) {
      size_t j = i;
      while (j < sql.size() && identPart(sql[j])) j++;
      std::string word = sql.substr(i, j - i);
      std::string upper = toUpper(word);
      if (isKeyword(upper)) {
        out.push_back({TokenKind::Keyword, upper, pos});
      } else {
        out.push_back({TokenKind::Ident, word, pos});
      }
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      bool dot = false;
      while (j < sql.size() &&
             (std::isdigit(static_cast<unsigned char>(sql[j])) ||
              (!dot && sql[j] == '.' && j + 1 < sql.size() &&
               std::isdigit(static_cast<unsigned char>(sql[j + 1]))))) {
        if (sql[j] == '.') dot = true;
        j++;
      }
      out.push_back({TokenKind::NumLit, sql.substr(i, j - i), pos});
      advance(j - i);
      continue;
    }
    if (c == '\'') {
      std::string text;
      size_t j = i + 1;
      while (true) {
        if (j >= sql.size()) {
          raise(ErrorCode::UnterminatedString, "unterminated string literal", pos);
        }
        if (sql[j] == '\'') {
          if (j + 1 < sql.size() && sql[j + 1] == '\'') {
            text += '\'';
            j += 2;
            continue;
          }
          j++;
          break;
        }
        text += sql[j];
        j++;
      }
      out.push_back({TokenKind::StringLit, text, pos});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string text;
      size_t j = i + 1;
      while (true) {
        if (j >= sql.size()) {
          raise(ErrorCode::UnterminatedString, "unterminated quoted identifier", pos);
        }
        if (sql[j] == '"') {
          if (j + 1 < sql.size() && sql[j + 1] == '"') {
            text += '"';
            j += 2;
            continue;
          }
          j++;
          break;
        }
        text += sql[j];
        j++;
      }
      out.push_back({TokenKind::QuotedIdent, text, pos});
      advance(j - i);
      continue;
    }
    // multi-char symbols first
    if (c == '<' && i + 1 < sql.size() && (sql[i + 1] == '=' || sql[i + 1] == '>')) {
      out.push_back({TokenKind::Symbol, sql.substr(i, 2), pos});
      advance(2);
      continue;
    }
    if (c == '>' && i + 1 < sql.size() && sql[i + 1] == '=') {
      out.push_back({TokenKind::Symbol, ">=", pos});
      advance(2);
      continue;
    }
    if (c == '!' && i + 1 < sql.size() && sql[i + 1] == '=') {
      out.push_back({TokenKind::Symbol, "<>", pos});
      advance(2);
      continue;
    }
    static const std::string kSingle = "()[],.*+-/=<>;";
    if (kSingle.find(c) != std::string::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), pos});
      advance(1);
      continue;
    }
    raise(ErrorCode::IllegalCharacter, fmt::format("illegal character '{}'", c), pos);
  }
  out.push_back({TokenKind::End, "", SourcePos{line, col}});
  return out;
}

}  // namespace relq::sql
