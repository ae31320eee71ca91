#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace zest::detail {

enum class LexemeKind { identifier, number, string, punct };

struct Lexeme {
  std::size_t pos;
  std::size_t len;
  LexemeKind kind;
};

inline bool is_ident_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || u >= 0x80;
}

inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// Scans `text` into lexemes. Never fails: an unterminated quote runs to the
/// end of the input.
std::vector<Lexeme> lex(std::string_view text);

/// Removes every "#<digits>" expression id outside of quoted strings.
std::string strip_expression_ids(std::string_view text);

}  // namespace zest::detail
