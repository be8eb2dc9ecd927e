#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cbr::ir::detail {

enum class Tok {
  Ident,
  Int,
  KwClass,
  KwConst,
  KwField,
  KwMethod,
  KwIf,
  KwElse,
  KwFor,
  KwIn,
  KwReturn,
  KwTrue,
  KwFalse,
  KwNew,
  KwInt,
  KwBool,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Semi,
  Colon,
  Comma,
  Dot,
  Assign,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Bang,
  AndAnd,
  OrOr,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_value = 0;
  int line = 1;
  int column = 1;
};

std::string_view describe(Tok kind);

/// Throws cbr::Error(Syntax) on an unexpected character or integer overflow.
std::vector<Token> tokenize(std::string_view source);

}  // namespace cbr::ir::detail
