#include "ir_lexer.hpp"

#include <cctype>
#include <limits>
#include <unordered_map>

#include "cbr/error.hpp"

namespace cbr::ir::detail {

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwClass: return "'class'";
    case Tok::KwConst: return "'const'";
    case Tok::KwField: return "'field'";
    case Tok::KwMethod: return "'method'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwFor: return "'for'";
    case Tok::KwIn: return "'in'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwNew: return "'new'";
    case Tok::KwInt: return "'int'";
    case Tok::KwBool: return "'bool'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Bang: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view src) {
  static const std::unordered_map<std::string_view, Tok> keywords = {
      {"class", Tok::KwClass}, {"const", Tok::KwConst},   {"field", Tok::KwField},
      {"method", Tok::KwMethod}, {"if", Tok::KwIf},        {"else", Tok::KwElse},
      {"for", Tok::KwFor},     {"in", Tok::KwIn},         {"return", Tok::KwReturn},
      {"true", Tok::KwTrue},   {"false", Tok::KwFalse},   {"new", Tok::KwNew},
      {"int", Tok::KwInt},     {"bool", Tok::KwBool},
  };

  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(src.substr(i, len));
    t.line = line;
    t.column = col;
    out.push_back(std::move(t));
    advance(len);
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      const std::string_view word = src.substr(i, j - i);
      const auto kw = keywords.find(word);
      push(kw == keywords.end() ? Tok::Ident : kw->second, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t value = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        const int digit = src[j] - '0';
        if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) {
          throw Error(ErrorKind::Syntax, "integer literal out of range", line, col);
        }
        value = value * 10 + digit;
        ++j;
      }
      push(Tok::Int, j - i);
      out.back().int_value = value;
      continue;
    }

    const char n = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (c) {
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case ':': push(Tok::Colon, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case '.': push(Tok::Dot, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case '/': push(Tok::Slash, 1); continue;
      case '%': push(Tok::Percent, 1); continue;
      case '=': n == '=' ? push(Tok::EqEq, 2) : push(Tok::Assign, 1); continue;
      case '!': n == '=' ? push(Tok::NotEq, 2) : push(Tok::Bang, 1); continue;
      case '<': n == '=' ? push(Tok::Le, 2) : push(Tok::Lt, 1); continue;
      case '>': n == '=' ? push(Tok::Ge, 2) : push(Tok::Gt, 1); continue;
      case '&':
        if (n == '&') {
          push(Tok::AndAnd, 2);
          continue;
        }
        break;
      case '|':
        if (n == '|') {
          push(Tok::OrOr, 2);
          continue;
        }
        break;
      default:
        break;
    }
    throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", line, col);
  }

  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

}  // namespace cbr::ir::detail
