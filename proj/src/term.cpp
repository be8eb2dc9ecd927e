#include <cctype>
#include <cstdio>
#include <limits>

#include "cbr/error.hpp"
#include "cbr/term.hpp"

namespace cbr {

using ir::BinaryOp;

TermPtr Term::int_lit(std::int64_t v) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::IntLit;
  t->int_value = v;
  return t;
}

TermPtr Term::bool_lit(bool v) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::BoolLit;
  t->bool_value = v;
  return t;
}

TermPtr Term::state(std::string root, std::vector<PathSeg> path) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::State;
  t->name = std::move(root);
  t->path = std::move(path);
  return t;
}

TermPtr Term::constant(std::string qualified, std::int64_t value) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Const;
  t->name = std::move(qualified);
  t->int_value = value;
  return t;
}

TermPtr Term::param(std::string label) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Param;
  t->name = std::move(label);
  return t;
}

TermPtr Term::opaque(std::string label) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Opaque;
  t->name = std::move(label);
  return t;
}

namespace {

std::optional<std::int64_t> fold(BinaryOp op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  switch (op) {
    case BinaryOp::Add:
      if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
      return r;
    case BinaryOp::Sub:
      if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
      return r;
    case BinaryOp::Mul:
      if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
      return r;
    case BinaryOp::Div:
      if (b == 0 || (a == std::numeric_limits<std::int64_t>::min() && b == -1)) return std::nullopt;
      return a / b;
    case BinaryOp::Mod:
      if (b == 0 || (a == std::numeric_limits<std::int64_t>::min() && b == -1)) return std::nullopt;
      return a % b;
    default:
      return std::nullopt;
  }
}

}  // namespace

TermPtr Term::arith(BinaryOp op, TermPtr lhs, TermPtr rhs) {
  if (lhs->kind == Kind::IntLit && rhs->kind == Kind::IntLit) {
    if (auto v = fold(op, lhs->int_value, rhs->int_value)) return int_lit(*v);
    return opaque("(" + render(*lhs) + " " + std::string(ir::to_string(op)) + " " + render(*rhs) + ")");
  }
  auto t = std::make_shared<Term>();
  t->kind = Kind::Arith;
  t->op = op;
  t->lhs = std::move(lhs);
  t->rhs = std::move(rhs);
  return t;
}

TermPtr Term::neg(TermPtr operand) {
  if (operand->kind == Kind::IntLit && operand->int_value != std::numeric_limits<std::int64_t>::min()) {
    return int_lit(-operand->int_value);
  }
  auto t = std::make_shared<Term>();
  t->kind = Kind::Neg;
  t->lhs = std::move(operand);
  return t;
}

bool mentions_input(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Param:
    case Term::Kind::Opaque:
      return true;
    case Term::Kind::Arith:
      return mentions_input(*t.lhs) || mentions_input(*t.rhs);
    case Term::Kind::Neg:
      return mentions_input(*t.lhs);
    default:
      return false;
  }
}

namespace {

int arith_prec(BinaryOp op) {
  return (op == BinaryOp::Add || op == BinaryOp::Sub) ? 1 : 2;
}

}  // namespace

std::string render(const Term& t) {
  switch (t.kind) {
    case Term::Kind::IntLit:
      return std::to_string(t.int_value);
    case Term::Kind::BoolLit:
      return t.bool_value ? "true" : "false";
    case Term::Kind::State: {
      std::string s = t.name;
      for (const auto& seg : t.path) {
        switch (seg.kind) {
          case PathSeg::Kind::Field: s += "." + seg.field; break;
          case PathSeg::Kind::Index: s += "[" + std::to_string(seg.index) + "]"; break;
          case PathSeg::Kind::Length: s += ".length"; break;
        }
      }
      return s;
    }
    case Term::Kind::Const:
    case Term::Kind::Param:
    case Term::Kind::Opaque:
      return t.name;
    case Term::Kind::Arith: {
      const int p = arith_prec(t.op);
      auto side = [&](const Term& c, bool right) {
        const bool wrap = (c.kind == Term::Kind::Arith &&
                           (right ? arith_prec(c.op) <= p : arith_prec(c.op) < p));
        return wrap ? "(" + render(c) + ")" : render(c);
      };
      return side(*t.lhs, false) + " " + std::string(ir::to_string(t.op)) + " " + side(*t.rhs, true);
    }
    case Term::Kind::Neg: {
      const bool wrap = t.lhs->kind == Term::Kind::Arith || t.lhs->kind == Term::Kind::Neg ||
                        (t.lhs->kind == Term::Kind::IntLit && t.lhs->int_value < 0);
      return wrap ? "-(" + render(*t.lhs) + ")" : "-" + render(*t.lhs);
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Term text parser

namespace {

class TermParser {
 public:
  TermParser(std::string_view text, const std::map<std::string, std::int64_t>& constants)
      : s_(text), constants_(constants) {}

  TermPtr parse() {
    TermPtr t = additive();
    skip_ws();
    if (i_ != s_.size()) bad("trailing input");
    return t;
  }

 private:
  [[noreturn]] void bad(const std::string& why) {
    throw Error(ErrorKind::Schema, "malformed term '" + std::string(s_) + "': " + why);
  }

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }

  TermPtr additive() {
    TermPtr lhs = multiplicative();
    for (;;) {
      if (eat('+')) {
        lhs = Term::arith(BinaryOp::Add, lhs, multiplicative());
      } else if (eat('-')) {
        lhs = Term::arith(BinaryOp::Sub, lhs, multiplicative());
      } else {
        return lhs;
      }
    }
  }

  TermPtr multiplicative() {
    TermPtr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = Term::arith(BinaryOp::Mul, lhs, unary());
      } else if (eat('/')) {
        lhs = Term::arith(BinaryOp::Div, lhs, unary());
      } else if (eat('%')) {
        lhs = Term::arith(BinaryOp::Mod, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  TermPtr unary() {
    if (eat('-')) return Term::neg(unary());
    return atom();
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) bad("expected integer");
    std::int64_t v = 0;
    for (std::size_t k = start; k < i_; ++k) {
      if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, s_[k] - '0', &v)) {
        bad("integer overflow");
      }
    }
    return v;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = i_;
    if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      ++i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    }
    if (start == i_) bad("expected identifier");
    return std::string(s_.substr(start, i_ - start));
  }

  TermPtr atom() {
    const char c = peek();
    if (c == '(') {
      ++i_;
      TermPtr t = additive();
      if (!eat(')')) bad("expected ')'");
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Term::int_lit(integer());

    const std::string root = ident();
    if (root == "true") return Term::bool_lit(true);
    if (root == "false") return Term::bool_lit(false);

    std::vector<PathSeg> path;
    for (;;) {
      if (eat('[')) {
        path.push_back({PathSeg::Kind::Index, {}, integer()});
        if (!eat(']')) bad("expected ']'");
      } else if (peek() == '.') {
        ++i_;
        if (eat('[')) {
          path.push_back({PathSeg::Kind::Index, {}, integer()});
          if (!eat(']')) bad("expected ']'");
        } else {
          std::string f = ident();
          if (f == "length") {
            path.push_back({PathSeg::Kind::Length, {}, 0});
          } else {
            path.push_back({PathSeg::Kind::Field, std::move(f), 0});
          }
        }
      } else {
        break;
      }
    }
    if (path.empty()) bad("a state path needs a class root and at least one step");
    if (path.size() == 1 && path[0].kind == PathSeg::Kind::Field) {
      const std::string qualified = root + "." + path[0].field;
      if (auto it = constants_.find(qualified); it != constants_.end()) {
        return Term::constant(qualified, it->second);
      }
    }
    return Term::state(root, std::move(path));
  }

  std::string_view s_;
  std::size_t i_ = 0;
  const std::map<std::string, std::int64_t>& constants_;
};

}  // namespace

TermPtr parse_term(std::string_view text, const std::map<std::string, std::int64_t>& constants) {
  return TermParser(text, constants).parse();
}

// ---------------------------------------------------------------------------
// Clauses

namespace {

BinaryOp inverse(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq: return BinaryOp::Ne;
    case BinaryOp::Ne: return BinaryOp::Eq;
    case BinaryOp::Lt: return BinaryOp::Ge;
    case BinaryOp::Le: return BinaryOp::Gt;
    case BinaryOp::Gt: return BinaryOp::Le;
    case BinaryOp::Ge: return BinaryOp::Lt;
    default: return op;
  }
}

BinaryOp mirrored(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: return BinaryOp::Gt;
    case BinaryOp::Le: return BinaryOp::Ge;
    case BinaryOp::Gt: return BinaryOp::Lt;
    case BinaryOp::Ge: return BinaryOp::Le;
    default: return op;
  }
}

}  // namespace

std::string render(const Clause& c) {
  std::string body = render(*c.lhs) + " " + std::string(ir::to_string(c.op)) + " " + render(*c.rhs);
  return c.negated ? "!(" + body + ")" : body;
}

Clause invert(const Clause& c) {
  Clause out = c;
  out.op = inverse(c.op);
  return out;
}

Clause normalize(Clause c) {
  if (c.negated) {
    c.op = inverse(c.op);
    c.negated = false;
  }
  if (c.lhs->is_literal() && !c.rhs->is_literal()) {
    std::swap(c.lhs, c.rhs);
    c.op = mirrored(c.op);
  }
  if (c.rhs->kind == Term::Kind::BoolLit && c.op == BinaryOp::Ne) {
    c.op = BinaryOp::Eq;
    c.rhs = Term::bool_lit(!c.rhs->bool_value);
  }
  return c;
}

std::string render(const AbstractionFunction& af) {
  std::string out;
  for (std::size_t i = 0; i < af.clauses.size(); ++i) {
    if (i) out += " && ";
    out += render(af.clauses[i]);
  }
  return out;
}

std::string af_list_hash(const std::vector<std::string>& ids) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) mix('\n');
    for (unsigned char ch : ids[i]) mix(ch);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string af_list_hash(const std::vector<AbstractionFunction>& afs) {
  std::vector<std::string> ids;
  ids.reserve(afs.size());
  for (const auto& af : afs) ids.push_back(af.id);
  return af_list_hash(ids);
}

}  // namespace cbr
