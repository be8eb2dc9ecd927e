#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cbr/error.hpp"
#include "cbr/ir.hpp"
#include "ir_lexer.hpp"

namespace cbr::ir {

using detail::Tok;
using detail::Token;

// ---------------------------------------------------------------------------
// Small accessors

std::string to_string(const Type& type) {
  switch (type.kind) {
    case Type::Kind::Int: return "int";
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Ref: return type.class_name;
    case Type::Kind::RefArray: return type.class_name + "[]";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Eq || op == BinaryOp::Ne || op == BinaryOp::Lt || op == BinaryOp::Le ||
         op == BinaryOp::Gt || op == BinaryOp::Ge;
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul ||
         op == BinaryOp::Div || op == BinaryOp::Mod;
}

const Param* MethodDef::find_param(std::string_view id) const {
  for (const auto& p : params) {
    if (p.name == id) return &p;
  }
  return nullptr;
}

const ConstDef* ClassDef::find_const(std::string_view id) const {
  for (const auto& c : constants) {
    if (c.name == id) return &c;
  }
  return nullptr;
}

const FieldDef* ClassDef::find_field(std::string_view id) const {
  for (const auto& f : fields) {
    if (f.name == id) return &f;
  }
  return nullptr;
}

const MethodDef* ClassDef::find_method(std::string_view id) const {
  for (const auto& m : methods) {
    if (m.name == id) return &m;
  }
  return nullptr;
}

const ClassDef* Program::find_class(std::string_view id) const {
  for (const auto& c : classes) {
    if (c.name == id) return &c;
  }
  return nullptr;
}

std::size_t Program::class_index(std::string_view id) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].name == id) return i;
  }
  return classes.size();
}

namespace {

[[noreturn]] void fail(ErrorKind kind, SourcePos pos, const std::string& what) {
  std::ostringstream msg;
  msg << pos.line << ":" << pos.column << ": " << what;
  throw Error(kind, msg.str(), pos.line, pos.column);
}

// ---------------------------------------------------------------------------
// Recursive-descent parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) p.classes.push_back(class_decl());
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  SourcePos here() const { return {peek().line, peek().column}; }
  bool at(Tok kind) const { return peek().kind == kind; }

  bool accept(Tok kind) {
    if (!at(kind)) return false;
    ++pos_;
    return true;
  }

  const Token& expect(Tok kind) {
    if (!at(kind)) {
      std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      fail(ErrorKind::Syntax, here(),
           "expected " + std::string(detail::describe(kind)) + ", found " + got);
    }
    return toks_[pos_++];
  }

  std::string ident() { return expect(Tok::Ident).text; }

  ClassDef class_decl() {
    ClassDef cls;
    cls.pos = here();
    expect(Tok::KwClass);
    cls.name = ident();
    expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) {
      if (at(Tok::KwConst)) {
        ConstDef c;
        c.pos = here();
        ++pos_;
        c.name = ident();
        expect(Tok::Assign);
        const bool neg = accept(Tok::Minus);
        c.value = expect(Tok::Int).int_value;
        if (neg) c.value = -c.value;
        expect(Tok::Semi);
        cls.constants.push_back(std::move(c));
      } else if (at(Tok::KwField)) {
        FieldDef f;
        f.pos = here();
        ++pos_;
        f.name = ident();
        expect(Tok::Colon);
        f.type = type();
        expect(Tok::Semi);
        cls.fields.push_back(std::move(f));
      } else if (at(Tok::KwMethod)) {
        cls.methods.push_back(method_decl());
      } else {
        fail(ErrorKind::Syntax, here(), "expected 'const', 'field', 'method' or '}'");
      }
    }
    return cls;
  }

  Type type() {
    if (accept(Tok::KwInt)) return Type::integer();
    if (accept(Tok::KwBool)) return Type::boolean();
    std::string name = ident();
    if (accept(Tok::LBracket)) {
      expect(Tok::RBracket);
      return Type::ref_array(std::move(name));
    }
    return Type::ref(std::move(name));
  }

  MethodDef method_decl() {
    MethodDef m;
    m.pos = here();
    expect(Tok::KwMethod);
    m.name = ident();
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      do {
        Param p;
        p.name = ident();
        expect(Tok::Colon);
        p.type = type();
        m.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    m.body = block();
    return m;
  }

  Block block() {
    expect(Tok::LBrace);
    Block b;
    while (!accept(Tok::RBrace)) b.push_back(stmt());
    return b;
  }

  Stmt stmt() {
    Stmt s;
    s.pos = here();
    if (accept(Tok::KwIf)) {
      s.node = if_tail();
      return s;
    }
    if (accept(Tok::KwFor)) {
      Stmt::For f;
      f.var = ident();
      expect(Tok::KwIn);
      f.array = expr();
      f.body = block();
      s.node = std::move(f);
      return s;
    }
    if (accept(Tok::KwReturn)) {
      expect(Tok::Semi);
      s.node = Stmt::Return{};
      return s;
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::LParen) {
      Stmt::Call call;
      call.method = ident();
      expect(Tok::LParen);
      if (!at(Tok::RParen)) {
        do {
          call.args.push_back(expr());
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen);
      expect(Tok::Semi);
      s.node = std::move(call);
      return s;
    }
    Stmt::Assign a;
    a.target = postfix();
    expect(Tok::Assign);
    a.value = expr();
    expect(Tok::Semi);
    s.node = std::move(a);
    return s;
  }

  // After 'if'.
  Stmt::If if_tail() {
    Stmt::If node;
    expect(Tok::LParen);
    node.cond = expr();
    expect(Tok::RParen);
    node.then_block = block();
    if (accept(Tok::KwElse)) {
      if (at(Tok::KwIf)) {
        Stmt nested;
        nested.pos = here();
        ++pos_;
        nested.node = if_tail();
        node.else_block.push_back(std::move(nested));
      } else {
        node.else_block = block();
      }
    }
    return node;
  }

  static ExprPtr make(Expr::Node node, SourcePos pos) {
    return std::make_shared<const Expr>(Expr{std::move(node), pos});
  }

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (at(Tok::OrOr)) {
      const SourcePos p = here();
      ++pos_;
      lhs = make(Expr::Binary{BinaryOp::Or, lhs, and_expr()}, p);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = cmp_expr();
    while (at(Tok::AndAnd)) {
      const SourcePos p = here();
      ++pos_;
      lhs = make(Expr::Binary{BinaryOp::And, lhs, cmp_expr()}, p);
    }
    return lhs;
  }

  ExprPtr cmp_expr() {
    ExprPtr lhs = add_expr();
    static const std::map<Tok, BinaryOp> ops = {
        {Tok::EqEq, BinaryOp::Eq}, {Tok::NotEq, BinaryOp::Ne}, {Tok::Lt, BinaryOp::Lt},
        {Tok::Le, BinaryOp::Le},   {Tok::Gt, BinaryOp::Gt},    {Tok::Ge, BinaryOp::Ge},
    };
    const auto it = ops.find(peek().kind);
    if (it == ops.end()) return lhs;
    const SourcePos p = here();
    ++pos_;
    ExprPtr rhs = add_expr();
    if (ops.count(peek().kind)) {
      fail(ErrorKind::Syntax, here(), "comparison operators do not chain; add parentheses");
    }
    return make(Expr::Binary{it->second, lhs, rhs}, p);
  }

  ExprPtr add_expr() {
    ExprPtr lhs = mul_expr();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const SourcePos p = here();
      const BinaryOp op = at(Tok::Plus) ? BinaryOp::Add : BinaryOp::Sub;
      ++pos_;
      lhs = make(Expr::Binary{op, lhs, mul_expr()}, p);
    }
    return lhs;
  }

  ExprPtr mul_expr() {
    ExprPtr lhs = unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      const SourcePos p = here();
      const BinaryOp op = at(Tok::Star)    ? BinaryOp::Mul
                          : at(Tok::Slash) ? BinaryOp::Div
                                           : BinaryOp::Mod;
      ++pos_;
      lhs = make(Expr::Binary{op, lhs, unary()}, p);
    }
    return lhs;
  }

  ExprPtr unary() {
    const SourcePos p = here();
    if (accept(Tok::Bang)) return make(Expr::Unary{UnaryOp::Not, unary()}, p);
    if (accept(Tok::Minus)) return make(Expr::Unary{UnaryOp::Neg, unary()}, p);
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    for (;;) {
      const SourcePos p = here();
      if (accept(Tok::Dot)) {
        std::string name = ident();
        if (name == "length") {
          e = make(Expr::Length{e}, p);
        } else {
          e = make(Expr::Member{e, std::move(name)}, p);
        }
      } else if (accept(Tok::LBracket)) {
        ExprPtr index = expr();
        expect(Tok::RBracket);
        e = make(Expr::Index{e, index}, p);
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const SourcePos p = here();
    if (at(Tok::Int)) return make(Expr::IntLit{toks_[pos_++].int_value}, p);
    if (accept(Tok::KwTrue)) return make(Expr::BoolLit{true}, p);
    if (accept(Tok::KwFalse)) return make(Expr::BoolLit{false}, p);
    if (accept(Tok::KwNew)) {
      std::string cls = ident();
      expect(Tok::LBracket);
      ExprPtr size = expr();
      expect(Tok::RBracket);
      return make(Expr::NewArray{std::move(cls), size}, p);
    }
    if (at(Tok::Ident)) return make(Expr::Name{toks_[pos_++].text}, p);
    if (accept(Tok::LParen)) {
      ExprPtr e = expr();
      expect(Tok::RParen);
      return e;
    }
    fail(ErrorKind::Syntax, p, "expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Static checks: declared types, unique names, resolvable paths, typing.

/// Static "type" of an expression. ClassRef is the type of a bare class name
/// used as a qualifier (`Cart.PRICE`).
struct SType {
  enum class Kind { Int, Bool, Ref, RefArray, ClassRef };
  Kind kind;
  std::string cls;

  static SType of(const Type& t) {
    switch (t.kind) {
      case Type::Kind::Int: return {Kind::Int, {}};
      case Type::Kind::Bool: return {Kind::Bool, {}};
      case Type::Kind::Ref: return {Kind::Ref, t.class_name};
      case Type::Kind::RefArray: return {Kind::RefArray, t.class_name};
    }
    return {Kind::Int, {}};
  }
  bool operator==(const SType&) const = default;
};

std::string describe(const SType& t) {
  switch (t.kind) {
    case SType::Kind::Int: return "int";
    case SType::Kind::Bool: return "bool";
    case SType::Kind::Ref: return t.cls;
    case SType::Kind::RefArray: return t.cls + "[]";
    case SType::Kind::ClassRef: return "class " + t.cls;
  }
  return "?";
}

class Checker {
 public:
  explicit Checker(const Program& p) : prog_(p) {}

  void run() {
    std::set<std::string> class_names;
    for (const auto& cls : prog_.classes) {
      if (!class_names.insert(cls.name).second) {
        fail(ErrorKind::DuplicateName, cls.pos, "duplicate class '" + cls.name + "'");
      }
    }
    for (const auto& cls : prog_.classes) check_class(cls);
  }

 private:
  struct Scope {
    const ClassDef* cls = nullptr;
    const MethodDef* method = nullptr;
    std::vector<std::string> loop_vars;

    bool is_loop_var(std::string_view id) const {
      return std::find(loop_vars.begin(), loop_vars.end(), id) != loop_vars.end();
    }
  };

  void check_type(const Type& t, SourcePos pos) {
    if (t.references_class() && !prog_.find_class(t.class_name)) {
      fail(ErrorKind::UndeclaredType, pos, "undeclared type '" + t.class_name + "'");
    }
  }

  void check_class(const ClassDef& cls) {
    std::set<std::string> members;
    for (const auto& c : cls.constants) {
      if (!members.insert(c.name).second) {
        fail(ErrorKind::DuplicateName, c.pos, "duplicate member '" + c.name + "' in " + cls.name);
      }
    }
    for (const auto& f : cls.fields) {
      if (!members.insert(f.name).second) {
        fail(ErrorKind::DuplicateName, f.pos, "duplicate member '" + f.name + "' in " + cls.name);
      }
      check_type(f.type, f.pos);
      // `.length` is reserved for arrays in both IR and state paths.
      if (f.name == "length") fail(ErrorKind::Resolution, f.pos, "'length' is reserved");
    }
    std::set<std::string> methods;
    for (const auto& m : cls.methods) {
      if (!methods.insert(m.name).second) {
        fail(ErrorKind::DuplicateName, m.pos, "duplicate method '" + m.name + "' in " + cls.name);
      }
      std::set<std::string> params;
      for (const auto& p : m.params) {
        check_type(p.type, m.pos);
        if (!params.insert(p.name).second) {
          fail(ErrorKind::DuplicateName, m.pos, "duplicate parameter '" + p.name + "'");
        }
        if (members.count(p.name) || prog_.find_class(p.name)) {
          fail(ErrorKind::DuplicateName, m.pos,
               "parameter '" + p.name + "' shadows a member or class name");
        }
      }
    }
    for (const auto& m : cls.methods) {
      Scope scope{&cls, &m, {}};
      check_block(m.body, scope);
    }
  }

  void check_block(const Block& block, Scope& scope) {
    for (const auto& s : block) check_stmt(s, scope);
  }

  void check_stmt(const Stmt& s, Scope& scope) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Stmt::Assign>) {
            check_lvalue(*node.target, scope);
            const SType lhs = type_of(*node.target, scope);
            const SType rhs = type_of(*node.value, scope);
            if (!(lhs == rhs)) {
              fail(ErrorKind::Resolution, s.pos,
                   "cannot assign " + describe(rhs) + " to " + describe(lhs));
            }
          } else if constexpr (std::is_same_v<T, Stmt::If>) {
            expect_kind(*node.cond, scope, SType::Kind::Bool, "condition");
            check_block(node.then_block, scope);
            check_block(node.else_block, scope);
          } else if constexpr (std::is_same_v<T, Stmt::For>) {
            if (scope.cls->find_field(node.var) || scope.cls->find_const(node.var) ||
                scope.method->find_param(node.var) || scope.is_loop_var(node.var) ||
                prog_.find_class(node.var)) {
              fail(ErrorKind::DuplicateName, s.pos,
                   "loop variable '" + node.var + "' shadows another name");
            }
            expect_kind(*node.array, scope, SType::Kind::RefArray, "loop range");
            scope.loop_vars.push_back(node.var);
            check_block(node.body, scope);
            scope.loop_vars.pop_back();
          } else if constexpr (std::is_same_v<T, Stmt::Call>) {
            const MethodDef* callee = scope.cls->find_method(node.method);
            if (!callee) {
              fail(ErrorKind::Resolution, s.pos,
                   "unknown method '" + node.method + "' in " + scope.cls->name);
            }
            if (callee->params.size() != node.args.size()) {
              fail(ErrorKind::Resolution, s.pos, "wrong number of arguments to " + node.method);
            }
            for (std::size_t i = 0; i < node.args.size(); ++i) {
              if (!(type_of(*node.args[i], scope) == SType::of(callee->params[i].type))) {
                fail(ErrorKind::Resolution, node.args[i]->pos,
                     "argument type mismatch for parameter '" + callee->params[i].name + "'");
              }
            }
          }
        },
        s.node);
  }

  void expect_kind(const Expr& e, const Scope& scope, SType::Kind kind, const char* what) {
    const SType t = type_of(e, scope);
    if (t.kind != kind) {
      fail(ErrorKind::Resolution, e.pos, std::string(what) + " has type " + describe(t));
    }
  }

  void check_lvalue(const Expr& e, const Scope& scope) {
    if (const auto* n = std::get_if<Expr::Name>(&e.node)) {
      if (!scope.cls->find_field(n->id)) {
        fail(ErrorKind::Resolution, e.pos, "'" + n->id + "' is not an assignable field");
      }
      return;
    }
    if (const auto* m = std::get_if<Expr::Member>(&e.node)) {
      const SType base = type_of(*m->base, scope);
      if (base.kind == SType::Kind::ClassRef && base.cls != scope.cls->name) {
        fail(ErrorKind::Resolution, e.pos, "cannot assign to a member of class " + base.cls);
      }
      const ClassDef* owner = prog_.find_class(base.cls);
      if (!owner || !owner->find_field(m->field)) {
        fail(ErrorKind::Resolution, e.pos, "'" + m->field + "' is not an assignable field");
      }
      return;
    }
    if (std::holds_alternative<Expr::Index>(e.node)) {
      (void)type_of(e, scope);
      return;
    }
    fail(ErrorKind::Resolution, e.pos, "invalid assignment target");
  }

  SType type_of(const Expr& e, const Scope& scope) {
    using K = SType::Kind;
    return std::visit(
        [&](const auto& node) -> SType {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Expr::IntLit>) {
            return {K::Int, {}};
          } else if constexpr (std::is_same_v<T, Expr::BoolLit>) {
            return {K::Bool, {}};
          } else if constexpr (std::is_same_v<T, Expr::Name>) {
            if (scope.is_loop_var(node.id)) return {K::Int, {}};
            if (const Param* p = scope.method->find_param(node.id)) return SType::of(p->type);
            if (const FieldDef* f = scope.cls->find_field(node.id)) return SType::of(f->type);
            if (scope.cls->find_const(node.id)) return {K::Int, {}};
            if (prog_.find_class(node.id)) return {K::ClassRef, node.id};
            fail(ErrorKind::Resolution, e.pos, "unknown name '" + node.id + "'");
          } else if constexpr (std::is_same_v<T, Expr::Member>) {
            const SType base = type_of(*node.base, scope);
            const ClassDef* owner = nullptr;
            if (base.kind == K::ClassRef) {
              owner = prog_.find_class(base.cls);
              if (owner->find_const(node.field)) return {K::Int, {}};
              if (base.cls == scope.cls->name) {
                if (const FieldDef* f = owner->find_field(node.field)) return SType::of(f->type);
              }
              fail(ErrorKind::Resolution, e.pos,
                   "'" + node.field + "' is not a constant of " + base.cls);
            }
            if (base.kind != K::Ref) {
              fail(ErrorKind::Resolution, e.pos,
                   "member access '." + node.field + "' on " + describe(base));
            }
            owner = prog_.find_class(base.cls);
            if (const FieldDef* f = owner->find_field(node.field)) return SType::of(f->type);
            if (owner->find_const(node.field)) return {K::Int, {}};
            fail(ErrorKind::Resolution, e.pos, "class " + base.cls + " has no field '" + node.field + "'");
          } else if constexpr (std::is_same_v<T, Expr::Index>) {
            const SType base = type_of(*node.base, scope);
            if (base.kind != K::RefArray) {
              fail(ErrorKind::Resolution, e.pos, "indexing a non-array " + describe(base));
            }
            const bool literal = std::holds_alternative<Expr::IntLit>(node.index->node);
            const auto* name = std::get_if<Expr::Name>(&node.index->node);
            if (!literal && !(name && scope.is_loop_var(name->id))) {
              fail(ErrorKind::Resolution, node.index->pos,
                   "array index must be an integer literal or a loop variable");
            }
            return {K::Ref, base.cls};
          } else if constexpr (std::is_same_v<T, Expr::Length>) {
            const SType base = type_of(*node.base, scope);
            if (base.kind != K::RefArray) {
              fail(ErrorKind::Resolution, e.pos, "'.length' on a non-array " + describe(base));
            }
            return {K::Int, {}};
          } else if constexpr (std::is_same_v<T, Expr::Unary>) {
            const SType t = type_of(*node.operand, scope);
            const K want = node.op == UnaryOp::Not ? K::Bool : K::Int;
            if (t.kind != want) fail(ErrorKind::Resolution, e.pos, "bad operand " + describe(t));
            return {want, {}};
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            const SType l = type_of(*node.lhs, scope);
            const SType r = type_of(*node.rhs, scope);
            if (node.op == BinaryOp::And || node.op == BinaryOp::Or) {
              if (l.kind != K::Bool || r.kind != K::Bool) {
                fail(ErrorKind::Resolution, e.pos, "logical operator on non-bool operands");
              }
              return {K::Bool, {}};
            }
            if (is_arithmetic(node.op)) {
              if (l.kind != K::Int || r.kind != K::Int) {
                fail(ErrorKind::Resolution, e.pos, "arithmetic on non-int operands");
              }
              return {K::Int, {}};
            }
            const bool ints = l.kind == K::Int && r.kind == K::Int;
            const bool bools = l.kind == K::Bool && r.kind == K::Bool &&
                               (node.op == BinaryOp::Eq || node.op == BinaryOp::Ne);
            if (!ints && !bools) {
              fail(ErrorKind::Resolution, e.pos,
                   "cannot compare " + describe(l) + " with " + describe(r));
            }
            return {K::Bool, {}};
          } else if constexpr (std::is_same_v<T, Expr::NewArray>) {
            if (!prog_.find_class(node.class_name)) {
              fail(ErrorKind::UndeclaredType, e.pos, "undeclared type '" + node.class_name + "'");
            }
            if (type_of(*node.size, scope).kind != K::Int) {
              fail(ErrorKind::Resolution, node.size->pos, "array size must be int");
            }
            return {K::RefArray, node.class_name};
          }
        },
        e.node);
  }

  const Program& prog_;
};

}  // namespace

Program parse_program(std::string_view source) {
  Parser parser(detail::tokenize(source));
  Program program = parser.program();
  Checker(program).run();
  return program;
}

}  // namespace cbr::ir
