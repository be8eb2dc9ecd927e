#include <sstream>

#include "cbr/ir.hpp"

namespace cbr::ir {

namespace {

// Binding strength, loosest first. Primaries bind tightest.
enum Prec { POr = 1, PAnd, PCmp, PAdd, PMul, PUnary, PPostfix, PPrimary };

int prec_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return POr;
    case BinaryOp::And: return PAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return PAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return PMul;
    default: return PCmp;
  }
}

int prec_of(const Expr& e) {
  if (const auto* b = std::get_if<Expr::Binary>(&e.node)) return prec_of(b->op);
  if (std::holds_alternative<Expr::Unary>(e.node)) return PUnary;
  if (std::holds_alternative<Expr::Member>(e.node) || std::holds_alternative<Expr::Index>(e.node) ||
      std::holds_alternative<Expr::Length>(e.node)) {
    return PPostfix;
  }
  return PPrimary;
}

void emit(std::ostream& out, const Expr& e);

void emit_wrapped(std::ostream& out, const Expr& e, bool parens) {
  if (parens) out << '(';
  emit(out, e);
  if (parens) out << ')';
}

void emit(std::ostream& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::IntLit>) {
          out << n.value;
        } else if constexpr (std::is_same_v<T, Expr::BoolLit>) {
          out << (n.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, Expr::Name>) {
          out << n.id;
        } else if constexpr (std::is_same_v<T, Expr::Member>) {
          emit_wrapped(out, *n.base, prec_of(*n.base) < PPostfix);
          out << '.' << n.field;
        } else if constexpr (std::is_same_v<T, Expr::Index>) {
          emit_wrapped(out, *n.base, prec_of(*n.base) < PPostfix);
          out << '[';
          emit(out, *n.index);
          out << ']';
        } else if constexpr (std::is_same_v<T, Expr::Length>) {
          emit_wrapped(out, *n.base, prec_of(*n.base) < PPostfix);
          out << ".length";
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          out << (n.op == UnaryOp::Not ? "!" : "-");
          // "- -x" must not fuse; a parenthesized operand avoids that.
          const bool nested_neg = n.op == UnaryOp::Neg && [&] {
            const auto* u = std::get_if<Expr::Unary>(&n.operand->node);
            return u && u->op == UnaryOp::Neg;
          }();
          emit_wrapped(out, *n.operand, prec_of(*n.operand) < PUnary || nested_neg);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          const int p = prec_of(n.op);
          // Left-associative; comparisons do not chain at all.
          emit_wrapped(out, *n.lhs, p == PCmp ? prec_of(*n.lhs) <= p : prec_of(*n.lhs) < p);
          out << ' ' << to_string(n.op) << ' ';
          emit_wrapped(out, *n.rhs, prec_of(*n.rhs) <= p);
        } else if constexpr (std::is_same_v<T, Expr::NewArray>) {
          out << "new " << n.class_name << '[';
          emit(out, *n.size);
          out << ']';
        }
      },
      e.node);
}

void indent(std::ostream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "  ";
}

void emit_block(std::ostream& out, const Block& block, int depth);

void emit_stmt(std::ostream& out, const Stmt& s, int depth) {
  indent(out, depth);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Stmt::Assign>) {
          emit(out, *n.target);
          out << " = ";
          emit(out, *n.value);
          out << ";\n";
        } else if constexpr (std::is_same_v<T, Stmt::If>) {
          out << "if (";
          emit(out, *n.cond);
          out << ") {\n";
          emit_block(out, n.then_block, depth + 1);
          indent(out, depth);
          out << "}";
          if (!n.else_block.empty()) {
            out << " else {\n";
            emit_block(out, n.else_block, depth + 1);
            indent(out, depth);
            out << "}";
          }
          out << "\n";
        } else if constexpr (std::is_same_v<T, Stmt::For>) {
          out << "for " << n.var << " in ";
          emit(out, *n.array);
          out << " {\n";
          emit_block(out, n.body, depth + 1);
          indent(out, depth);
          out << "}\n";
        } else if constexpr (std::is_same_v<T, Stmt::Return>) {
          out << "return;\n";
        } else if constexpr (std::is_same_v<T, Stmt::Call>) {
          out << n.method << '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out << ", ";
            emit(out, *n.args[i]);
          }
          out << ");\n";
        }
      },
      s.node);
}

void emit_block(std::ostream& out, const Block& block, int depth) {
  for (const auto& s : block) emit_stmt(out, s, depth);
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::ostringstream out;
  emit(out, expr);
  return out.str();
}

std::string print_program(const Program& program) {
  std::ostringstream out;
  for (std::size_t c = 0; c < program.classes.size(); ++c) {
    const ClassDef& cls = program.classes[c];
    if (c) out << '\n';
    out << "class " << cls.name << " {\n";
    for (const auto& k : cls.constants) out << "  const " << k.name << " = " << k.value << ";\n";
    for (const auto& f : cls.fields) out << "  field " << f.name << ": " << to_string(f.type) << ";\n";
    for (const auto& m : cls.methods) {
      out << "  method " << m.name << '(';
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) out << ", ";
        out << m.params[i].name << ": " << to_string(m.params[i].type);
      }
      out << ") {\n";
      emit_block(out, m.body, 2);
      out << "  }\n";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace cbr::ir
