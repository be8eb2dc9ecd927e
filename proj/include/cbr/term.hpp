#pragma once

// Terms, clauses and abstraction functions: the vocabulary shared by the
// symbolic executor (which produces them) and the state evaluator (which
// interprets them against concrete heaps).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/ir.hpp"

namespace cbr {

/// One step of a state path after the root class name.
struct PathSeg {
  enum class Kind { Field, Index, Length };
  Kind kind = Kind::Field;
  std::string field;        // Field only
  std::int64_t index = 0;   // Index only

  friend bool operator==(const PathSeg&, const PathSeg&) = default;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind {
    IntLit,
    BoolLit,
    State,   // Root.seg.seg... rooted at the monitored instance of a class
    Const,   // Class.NAME, value known statically but kept symbolic
    Param,   // method input, possibly a path below a parameter object
    Opaque,  // havoc'd or otherwise unknowable value
    Arith,
    Neg,
  };

  Kind kind = Kind::IntLit;
  std::int64_t int_value = 0;  // IntLit, Const
  bool bool_value = false;     // BoolLit
  std::string name;            // State root class, Const "C.K", Param/Opaque label
  std::vector<PathSeg> path;   // State only
  ir::BinaryOp op = ir::BinaryOp::Add;  // Arith only
  TermPtr lhs;
  TermPtr rhs;

  static TermPtr int_lit(std::int64_t v);
  static TermPtr bool_lit(bool v);
  static TermPtr state(std::string root, std::vector<PathSeg> path);
  static TermPtr constant(std::string qualified, std::int64_t value);
  static TermPtr param(std::string label);
  static TermPtr opaque(std::string label);
  /// Folds literal operands; division or modulo by a literal zero yields Opaque.
  static TermPtr arith(ir::BinaryOp op, TermPtr lhs, TermPtr rhs);
  static TermPtr neg(TermPtr operand);

  bool is_literal() const { return kind == Kind::IntLit || kind == Kind::BoolLit; }
  bool is_length() const {
    return kind == Kind::State && !path.empty() && path.back().kind == PathSeg::Kind::Length;
  }
};

/// True when the term or any subterm is a Param or Opaque.
bool mentions_input(const Term& t);

/// Canonical text, e.g. `Cart.products[0].value`, `Cart.nProducts + 1`.
std::string render(const Term& t);

/// Parses the canonical text back. Names present in `constants` become Const
/// terms; every other dotted name is a State path. Accepts the `a.[0]` index
/// spelling as well as `a[0]`. Throws Error(Schema) on malformed text.
TermPtr parse_term(std::string_view text, const std::map<std::string, std::int64_t>& constants);

struct Clause {
  TermPtr lhs;
  ir::BinaryOp op = ir::BinaryOp::Eq;  // always a comparison
  TermPtr rhs;
  bool negated = false;
};

std::string render(const Clause& c);

/// Same clause with the comparison inverted and `negated` untouched.
Clause invert(const Clause& c);

/// Literal on the right, `!= true` as `== false`, etc. Does not apply the
/// array-length axiom; that is the executor's business.
Clause normalize(Clause c);

struct AbstractionFunction {
  std::string id;  // "<class>.<method>-F<k>"
  std::string class_name;
  std::string method;
  std::vector<Clause> clauses;
};

/// Conjunction text used for syntactic dedup: clause renderings joined by " && ".
std::string render(const AbstractionFunction& af);

/// FNV-1a 64 over the AF ids joined by '\n', as 16 lowercase hex digits.
std::string af_list_hash(const std::vector<AbstractionFunction>& afs);
std::string af_list_hash(const std::vector<std::string>& ids);

}  // namespace cbr
