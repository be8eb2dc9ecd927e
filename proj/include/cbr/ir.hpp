#pragma once

// Mini imperative IR standing in for the monitored object-oriented program,
// plus class-level dependency analysis (relevant-class detection).
//
// The grammar is documented in docs/mini-ir.ebnf. Everything here is an
// immutable value once parsed.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cbr::ir {

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Type {
  enum class Kind { Int, Bool, Ref, RefArray };

  Kind kind = Kind::Int;
  std::string class_name;  // Ref and RefArray only

  static Type integer() { return {Kind::Int, {}}; }
  static Type boolean() { return {Kind::Bool, {}}; }
  static Type ref(std::string cls) { return {Kind::Ref, std::move(cls)}; }
  static Type ref_array(std::string cls) { return {Kind::RefArray, std::move(cls)}; }

  bool is_scalar() const { return kind == Kind::Int || kind == Kind::Bool; }
  bool references_class() const { return !is_scalar(); }

  friend bool operator==(const Type&, const Type&) = default;
};

std::string to_string(const Type& type);

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view to_string(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_arithmetic(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct IntLit {
    std::int64_t value;
  };
  struct BoolLit {
    bool value;
  };
  /// Bare identifier: loop variable, parameter, field or constant of the
  /// enclosing class, or a class name used as a qualifier.
  struct Name {
    std::string id;
  };
  struct Member {
    ExprPtr base;
    std::string field;
  };
  struct Index {
    ExprPtr base;
    ExprPtr index;
  };
  struct Length {
    ExprPtr base;
  };
  struct Unary {
    UnaryOp op;
    ExprPtr operand;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct NewArray {
    std::string class_name;
    ExprPtr size;
  };

  using Node = std::variant<IntLit, BoolLit, Name, Member, Index, Length, Unary, Binary, NewArray>;

  Node node;
  SourcePos pos;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
  struct Assign {
    ExprPtr target;
    ExprPtr value;
  };
  struct If {
    ExprPtr cond;
    Block then_block;
    Block else_block;
  };
  /// `for i in arr { ... }` iterates i = 0 .. arr.length - 1.
  struct For {
    std::string var;
    ExprPtr array;
    Block body;
  };
  struct Return {};
  /// Call of another method of the enclosing class.
  struct Call {
    std::string method;
    std::vector<ExprPtr> args;
  };

  using Node = std::variant<Assign, If, For, Return, Call>;

  Node node;
  SourcePos pos;
};

struct ConstDef {
  std::string name;
  std::int64_t value = 0;
  SourcePos pos;
};

struct FieldDef {
  std::string name;
  Type type;
  SourcePos pos;
};

struct Param {
  std::string name;
  Type type;
};

struct MethodDef {
  std::string name;
  std::vector<Param> params;
  Block body;
  SourcePos pos;

  const Param* find_param(std::string_view id) const;
};

struct ClassDef {
  std::string name;
  std::vector<ConstDef> constants;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> methods;
  SourcePos pos;

  const ConstDef* find_const(std::string_view id) const;
  const FieldDef* find_field(std::string_view id) const;
  const MethodDef* find_method(std::string_view id) const;
};

struct Program {
  std::vector<ClassDef> classes;

  const ClassDef* find_class(std::string_view id) const;
  /// Declaration index, or classes.size() when absent.
  std::size_t class_index(std::string_view id) const;
};

/// Parses and validates mini-IR source. Throws cbr::Error with kind Syntax
/// (with line/column), UndeclaredType, DuplicateName or Resolution.
Program parse_program(std::string_view source);

/// Canonical pretty-print; parse_program(print_program(p)) prints identically.
std::string print_program(const Program& program);
std::string print_expr(const Expr& expr);

struct DependencyGraph {
  std::vector<std::string> nodes;               // declaration order
  std::vector<std::vector<std::size_t>> edges;  // sorted target indices per node

  std::size_t index_of(std::string_view name) const;
  bool has_edge(std::string_view from, std::string_view to) const;
  std::size_t edge_count() const;
};

/// Edge A -> B iff a field type, parameter type or any expression of A
/// mentions class B. Transitive edges are not materialized.
DependencyGraph build_dependency_graph(const Program& program);

/// Forward reachability from `targets`, breadth-first, seeded in declaration
/// order. Throws UnknownTarget naming the first missing class.
std::vector<std::string> detect_relevant_classes(const DependencyGraph& graph,
                                                 std::span<const std::string> targets);

}  // namespace cbr::ir
