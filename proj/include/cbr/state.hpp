#pragma once

// Concrete heaps as recorded in trace files, and their three-valued
// abstraction under an ordered list of abstraction functions.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/term.hpp"

namespace cbr {

enum class Ternary : std::uint8_t { F, T, U };

char to_char(Ternary v);
/// Accepts 'T', 'F' or 'U'; throws Error(Schema) otherwise.
Ternary ternary_from_char(char c);
inline Ternary negate(Ternary v) {
  return v == Ternary::T ? Ternary::F : v == Ternary::F ? Ternary::T : Ternary::U;
}

/// A field or array-cell value. Ref names an object id.
struct Value {
  enum class Kind { Null, Int, Bool, Ref, Array };
  Kind kind = Kind::Null;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::string ref;
  std::vector<Value> items;

  friend bool operator==(const Value&, const Value&) = default;
};

struct Object {
  std::string class_name;
  std::map<std::string, Value> fields;

  friend bool operator==(const Object&, const Object&) = default;
};

struct ConcreteState {
  // Monitored instance per class; nullopt when the class is listed but the
  // instance does not exist (JSON null).
  std::map<std::string, std::optional<std::string>> roots;
  std::map<std::string, Object> objects;

  friend bool operator==(const ConcreteState&, const ConcreteState&) = default;
};

/// Throws Error(StateReference) naming the first dangling object id.
void validate_state(const ConcreteState& s);

struct AbstractState {
  std::vector<Ternary> values;
  std::string af_hash;

  /// "UFT"
  std::string str() const;
  /// "(U, F, T)"
  std::string pretty() const;
  /// Inverse of str(); throws Error(Schema) on other characters.
  static AbstractState parse(std::string_view text, std::string af_hash);

  friend bool operator==(const AbstractState&, const AbstractState&) = default;
};

/// Unknown when a path cannot be resolved (absent root, null reference,
/// missing field, index out of range) or when the operands are not
/// comparable scalars.
Ternary eval_clause(const Clause& c, const ConcreteState& s);

/// U if any clause is U, else F if any clause is F, else T. Unknown wins over
/// false on purpose; this is not Kleene conjunction.
Ternary eval_function(const AbstractionFunction& af, const ConcreteState& s);

AbstractState abstract_state(const std::vector<AbstractionFunction>& afs, const ConcreteState& s);

}  // namespace cbr
