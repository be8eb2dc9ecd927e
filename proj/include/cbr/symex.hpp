#pragma once

// Bounded symbolic execution over the mini-IR and derivation of abstraction
// functions from the resulting path conditions.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/ir.hpp"
#include "cbr/term.hpp"

namespace cbr::symex {

struct SymexBounds {
  int max_branches_per_path = 10;
  std::int64_t max_states = 1000;
  std::chrono::milliseconds per_method_time_budget{60000};
  // Iterations materialized for a loop over an array of symbolic length.
  // Past the last one the loop exits without a guard.
  int max_loop_unroll = 1;

  /// Throws Error(Precondition) unless every bound is strictly positive.
  void validate() const;

  friend bool operator==(const SymexBounds&, const SymexBounds&) = default;
};

struct PathCondition {
  std::vector<Clause> clauses;
  std::string class_name;
  std::string method;
  std::size_t path_id = 0;  // exploration order within the method
  bool truncated = false;   // cut short by max_branches_per_path
};

struct MethodResult {
  std::vector<PathCondition> paths;
  bool truncated = false;
  std::string truncation_reason;  // "", "max_branches", "max_states" or "time_budget"
  std::int64_t states_explored = 0;
  int max_forks_on_path = 0;
};

/// Depth-first, then-branch first. Same-class calls are inlined one level
/// deep; deeper calls havoc the fields the callee may assign.
MethodResult symbolic_execute(const ir::Program& program, std::string_view class_name,
                              std::string_view method, const SymexBounds& bounds);

/// Drops every clause mentioning a parameter or a havoc'd value. Returns
/// nullopt when nothing survives. The result has an empty id.
std::optional<AbstractionFunction> strip_parameter_clauses(const PathCondition& pc);

struct MethodReport {
  std::string class_name;
  std::string method;
  std::size_t paths = 0;
  std::int64_t states_explored = 0;
  bool truncated = false;
  std::string truncation_reason;
};

/// Everything the AF file carries: the function list plus the header.
struct Extraction {
  SymexBounds bounds;
  std::vector<MethodReport> methods;
  std::map<std::string, std::int64_t> constants;  // "Class.NAME" -> value
  std::vector<AbstractionFunction> functions;

  bool any_truncated() const;
  std::string af_hash() const { return af_list_hash(functions); }
};

/// Classes in `relevant` order, methods in declaration order, paths in
/// exploration order. Syntactic duplicates keep the first occurrence; ids are
/// numbered per method over the survivors.
Extraction extract_abstraction_functions(const ir::Program& program,
                                         std::span<const std::string> relevant,
                                         const SymexBounds& bounds);

std::string write_af_json(const Extraction& extraction);

/// Throws Error(Schema) on a malformed document and Error(HashMismatch) when
/// the recorded af_hash disagrees with the function ids.
Extraction read_af_json(std::string_view text);

}  // namespace cbr::symex
