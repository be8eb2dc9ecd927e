#include <set>

#include <json.hpp>

#include "cbr/error.hpp"
#include "cbr/symex.hpp"

namespace cbr::symex {

using json = nlohmann::ordered_json;

bool Extraction::any_truncated() const {
  for (const auto& m : methods) {
    if (m.truncated) return true;
  }
  return false;
}

Extraction extract_abstraction_functions(const ir::Program& program,
                                         std::span<const std::string> relevant,
                                         const SymexBounds& bounds) {
  bounds.validate();
  Extraction out;
  out.bounds = bounds;
  for (const auto& cls : program.classes) {
    for (const auto& k : cls.constants) out.constants[cls.name + "." + k.name] = k.value;
  }

  std::set<std::string> seen;
  for (const auto& cname : relevant) {
    const ir::ClassDef* cls = program.find_class(cname);
    if (!cls) throw Error(ErrorKind::Precondition, "relevant class '" + cname + "' is not declared");
    for (const auto& m : cls->methods) {
      MethodResult r = symbolic_execute(program, cls->name, m.name, bounds);
      out.methods.push_back({cls->name, m.name, r.paths.size(), r.states_explored, r.truncated,
                             r.truncation_reason});
      int k = 0;
      for (const auto& pc : r.paths) {
        auto af = strip_parameter_clauses(pc);
        if (!af || !seen.insert(render(*af)).second) continue;
        af->id = cls->name + "." + m.name + "-F" + std::to_string(++k);
        out.functions.push_back(std::move(*af));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// AF document

std::string write_af_json(const Extraction& x) {
  json bounds = {
      {"max_branches_per_path", x.bounds.max_branches_per_path},
      {"max_states", x.bounds.max_states},
      {"per_method_time_budget_ms", x.bounds.per_method_time_budget.count()},
      {"max_loop_unroll", x.bounds.max_loop_unroll},
  };
  json methods = json::array();
  for (const auto& m : x.methods) {
    methods.push_back({{"class", m.class_name},
                       {"method", m.method},
                       {"paths", m.paths},
                       {"states", m.states_explored},
                       {"truncated", m.truncated},
                       {"reason", m.truncation_reason}});
  }
  json constants = json::object();
  for (const auto& [name, value] : x.constants) constants[name] = value;

  json functions = json::array();
  for (const auto& af : x.functions) {
    json clauses = json::array();
    for (const auto& c : af.clauses) {
      clauses.push_back({{"lhs", render(*c.lhs)},
                         {"op", std::string(ir::to_string(c.op))},
                         {"rhs", render(*c.rhs)},
                         {"negated", c.negated}});
    }
    functions.push_back(
        {{"id", af.id}, {"class", af.class_name}, {"method", af.method}, {"clauses", clauses}});
  }

  json doc = {{"header",
               {{"bounds", bounds},
                {"truncated", x.any_truncated()},
                {"methods", methods},
                {"constants", constants},
                {"af_hash", x.af_hash()}}},
              {"functions", functions}};
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void schema(const std::string& what) {
  throw Error(ErrorKind::Schema, "AF document: " + what);
}

const json& member(const json& obj, const char* key, json::value_t type) {
  if (!obj.is_object() || !obj.contains(key)) schema(std::string("missing '") + key + "'");
  const json& v = obj.at(key);
  const bool ok = type == json::value_t::number_integer
                      ? v.is_number_integer()
                      : v.type() == type;
  if (!ok) schema(std::string("'") + key + "' has the wrong type");
  return v;
}

ir::BinaryOp parse_op(const std::string& s) {
  static const std::pair<const char*, ir::BinaryOp> table[] = {
      {"==", ir::BinaryOp::Eq}, {"!=", ir::BinaryOp::Ne}, {"<", ir::BinaryOp::Lt},
      {"<=", ir::BinaryOp::Le}, {">", ir::BinaryOp::Gt},  {">=", ir::BinaryOp::Ge},
  };
  for (const auto& [text, op] : table) {
    if (s == text) return op;
  }
  schema("unknown comparison '" + s + "'");
}

}  // namespace

Extraction read_af_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  Extraction x;
  const json& header = member(doc, "header", json::value_t::object);
  const json& b = member(header, "bounds", json::value_t::object);
  x.bounds.max_branches_per_path =
      member(b, "max_branches_per_path", json::value_t::number_integer).get<int>();
  x.bounds.max_states = member(b, "max_states", json::value_t::number_integer).get<std::int64_t>();
  x.bounds.per_method_time_budget = std::chrono::milliseconds(
      member(b, "per_method_time_budget_ms", json::value_t::number_integer).get<std::int64_t>());
  x.bounds.max_loop_unroll = member(b, "max_loop_unroll", json::value_t::number_integer).get<int>();

  if (header.contains("methods")) {
    for (const auto& m : member(header, "methods", json::value_t::array)) {
      MethodReport r;
      r.class_name = member(m, "class", json::value_t::string).get<std::string>();
      r.method = member(m, "method", json::value_t::string).get<std::string>();
      r.paths = member(m, "paths", json::value_t::number_integer).get<std::size_t>();
      r.states_explored = member(m, "states", json::value_t::number_integer).get<std::int64_t>();
      r.truncated = member(m, "truncated", json::value_t::boolean).get<bool>();
      r.truncation_reason = member(m, "reason", json::value_t::string).get<std::string>();
      x.methods.push_back(std::move(r));
    }
  }
  for (const auto& [name, value] : member(header, "constants", json::value_t::object).items()) {
    if (!value.is_number_integer()) schema("constant '" + name + "' is not an integer");
    x.constants[name] = value.get<std::int64_t>();
  }

  std::set<std::string> ids;
  for (const auto& f : member(doc, "functions", json::value_t::array)) {
    AbstractionFunction af;
    af.id = member(f, "id", json::value_t::string).get<std::string>();
    af.class_name = member(f, "class", json::value_t::string).get<std::string>();
    af.method = member(f, "method", json::value_t::string).get<std::string>();
    if (!ids.insert(af.id).second) schema("duplicate function id '" + af.id + "'");
    for (const auto& c : member(f, "clauses", json::value_t::array)) {
      Clause clause;
      clause.lhs = parse_term(member(c, "lhs", json::value_t::string).get<std::string>(), x.constants);
      clause.op = parse_op(member(c, "op", json::value_t::string).get<std::string>());
      clause.rhs = parse_term(member(c, "rhs", json::value_t::string).get<std::string>(), x.constants);
      clause.negated = member(c, "negated", json::value_t::boolean).get<bool>();
      af.clauses.push_back(std::move(clause));
    }
    if (af.clauses.empty()) schema("function '" + af.id + "' has no clauses");
    x.functions.push_back(std::move(af));
  }

  const std::string recorded = member(header, "af_hash", json::value_t::string).get<std::string>();
  if (recorded != x.af_hash()) {
    throw Error(ErrorKind::HashMismatch,
                "af_hash " + recorded + " does not match the function list (" + x.af_hash() + ")");
  }
  return x;
}

}  // namespace cbr::symex
