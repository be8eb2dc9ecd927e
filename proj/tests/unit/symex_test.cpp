#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cbr/error.hpp"
#include "cbr/state.hpp"
#include "cbr/symex.hpp"
#include "../support/fixtures.hpp"

using namespace cbr;
using symex::SymexBounds;

namespace {

std::set<std::string> rendered(const symex::MethodResult& r) {
  std::set<std::string> out;
  for (const auto& pc : r.paths) {
    std::string s;
    for (const auto& c : pc.clauses) s += (s.empty() ? "" : " && ") + render(c);
    out.insert(s);
  }
  return out;
}

bool contains_clause(const symex::MethodResult& r, const std::string& clause) {
  for (const auto& pc : r.paths)
    for (const auto& c : pc.clauses)
      if (render(c) == clause) return true;
  return false;
}

ConcreteState ints(const std::string& cls, const std::map<std::string, std::int64_t>& fields) {
  ConcreteState s;
  s.roots[cls] = "o";
  Object o{cls, {}};
  for (const auto& [k, v] : fields) {
    Value x;
    x.kind = Value::Kind::Int;
    x.int_value = v;
    o.fields[k] = x;
  }
  s.objects["o"] = o;
  return s;
}

}  // namespace

TEST(CartExtraction, MatchesEveryReferenceRow) {
  const auto x = fixtures::cart_extraction();
  EXPECT_TRUE(fixtures::unmatched_cart_rows(x).empty());
  EXPECT_EQ(x.functions.size(), 15u) << "14 reference rows plus one sibling path";
  EXPECT_FALSE(x.any_truncated());
}

TEST(CartExtraction, IdsFollowClassMethodOrdinal) {
  const auto x = fixtures::cart_extraction();
  std::map<std::string, int> next;
  for (const auto& f : x.functions) {
    const int k = ++next[f.method];
    EXPECT_EQ(f.id, f.class_name + "." + f.method + "-F" + std::to_string(k));
    EXPECT_FALSE(f.clauses.empty());
    for (const auto& c : f.clauses) {
      EXPECT_FALSE(mentions_input(*c.lhs) || mentions_input(*c.rhs)) << render(c);
    }
  }
  EXPECT_EQ(next["addItem"], 5);
  EXPECT_EQ(next["emptyCart"], 2);
  EXPECT_EQ(next["applyDiscount"], 4);
  EXPECT_EQ(next["calculateTotal"], 4);
}

TEST(CartExtraction, IsDeterministic) {
  EXPECT_EQ(symex::write_af_json(fixtures::cart_extraction()), symex::write_af_json(fixtures::cart_extraction()));
}

TEST(CartExtraction, ProductAloneYieldsNothing) {
  const auto p = fixtures::cart_program();
  const std::vector<std::string> relevant{"Product"};
  EXPECT_TRUE(symex::extract_abstraction_functions(p, relevant, {}).functions.empty());
}

TEST(SymbolicExecute, EmptyCartSkipsTheResetBranch) {
  const auto r = symex::symbolic_execute(fixtures::cart_program(), "Cart", "emptyCart", {});
  EXPECT_TRUE(contains_clause(r, "Cart.nProducts <= 0"));
}

TEST(SymbolicExecute, CalculateTotalHasTheEmptyLoopPath) {
  const auto r = symex::symbolic_execute(fixtures::cart_program(), "Cart", "calculateTotal", {});
  EXPECT_TRUE(contains_clause(r, "Cart.products.length == 0"));
}

TEST(SymbolicExecute, EmptyBodyHasOneUnguardedPath) {
  const auto p = ir::parse_program("class A { field x: int; method m() { } }");
  const auto r = symex::symbolic_execute(p, "A", "m", {});
  ASSERT_EQ(r.paths.size(), 1u);
  EXPECT_TRUE(r.paths[0].clauses.empty());
  EXPECT_FALSE(symex::strip_parameter_clauses(r.paths[0]).has_value());
}

TEST(SymbolicExecute, StraightLineProgramYieldsNoFunctions) {
  const auto p = ir::parse_program("class A { field x: int; method m() { x = x + 1; x = 2 * x; } }");
  const std::vector<std::string> relevant{"A"};
  EXPECT_TRUE(symex::extract_abstraction_functions(p, relevant, {}).functions.empty());
}

TEST(SymbolicExecute, GuardsSeePriorAssignments) {
  const auto p = ir::parse_program("class A { field x: int; method m() { x = x + 1; if (x > 2) { x = 0; } } }");
  const auto r = symex::symbolic_execute(p, "A", "m", {});
  EXPECT_EQ(rendered(r), (std::set<std::string>{"A.x + 1 > 2", "A.x + 1 <= 2"}));
}

TEST(SymbolicExecute, ThenBranchIsExploredFirst) {
  const auto p = ir::parse_program("class A { field x: int; method m() { if (x == 1) { x = 2; } else { x = 3; } } }");
  const auto r = symex::symbolic_execute(p, "A", "m", {});
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_EQ(render(r.paths[0].clauses.at(0)), "A.x == 1");
  EXPECT_EQ(r.paths[0].path_id, 0u);
  EXPECT_EQ(r.paths[1].path_id, 1u);
}

TEST(Strip, DropsOnlyParameterClauses) {
  symex::PathCondition pc;
  pc.class_name = "Cart";
  pc.method = "addItem";
  const Clause param_clause{Term::param("p.value"), ir::BinaryOp::Gt, Term::int_lit(0), false};
  const Clause state_clause{Term::state("Cart", {{PathSeg::Kind::Field, "nProducts", 0}}), ir::BinaryOp::Eq,
                            Term::int_lit(0), false};
  pc.clauses = {param_clause, state_clause};
  auto af = symex::strip_parameter_clauses(pc);
  ASSERT_TRUE(af.has_value());
  ASSERT_EQ(af->clauses.size(), 1u);
  EXPECT_EQ(render(af->clauses[0]), "Cart.nProducts == 0");
  EXPECT_TRUE(mentions_input(*pc.clauses[0].lhs));

  pc.clauses = {param_clause};
  EXPECT_FALSE(symex::strip_parameter_clauses(pc).has_value());

  pc.clauses = {state_clause, state_clause};
  af = symex::strip_parameter_clauses(pc);
  ASSERT_TRUE(af.has_value());
  EXPECT_EQ(af->clauses.size(), 2u);
}

TEST(Extract, TwinMethodsAreDeduplicated) {
  const auto p = ir::parse_program(
      "class A { field x: int;\n"
      "  method m() { if (x > 0) { x = 0; } }\n"
      "  method n() { if (x > 0) { x = 1; } }\n"
      "}");
  const std::vector<std::string> relevant{"A"};
  const auto x = symex::extract_abstraction_functions(p, relevant, {});
  std::vector<std::string> texts;
  for (const auto& f : x.functions) texts.push_back(render(f));
  // Brute-force uniqueness check over the rendered conjunctions.
  for (std::size_t i = 0; i < texts.size(); ++i)
    for (std::size_t j = i + 1; j < texts.size(); ++j) EXPECT_NE(texts[i], texts[j]);
  EXPECT_EQ(texts, (std::vector<std::string>{"A.x > 0", "A.x <= 0"}));
  EXPECT_EQ(x.functions[0].id, "A.m-F1");
}

TEST(Bounds, MustBePositive) {
  SymexBounds b;
  EXPECT_NO_THROW(b.validate());
  b.max_branches_per_path = 0;
  EXPECT_THROW(b.validate(), Error);
  b = {};
  b.max_states = 0;
  EXPECT_THROW(b.validate(), Error);
  b = {};
  b.per_method_time_budget = std::chrono::milliseconds(0);
  EXPECT_THROW(b.validate(), Error);
  b = {};
  b.max_loop_unroll = 0;
  EXPECT_THROW(b.validate(), Error);
}

namespace {

std::string many_ifs(int n) {
  std::string src = "class A { field x: int; field y: int; method m() {\n";
  for (int i = 0; i < n; ++i) src += "  if (x > " + std::to_string(i) + ") { y = y + 1; }\n  if (y == " + std::to_string(i) + ") { x = x - 1; }\n";
  return src + "} }";
}

}  // namespace

TEST(Bounds, BranchLimitTruncatesPaths) {
  const auto p = ir::parse_program(many_ifs(8));
  SymexBounds b;
  b.max_branches_per_path = 3;
  b.max_states = 1000000;
  const auto r = symex::symbolic_execute(p, "A", "m", b);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.truncation_reason, "max_branches");
  EXPECT_LE(r.max_forks_on_path, 3);
  EXPECT_LE(r.paths.size(), std::size_t{1} << 3);
  bool any = false;
  for (const auto& pc : r.paths) any = any || pc.truncated;
  EXPECT_TRUE(any);
}

TEST(Bounds, StateLimitStopsExploration) {
  const auto p = ir::parse_program(many_ifs(8));
  SymexBounds b;
  b.max_branches_per_path = 30;
  b.max_states = 50;
  const auto r = symex::symbolic_execute(p, "A", "m", b);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.truncation_reason, "max_states");
  EXPECT_LE(r.states_explored, 50);
}

TEST(Bounds, PathCountNeverExceedsBranchBound) {
  for (int n = 1; n <= 6; ++n) {
    const auto p = ir::parse_program(many_ifs(n));
    for (int k = 1; k <= 6; ++k) {
      SymexBounds b;
      b.max_branches_per_path = k;
      const auto r = symex::symbolic_execute(p, "A", "m", b);
      EXPECT_LE(r.paths.size(), std::size_t{1} << k);
      EXPECT_LE(r.states_explored, b.max_states);
    }
  }
}

// Path conditions of a parameter-free method split the concrete state space:
// every concrete state satisfies exactly one of them. Checked exhaustively
// over a small integer box with the state evaluator as the oracle.
TEST(PathPartition, EveryConcreteStateTakesExactlyOnePath) {
  const auto p = ir::parse_program(
      "class A { field x: int; field y: int; field z: int;\n"
      "  method m() {\n"
      "    z = x + y;\n"
      "    if (x > 0) {\n"
      "      if (y == x) { z = 1; } else { if (z >= 3) { return; } }\n"
      "    } else {\n"
      "      if (y < 0 || x == -2) { z = 3; } else { y = y - 1; }\n"
      "      if (!(y != 0) && z < 1) { z = 0; }\n"
      "    }\n"
      "    if (z - 1 > y) { x = 0; }\n"
      "  }\n"
      "}");
  const auto r = symex::symbolic_execute(p, "A", "m", {});
  ASSERT_FALSE(r.truncated);
  std::vector<AbstractionFunction> pcs;
  for (const auto& pc : r.paths) pcs.push_back({"", "A", "m", pc.clauses});
  for (int x = -3; x <= 3; ++x) {
    for (int y = -3; y <= 3; ++y) {
      for (int z = -3; z <= 3; ++z) {
        const auto s = ints("A", {{"x", x}, {"y", y}, {"z", z}});
        int holding = 0;
        for (const auto& af : pcs) {
          const Ternary v = eval_function(af, s);
          ASSERT_NE(v, Ternary::U);
          holding += v == Ternary::T;
        }
        EXPECT_EQ(holding, 1) << "x=" << x << " y=" << y << " z=" << z;
      }
    }
  }
}

TEST(AfJson, RoundTripIsByteIdentical) {
  const auto x = fixtures::cart_extraction();
  const auto text = symex::write_af_json(x);
  const auto back = symex::read_af_json(text);
  EXPECT_EQ(symex::write_af_json(back), text);
  EXPECT_EQ(back.af_hash(), x.af_hash());
  EXPECT_EQ(back.constants, x.constants);
}

TEST(AfJson, TamperedHashIsRejected) {
  auto text = symex::write_af_json(fixtures::cart_extraction());
  const auto at = text.find("\"af_hash\": \"");
  ASSERT_NE(at, std::string::npos);
  text[at + 12] = text[at + 12] == '0' ? '1' : '0';
  try {
    symex::read_af_json(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HashMismatch);
  }
}

TEST(AfJson, MalformedDocumentsAreSchemaErrors) {
  for (const char* doc : {"", "[]", "{\"functions\": []}", "{\"header\": {}, \"functions\": 3}"}) {
    try {
      symex::read_af_json(doc);
      FAIL() << doc;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Schema) << doc;
    }
  }
}

TEST(AfHash, IsFnv1aOverNewlineJoinedIds) {
  // Independent FNV-1a 64 over "a\nb".
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : std::string("a\nb")) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  EXPECT_EQ(af_list_hash(std::vector<std::string>{"a", "b"}), buf);
  EXPECT_NE(af_list_hash(std::vector<std::string>{"a", "b"}), af_list_hash(std::vector<std::string>{"b", "a"}));
}
