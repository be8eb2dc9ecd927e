#pragma once

// Fixtures shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cbr/collector.hpp"
#include "cbr/filtering.hpp"
#include "cbr/ir.hpp"
#include "cbr/symex.hpp"
#include "cbr/term.hpp"

namespace fixtures {

inline std::string data_path(const std::string& rel) { return std::string(CBR_DATA_DIR) + "/" + rel; }

inline cbr::ir::Program cart_program() {
  return cbr::ir::parse_program(cbr::collector::read_file(data_path("cart/cart.mir")));
}

inline cbr::symex::Extraction cart_extraction() {
  const auto p = cart_program();
  const std::vector<std::string> targets{"Cart"};
  const auto relevant = cbr::ir::detect_relevant_classes(cbr::ir::build_dependency_graph(p), targets);
  return cbr::symex::extract_abstraction_functions(p, relevant, {});
}

// Reference table of functions extracted from the Cart class, verbatim
// apart from TeX escapes.
inline const std::vector<std::string>& cart_table() {
  static const std::vector<std::string> rows = {
      "Cart.nProducts != 0 && Cart.products.length >= 0",
      "Cart.nProducts == 0 && Cart.CART_SIZE >= 0 && Cart.nProducts < Cart.CART_SIZE",
      "Cart.nProducts == 0 && Cart.CART_SIZE >= 0 && Cart.nProducts >= Cart.CART_SIZE",
      "Cart.nProducts == 0 && Cart.products.length == 0",
      "Cart.nProducts > 0 && Cart.products.length > 0",
      "Cart.nProducts > 0 && Cart.products.length == 0",
      "Cart.nProducts > 0 && Cart.products.length > 0 && Cart.products.[0].value >= Cart.PRICE",
      "Cart.nProducts > 0 && Cart.products.length > 0 && Cart.products.[0].value < Cart.PRICE",
      "Cart.products.length > 0 && Cart.products.[0].taxFree == true",
      "Cart.products.length > 0 && Cart.products.[0].taxFree == false",
      "Cart.products.length > 0",
      "Cart.products.length == 0",
      "Cart.nProducts <= 0",
      "Cart.nProducts > 0 && Cart.CART_SIZE >= 0",
  };
  return rows;
}

inline std::vector<std::string> split_conjunction(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = text.find(" && ", start);
    parts.push_back(text.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) return parts;
    start = at + 4;
  }
}

// Parses "lhs op rhs" with a single comparison operator.
inline cbr::Clause parse_clause(const std::string& text, const std::map<std::string, std::int64_t>& constants) {
  static const std::vector<std::pair<std::string, cbr::ir::BinaryOp>> ops = {
      {" == ", cbr::ir::BinaryOp::Eq}, {" != ", cbr::ir::BinaryOp::Ne}, {" <= ", cbr::ir::BinaryOp::Le},
      {" >= ", cbr::ir::BinaryOp::Ge}, {" < ", cbr::ir::BinaryOp::Lt},  {" > ", cbr::ir::BinaryOp::Gt}};
  for (const auto& [spelling, op] : ops) {
    const auto at = text.find(spelling);
    if (at == std::string::npos) continue;
    return {cbr::parse_term(text.substr(0, at), constants), op, cbr::parse_term(text.substr(at + spelling.size()), constants),
            false};
  }
  throw std::runtime_error("no comparison in clause: " + text);
}

/// Order-insensitive normalized clause set of a conjunction.
inline std::set<std::string> clause_set(const std::vector<cbr::Clause>& clauses) {
  std::set<std::string> out;
  for (const auto& c : clauses) out.insert(cbr::render(cbr::normalize(c)));
  return out;
}

inline std::set<std::string> clause_set(const std::string& conjunction,
                                        const std::map<std::string, std::int64_t>& constants) {
  std::vector<cbr::Clause> clauses;
  for (const auto& part : split_conjunction(conjunction)) clauses.push_back(parse_clause(part, constants));
  return clause_set(clauses);
}

/// Table rows with no extracted function of equal clause set.
inline std::vector<std::string> unmatched_cart_rows(const cbr::symex::Extraction& x) {
  std::set<std::set<std::string>> extracted;
  for (const auto& f : x.functions) extracted.insert(clause_set(f.clauses));
  std::vector<std::string> missing;
  for (const auto& row : cart_table()) {
    if (!extracted.count(clause_set(row, x.constants))) missing.push_back(row);
  }
  return missing;
}

// The 7-function, 5-evaluation filtering example. Rows 2 and 3 coincide, AF1
// is all U, AF3 all T, and AF2 equals AF6 once the duplicate row is gone; the
// remaining cells were completed by exhaustive search so that exactly AF5 and
// AF7 survive, with AF2 then AF4 removed as redundant.
inline cbr::filtering::EvalMatrix golden_filter_matrix() {
  const std::vector<std::string> rows = {"UUTTTUT", "UFTTFFF", "UFTTFFF", "UFTTTFF", "UFTFTFU"};
  cbr::filtering::EvalMatrix m;
  m.columns = {"AF1", "AF2", "AF3", "AF4", "AF5", "AF6", "AF7"};
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::vector<cbr::Ternary> row;
    for (char c : r) row.push_back(cbr::ternary_from_char(c));
    m.rows.push_back(row);
    m.provenance.push_back({i < 3 ? "run1" : "run2", i < 3 ? i : i - 3});
    ++i;
  }
  return m;
}

// Three shopping sessions over the two-function AF list (no cart, tax-free).
inline std::vector<cbr::AbstractionFunction> session_afs() {
  return cbr::symex::read_af_json(cbr::collector::read_file(data_path("cart/session_afs.json"))).functions;
}

inline std::vector<cbr::collector::Run> session_runs() {
  return cbr::collector::load_runs(data_path("cart/sessions.jsonl"));
}

inline std::vector<cbr::collector::Burst> session_bursts() {
  return cbr::collector::parse_bursts(cbr::collector::read_file(data_path("cart/session_bursts.jsonl")));
}

}  // namespace fixtures
