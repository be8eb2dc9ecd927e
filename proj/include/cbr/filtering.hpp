#pragma once

// Reduction of the evaluation matrix (snapshots x abstraction functions) to a
// small set of functions that still tells every observed state apart.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbr/state.hpp"

namespace cbr::filtering {

struct Provenance {
  std::string run;
  std::size_t snapshot = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct EvalMatrix {
  std::vector<std::string> columns;  // AF ids
  std::vector<std::vector<Ternary>> rows;
  std::vector<Provenance> provenance;  // parallel to rows

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }
  std::size_t distinct_row_count() const;

  friend bool operator==(const EvalMatrix&, const EvalMatrix&) = default;
};

/// Rows in stream order. Every state must carry af_list_hash(columns), which
/// fixes the column ordering; otherwise Error(HashMismatch).
EvalMatrix build_matrix(const std::vector<std::string>& columns,
                        const std::vector<std::pair<AbstractState, Provenance>>& evaluations);

EvalMatrix remove_duplicate_rows(const EvalMatrix& m);
EvalMatrix remove_nondiscriminating_columns(const EvalMatrix& m);
EvalMatrix remove_equivalent_columns(const EvalMatrix& m);
/// Greedy left to right, repeated until a full pass drops nothing. Requires
/// pairwise-distinct rows (Error(Precondition) otherwise).
EvalMatrix remove_redundant_columns(const EvalMatrix& m);

struct Removal {
  std::string rule;  // duplicated_rows | non_discriminating | equivalent | redundant
  std::string id;    // column id, or "run:snapshot" for rows
  int iteration = 0; // redundancy pass number, 0 for the other rules
};

struct FilterReport {
  std::size_t initial_rows = 0;
  std::size_t initial_columns = 0;
  std::size_t duplicated_rows = 0;
  std::size_t non_discriminating = 0;
  std::size_t equivalent = 0;
  std::size_t redundant = 0;
  std::vector<std::string> kept;
  std::vector<Removal> log;
  std::vector<std::string> warnings;
};

std::pair<EvalMatrix, FilterReport> filter_functions(const EvalMatrix& m);

std::string write_matrix_csv(const EvalMatrix& m);
/// Throws Error(Schema) with the 1-based line number on malformed input.
EvalMatrix read_matrix_csv(std::string_view text);

std::string write_report_json(const FilterReport& r);

}  // namespace cbr::filtering
