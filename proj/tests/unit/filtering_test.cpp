#include <gtest/gtest.h>

#include <random>

#include "cbr/error.hpp"
#include "cbr/filtering.hpp"
#include "../support/fixtures.hpp"

using namespace cbr;
using namespace cbr::filtering;

namespace {

EvalMatrix matrix(const std::vector<std::string>& rows, std::size_t width = 0) {
  EvalMatrix m;
  if (!rows.empty()) width = rows[0].size();
  for (std::size_t j = 0; j < width; ++j) m.columns.push_back("c" + std::to_string(j));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<Ternary> r;
    for (char c : rows[i]) r.push_back(ternary_from_char(c));
    m.rows.push_back(r);
    m.provenance.push_back({"r", i});
  }
  return m;
}

std::vector<std::string> strings(const EvalMatrix& m) {
  std::vector<std::string> out;
  for (const auto& r : m.rows) {
    std::string s;
    for (Ternary v : r) s += to_char(v);
    out.push_back(s);
  }
  return out;
}

// Independent reference implementation over strings, written from the rule
// definitions only.
struct Oracle {
  std::vector<std::string> rows;  // row-major cells
  std::vector<std::string> ids;
  std::size_t duplicated = 0, nondisc = 0, equiv = 0, redundant = 0;

  static std::string project(const std::string& row, const std::vector<std::size_t>& cols) {
    std::string s;
    for (auto c : cols) s += row[c];
    return s;
  }

  bool all_distinct(const std::vector<std::size_t>& cols) const {
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = a + 1; b < rows.size(); ++b)
        if (project(rows[a], cols) == project(rows[b], cols)) return false;
    return true;
  }

  std::vector<std::string> run() {
    std::vector<std::string> unique;
    for (const auto& r : rows) {
      if (std::find(unique.begin(), unique.end(), r) == unique.end()) unique.push_back(r);
    }
    duplicated = rows.size() - unique.size();
    rows = unique;

    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      bool constant = true;
      for (const auto& r : rows) constant = constant && r[j] == rows[0][j];
      if (constant && !rows.empty()) {
        ++nondisc;
      } else {
        cols.push_back(j);
      }
    }
    std::vector<std::size_t> kept;
    for (std::size_t j : cols) {
      bool dup = false;
      for (std::size_t k : kept) {
        bool same = true;
        for (const auto& r : rows) same = same && r[j] == r[k];
        dup = dup || same;
      }
      if (dup) {
        ++equiv;
      } else {
        kept.push_back(j);
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < kept.size();) {
        std::vector<std::size_t> trial;
        for (std::size_t k = 0; k < kept.size(); ++k)
          if (k != i) trial.push_back(kept[k]);
        if (all_distinct(trial)) {
          kept = trial;
          ++redundant;
          changed = true;
        } else {
          ++i;
        }
      }
    }
    std::vector<std::string> out;
    for (auto j : kept) out.push_back(ids[j]);
    return out;
  }
};

EvalMatrix random_matrix(std::mt19937_64& rng, std::size_t max_rows, std::size_t max_cols, int alphabet = 3) {
  const std::size_t n = rng() % (max_rows + 1);
  const std::size_t m = rng() % (max_cols + 1);
  std::vector<std::string> rows(n, std::string(m, 'T'));
  const char cells[] = {'T', 'F', 'U'};
  for (auto& r : rows)
    for (auto& c : r) c = cells[rng() % alphabet];
  return matrix(rows, m);
}

}  // namespace

TEST(GoldenMatrix, KeepsAF5AndAF7) {
  const auto [kept, report] = filter_functions(fixtures::golden_filter_matrix());
  EXPECT_EQ(report.kept, (std::vector<std::string>{"AF5", "AF7"}));
  EXPECT_EQ(report.duplicated_rows, 1u);
  EXPECT_EQ(report.non_discriminating, 2u);
  EXPECT_EQ(report.equivalent, 1u);
  EXPECT_EQ(report.redundant, 2u);
  ASSERT_EQ(report.log.size(), 6u);
  EXPECT_EQ(report.log[0].rule, "duplicated_rows");
  EXPECT_EQ(report.log[0].id, "run1:2");
  EXPECT_EQ(report.log[1].id, "AF1");
  EXPECT_EQ(report.log[2].id, "AF3");
  EXPECT_EQ(report.log[3].id, "AF6");
  EXPECT_EQ(report.log[4].id, "AF2");
  EXPECT_EQ(report.log[5].id, "AF4");
  EXPECT_EQ(report.log[4].rule, "redundant");
  EXPECT_EQ(kept.rows.size(), 4u);
}

TEST(GoldenMatrix, FixtureSatisfiesTheStatedConstraints) {
  const auto m = fixtures::golden_filter_matrix();
  EXPECT_EQ(m.rows[1], m.rows[2]);
  EXPECT_EQ(strings(m)[1], "UFTTFFF");
  for (const auto& r : m.rows) {
    EXPECT_EQ(r[0], Ternary::U);
    EXPECT_EQ(r[2], Ternary::T);
  }
  const auto d = remove_duplicate_rows(m);
  for (const auto& r : d.rows) EXPECT_EQ(r[1], r[5]);
  std::string af2;
  for (const auto& r : d.rows) af2 += to_char(r[1]);
  EXPECT_EQ(af2, "UFFF");
}

TEST(Rules, DuplicateRows) {
  EXPECT_EQ(strings(remove_duplicate_rows(fixtures::golden_filter_matrix())).size(), 4u);
  EXPECT_EQ(strings(remove_duplicate_rows(matrix({"TF", "FT"}))), (std::vector<std::string>{"TF", "FT"}));
  EXPECT_EQ(strings(remove_duplicate_rows(matrix({"TU", "TU", "TU"}))), (std::vector<std::string>{"TU"}));
}

TEST(Rules, NonDiscriminating) {
  const auto m = remove_nondiscriminating_columns(remove_duplicate_rows(fixtures::golden_filter_matrix()));
  EXPECT_EQ(m.columns, (std::vector<std::string>{"AF2", "AF4", "AF5", "AF6", "AF7"}));
  EXPECT_TRUE(remove_nondiscriminating_columns(matrix({"TFU"})).columns.empty());
  EXPECT_EQ(remove_nondiscriminating_columns(matrix({"TF", "FT"})).columns.size(), 2u);
  EXPECT_EQ(remove_nondiscriminating_columns(matrix({}, 3)).columns.size(), 3u) << "no rows: unchanged";
}

TEST(Rules, EquivalentKeepsLeftmost) {
  EXPECT_EQ(remove_equivalent_columns(matrix({"TTTF", "FFFT", "UUUT"})).columns,
            (std::vector<std::string>{"c0", "c3"}));
  EXPECT_EQ(remove_equivalent_columns(matrix({"TF", "FT"})).columns.size(), 2u);
}

TEST(Rules, RedundantNeedsDistinctRows) {
  EXPECT_THROW(remove_redundant_columns(matrix({"TF", "TF"})), Error);
  EXPECT_EQ(remove_redundant_columns(matrix({"T", "F"})).columns.size(), 1u);
  // Column 0 alone separates the rows and the others together do not, so
  // everything after it goes.
  const auto m = remove_redundant_columns(matrix({"TFF", "FFF", "UTT"}));
  EXPECT_EQ(m.columns, (std::vector<std::string>{"c0"}));
}

TEST(FilterFunctions, DegenerateMatrices) {
  const auto [m0, r0] = filter_functions(EvalMatrix{});
  EXPECT_TRUE(m0.columns.empty());
  EXPECT_EQ(r0.initial_rows, 0u);
  EXPECT_TRUE(r0.log.empty());

  const auto [m1, r1] = filter_functions(matrix({"TFU", "TFU"}));
  EXPECT_TRUE(m1.columns.empty());
  EXPECT_EQ(r1.non_discriminating, 3u);
  EXPECT_EQ(r1.warnings.size(), 1u);
}

TEST(FilterFunctions, IrreducibleMatrixIsUntouched) {
  // Search for matrices with nothing to remove, confirmed by brute force.
  std::mt19937_64 rng(3);
  int found = 0;
  for (int trial = 0; trial < 4000 && found < 25; ++trial) {
    const auto m = random_matrix(rng, 5, 4);
    if (m.rows.size() < 2 || m.columns.empty()) continue;
    if (m.distinct_row_count() != m.rows.size()) continue;
    Oracle o{strings(m), m.columns};
    std::vector<std::size_t> all(m.columns.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    bool irreducible = true;
    for (std::size_t j = 0; j < all.size() && irreducible; ++j) {
      auto fewer = all;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(j));
      irreducible = !o.all_distinct(fewer);
    }
    if (!irreducible) continue;
    ++found;
    const auto [kept, report] = filter_functions(m);
    EXPECT_EQ(kept.columns, m.columns);
    EXPECT_EQ(report.duplicated_rows + report.non_discriminating + report.equivalent + report.redundant, 0u);
  }
  EXPECT_GT(found, 0);
}

TEST(FilterFunctions, AgreesWithOracleOnRandomMatrices) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1500; ++trial) {
    const auto m = random_matrix(rng, 12, 8, 2 + static_cast<int>(trial % 2));
    Oracle o{strings(m), m.columns};
    const auto expected = o.run();
    const auto [kept, report] = filter_functions(m);
    ASSERT_EQ(report.kept, expected) << "trial " << trial;
    EXPECT_EQ(report.duplicated_rows, o.duplicated);
    EXPECT_EQ(report.non_discriminating, o.nondisc);
    EXPECT_EQ(report.equivalent, o.equiv);
    EXPECT_EQ(report.redundant, o.redundant);
    EXPECT_EQ(report.kept.size() + report.non_discriminating + report.equivalent + report.redundant,
              m.columns.size());
  }
}

TEST(FilterFunctions, PropertiesOnRandomMatrices) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_matrix(rng, 30, 20);
    const auto deduped = remove_duplicate_rows(m);
    const auto [kept, report] = filter_functions(m);
    // Distinguishability is preserved.
    EXPECT_EQ(kept.distinct_row_count(), deduped.rows.size());
    // Locally minimal.
    for (std::size_t j = 0; j < kept.columns.size(); ++j) {
      std::set<std::vector<Ternary>> seen;
      for (auto row : kept.rows) {
        row.erase(row.begin() + static_cast<std::ptrdiff_t>(j));
        seen.insert(row);
      }
      EXPECT_LT(seen.size(), kept.rows.size());
    }
    // Idempotent.
    const auto [again, report2] = filter_functions(kept);
    EXPECT_EQ(again.columns, kept.columns);
    EXPECT_EQ(again.rows, kept.rows);
    // Log order follows the rule order.
    const std::vector<std::string> order = {"duplicated_rows", "non_discriminating", "equivalent", "redundant"};
    std::size_t last = 0;
    for (const auto& e : report.log) {
      const auto at = static_cast<std::size_t>(std::find(order.begin(), order.end(), e.rule) - order.begin());
      ASSERT_LT(at, order.size());
      EXPECT_GE(at, last);
      last = at;
    }
  }
}

TEST(BuildMatrix, RowsInStreamOrder) {
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e", "f", "g"};
  const auto h = af_list_hash(ids);
  std::vector<std::pair<AbstractState, Provenance>> evals;
  for (std::size_t i = 0; i < 5; ++i) {
    evals.push_back({AbstractState::parse(i % 2 ? "TTTTTTT" : "FFFFFFF", h), {i < 3 ? "r1" : "r2", i < 3 ? i : i - 3}});
  }
  const auto m = build_matrix(ids, evals);
  EXPECT_EQ(m.rows.size(), 5u);
  EXPECT_EQ(m.columns.size(), 7u);
  EXPECT_EQ(m.provenance[3].run, "r2");
  EXPECT_EQ(build_matrix(ids, {}).rows.size(), 0u);

  evals.push_back({AbstractState::parse("TTTTTTT", "0000000000000000"), {"r3", 0}});
  try {
    build_matrix(ids, evals);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HashMismatch);
  }
}

TEST(MatrixCsv, RoundTrip) {
  const auto m = fixtures::golden_filter_matrix();
  const auto text = write_matrix_csv(m);
  EXPECT_EQ(text.substr(0, text.find('\n')), "#run,#snapshot,AF1,AF2,AF3,AF4,AF5,AF6,AF7");
  const auto back = read_matrix_csv(text);
  EXPECT_EQ(back.columns, m.columns);
  EXPECT_EQ(back.rows, m.rows);
  EXPECT_EQ(write_matrix_csv(back), text);
  EXPECT_THROW(read_matrix_csv("run,snapshot,a\n"), Error);
  EXPECT_THROW(read_matrix_csv("#run,#snapshot,a\nr,0,X\n"), Error);
  EXPECT_THROW(read_matrix_csv("#run,#snapshot,a\nr,0\n"), Error);
}
