#include "cbr/filtering.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "cbr/error.hpp"

namespace cbr::filtering {

std::size_t EvalMatrix::distinct_row_count() const {
  return std::set<std::vector<Ternary>>(rows.begin(), rows.end()).size();
}

EvalMatrix build_matrix(const std::vector<std::string>& columns,
                        const std::vector<std::pair<AbstractState, Provenance>>& evaluations) {
  std::set<std::string> unique(columns.begin(), columns.end());
  if (unique.size() != columns.size()) {
    throw Error(ErrorKind::Schema, "matrix column ids must be unique");
  }
  EvalMatrix m;
  m.columns = columns;
  const std::string hash = af_list_hash(columns);
  for (const auto& [state, prov] : evaluations) {
    if (state.af_hash != hash) {
      throw Error(ErrorKind::HashMismatch, "abstract state hash " + state.af_hash +
                                               " does not match the column ordering " + hash);
    }
    if (state.values.size() != columns.size()) {
      throw Error(ErrorKind::Schema, "abstract state length differs from the column count");
    }
    m.rows.push_back(state.values);
    m.provenance.push_back(prov);
  }
  return m;
}

namespace {

EvalMatrix keep_columns(const EvalMatrix& m, const std::vector<bool>& keep) {
  EvalMatrix out;
  out.provenance = m.provenance;
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    if (keep[j]) out.columns.push_back(m.columns[j]);
  }
  for (const auto& row : m.rows) {
    std::vector<Ternary> r;
    r.reserve(out.columns.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (keep[j]) r.push_back(row[j]);
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<Ternary> column(const EvalMatrix& m, std::size_t j) {
  std::vector<Ternary> c;
  c.reserve(m.rows.size());
  for (const auto& row : m.rows) c.push_back(row[j]);
  return c;
}

// Rows stay pairwise distinct when projected on `keep`.
bool distinguishes(const EvalMatrix& m, const std::vector<bool>& keep) {
  std::set<std::vector<Ternary>> seen;
  for (const auto& row : m.rows) {
    std::vector<Ternary> r;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (keep[j]) r.push_back(row[j]);
    }
    if (!seen.insert(std::move(r)).second) return false;
  }
  return true;
}

std::string row_id(const Provenance& p) { return p.run + ":" + std::to_string(p.snapshot); }

EvalMatrix dedup(const EvalMatrix& m, std::vector<Removal>* log) {
  EvalMatrix out;
  out.columns = m.columns;
  std::set<std::vector<Ternary>> seen;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    if (seen.insert(m.rows[i]).second) {
      out.rows.push_back(m.rows[i]);
      out.provenance.push_back(m.provenance[i]);
    } else if (log) {
      log->push_back({"duplicated_rows", row_id(m.provenance[i]), 0});
    }
  }
  return out;
}

EvalMatrix non_discriminating(const EvalMatrix& m, std::vector<Removal>* log) {
  if (m.rows.empty()) return m;
  std::vector<bool> keep(m.columns.size(), true);
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    bool constant = true;
    for (const auto& row : m.rows) {
      if (row[j] != m.rows.front()[j]) {
        constant = false;
        break;
      }
    }
    if (constant) {
      keep[j] = false;
      if (log) log->push_back({"non_discriminating", m.columns[j], 0});
    }
  }
  return keep_columns(m, keep);
}

EvalMatrix equivalent(const EvalMatrix& m, std::vector<Removal>* log) {
  std::vector<bool> keep(m.columns.size(), true);
  std::set<std::vector<Ternary>> seen;
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    if (!seen.insert(column(m, j)).second) {
      keep[j] = false;
      if (log) log->push_back({"equivalent", m.columns[j], 0});
    }
  }
  return keep_columns(m, keep);
}

EvalMatrix redundant(const EvalMatrix& m, std::vector<Removal>* log) {
  if (m.distinct_row_count() != m.rows.size()) {
    throw Error(ErrorKind::Precondition, "redundancy removal needs pairwise-distinct rows");
  }
  std::vector<bool> keep(m.columns.size(), true);
  for (int pass = 1;; ++pass) {
    bool dropped = false;
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      if (!keep[j]) continue;
      keep[j] = false;
      if (distinguishes(m, keep)) {
        dropped = true;
        if (log) log->push_back({"redundant", m.columns[j], pass});
      } else {
        keep[j] = true;
      }
    }
    if (!dropped) break;
  }
  return keep_columns(m, keep);
}

}  // namespace

EvalMatrix remove_duplicate_rows(const EvalMatrix& m) { return dedup(m, nullptr); }
EvalMatrix remove_nondiscriminating_columns(const EvalMatrix& m) { return non_discriminating(m, nullptr); }
EvalMatrix remove_equivalent_columns(const EvalMatrix& m) { return equivalent(m, nullptr); }
EvalMatrix remove_redundant_columns(const EvalMatrix& m) { return redundant(m, nullptr); }

std::pair<EvalMatrix, FilterReport> filter_functions(const EvalMatrix& m) {
  FilterReport r;
  r.initial_rows = m.rows.size();
  r.initial_columns = m.columns.size();

  EvalMatrix a = dedup(m, &r.log);
  r.duplicated_rows = m.rows.size() - a.rows.size();
  if (a.rows.size() == 1 && !a.columns.empty()) {
    r.warnings.push_back("a single distinct evaluation makes every function non-discriminating");
  }
  EvalMatrix b = non_discriminating(a, &r.log);
  r.non_discriminating = a.columns.size() - b.columns.size();
  EvalMatrix c = equivalent(b, &r.log);
  r.equivalent = b.columns.size() - c.columns.size();
  EvalMatrix d = redundant(c, &r.log);
  r.redundant = c.columns.size() - d.columns.size();
  r.kept = d.columns;
  return {std::move(d), std::move(r)};
}

// ---------------------------------------------------------------------------
// Persistence

std::string write_matrix_csv(const EvalMatrix& m) {
  std::ostringstream out;
  out << "#run,#snapshot";
  for (const auto& c : m.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out << m.provenance[i].run << ',' << m.provenance[i].snapshot;
    for (Ternary v : m.rows[i]) out << ',' << to_char(v);
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

[[noreturn]] void bad_line(std::size_t line, const std::string& why) {
  throw Error(ErrorKind::Schema, "matrix CSV line " + std::to_string(line) + ": " + why);
}

}  // namespace

EvalMatrix read_matrix_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  EvalMatrix m;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (!header) {
      if (cells.size() < 2 || cells[0] != "#run" || cells[1] != "#snapshot") {
        bad_line(lineno, "header must start with #run,#snapshot");
      }
      m.columns.assign(cells.begin() + 2, cells.end());
      if (std::set<std::string>(m.columns.begin(), m.columns.end()).size() != m.columns.size()) {
        bad_line(lineno, "duplicate column id");
      }
      header = true;
      continue;
    }
    if (cells.size() != m.columns.size() + 2) bad_line(lineno, "wrong number of cells");
    Provenance p;
    p.run = cells[0];
    try {
      std::size_t used = 0;
      p.snapshot = std::stoull(cells[1], &used);
      if (used != cells[1].size()) bad_line(lineno, "snapshot is not an integer");
    } catch (const std::logic_error&) {
      bad_line(lineno, "snapshot is not an integer");
    }
    std::vector<Ternary> row;
    for (std::size_t j = 2; j < cells.size(); ++j) {
      if (cells[j].size() != 1) bad_line(lineno, "cell must be T, F or U");
      try {
        row.push_back(ternary_from_char(cells[j][0]));
      } catch (const Error&) {
        bad_line(lineno, "cell must be T, F or U");
      }
    }
    m.rows.push_back(std::move(row));
    m.provenance.push_back(std::move(p));
  }
  if (!header && lineno > 0) bad_line(1, "missing header");
  return m;
}

std::string write_report_json(const FilterReport& r) {
  using json = nlohmann::ordered_json;
  json log = json::array();
  for (const auto& e : r.log) log.push_back({{"rule", e.rule}, {"id", e.id}, {"iteration", e.iteration}});
  json doc = {{"initial_rows", r.initial_rows},
              {"initial_columns", r.initial_columns},
              {"removed",
               {{"duplicated_rows", r.duplicated_rows},
                {"non_discriminating", r.non_discriminating},
                {"equivalent", r.equivalent},
                {"redundant", r.redundant}}},
              {"kept", r.kept},
              {"log", log},
              {"warnings", r.warnings}};
  return doc.dump(2) + "\n";
}

}  // namespace cbr::filtering
