// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cbr/metrics.hpp"
#include "cbr/model.hpp"
#include "cbr/state.hpp"
#include "cbr/synthetic.hpp"
#include "../support/cli.hpp"
#include "../support/fixtures.hpp"

using namespace cbr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

Outcome cart_golden() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto extraction = fixtures::cart_extraction();
  const double elapsed = seconds_since(t0);
  const auto missing = fixtures::unmatched_cart_rows(extraction);
  std::string detail = std::to_string(extraction.functions.size()) + " functions, " +
                       std::to_string(fixtures::cart_table().size() - missing.size()) + "/" +
                       std::to_string(fixtures::cart_table().size()) + " rows matched in " + fmt(elapsed, 3) + " s";
  for (const auto& row : missing) detail += "; missing " + row;
  return {missing.empty() && elapsed < 5.0, detail};
}

Outcome filtering_golden() {
  const auto [kept, r] = filtering::filter_functions(fixtures::golden_filter_matrix());
  std::string ids;
  for (const auto& k : r.kept) ids += (ids.empty() ? "" : ",") + k;
  const bool ok = r.kept == std::vector<std::string>{"AF5", "AF7"} && r.duplicated_rows == 1 &&
                  r.non_discriminating == 2 && r.equivalent == 1 && r.redundant == 2;
  return {ok, "kept {" + ids + "}, removals dup=" + std::to_string(r.duplicated_rows) +
                  " nondisc=" + std::to_string(r.non_discriminating) + " equiv=" + std::to_string(r.equivalent) +
                  " redundant=" + std::to_string(r.redundant)};
}

Outcome distinguishability() {
  std::mt19937_64 rng(1000);
  const Ternary cells[] = {Ternary::T, Ternary::F, Ternary::U};
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    filtering::EvalMatrix m;
    const std::size_t rows = 1 + rng() % 50, cols = 1 + rng() % 50;
    for (std::size_t j = 0; j < cols; ++j) m.columns.push_back("c" + std::to_string(j));
    // Few distinct values per matrix so duplicates and equivalences occur.
    const int alphabet = 2 + static_cast<int>(rng() % 2);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<Ternary> row(cols);
      for (auto& c : row) c = cells[rng() % static_cast<std::uint64_t>(alphabet)];
      m.rows.push_back(row);
      m.provenance.push_back({"r", i});
    }
    const auto deduped = filtering::remove_duplicate_rows(m);
    const auto [kept, report] = filtering::filter_functions(m);
    bool ok = kept.distinct_row_count() == deduped.rows.size();
    for (std::size_t j = 0; ok && j < kept.columns.size(); ++j) {
      std::set<std::vector<Ternary>> seen;
      for (auto row : kept.rows) {
        row.erase(row.begin() + static_cast<std::ptrdiff_t>(j));
        seen.insert(row);
      }
      ok = seen.size() < kept.rows.size();
    }
    failures += ok ? 0 : 1;
  }
  return {failures == 0, "1000 matrices up to 50x50, " + std::to_string(failures) + " violations"};
}

Outcome self_acceptance() {
  std::size_t runs_checked = 0, failures = 0;
  auto check = [&](const std::vector<collector::Run>& runs, const std::vector<AbstractionFunction>& afs,
                   std::uint64_t seed) {
    collector::SamplerConfig cfg;
    cfg.p = 1.0;
    cfg.rng_seed = seed;
    const auto fsm = model::synthesize(collector::collect_cbr_bursts(runs, afs, cfg));
    for (const auto& r : metrics::model_recall(fsm, runs, afs).runs) {
      ++runs_checked;
      if (r.recall != 1.0) ++failures;
    }
  };
  check(fixtures::session_runs(), fixtures::session_afs(), 1);
  const auto afs = synthetic::abstraction_functions().functions;
  std::mt19937_64 rng(4);
  for (std::uint64_t k = 0; k < 30; ++k) {
    synthetic::SyntheticConfig cfg;
    cfg.seed = 100 + k;
    cfg.runs = 1 + rng() % 10;
    cfg.segments_per_run = 1 + rng() % 20;
    cfg.preferred_probability = static_cast<double>(rng() % 100) / 100.0;
    cfg.variant_probability = static_cast<double>(rng() % 100) / 100.0;
    check(synthetic::generate_runs(cfg), afs, k);
  }
  return {failures == 0, std::to_string(runs_checked) + " runs, " + std::to_string(failures) + " below recall 1.0"};
}

Outcome session_fsm() {
  const auto afs = fixtures::session_afs();
  const auto runs = fixtures::session_runs();
  auto fsm = model::synthesize(fixtures::session_bursts());
  const auto report = metrics::overall_precision(fsm, runs, afs);
  bool ok = fsm.states() == std::set<std::string>{"UU", "UF", "FF"} && report.overall && *report.overall == 1.0;
  std::string detail = std::to_string(fsm.states().size()) + " states, nodes";
  for (const auto& n : report.nodes) {
    ok = ok && n.precision() && *n.precision() == 1.0;
    detail += " " + n.state + "=" + std::to_string(n.cs) + "/" + std::to_string(n.ts);
  }
  detail += ", overall " + (report.overall ? fmt(*report.overall) : std::string("absent"));
  // An add straight from the paid cart back to the no-cart state, never observed.
  fsm.add(af_list_hash(afs), {"clickOnAddItem", "FF", "UU"}, {{"addItem", "Cart", "[1]", {}}});
  const auto injected = metrics::node_precision(fsm, "FF", runs, afs);
  ok = ok && injected.precision() && *injected.precision() == 0.5;
  detail += "; after injection FF=" + std::to_string(injected.cs) + "/" + std::to_string(injected.ts);
  return {ok, detail};
}

const std::vector<collector::Run>& synthetic_runs() {
  static const auto runs = collector::load_runs(fixtures::data_path("synthetic/traces.jsonl"));
  return runs;
}

const std::vector<AbstractionFunction>& synthetic_afs() {
  static const auto afs =
      symex::read_af_json(collector::read_file(fixtures::data_path("synthetic/afs.json"))).functions;
  return afs;
}

std::vector<std::uint64_t> ten_seeds() {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 10; ++i) s.push_back(i);
  return s;
}

Outcome recall_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& runs = synthetic_runs();
  const auto& afs = synthetic_afs();
  std::set<std::string> labels, states;
  for (const auto& run : runs) {
    for (const auto& seg : run.segments) {
      labels.insert(seg.label);
      states.insert(abstract_state(afs, seg.pre_state).str());
      states.insert(abstract_state(afs, seg.post_state).str());
    }
  }
  const std::vector<double> ps = {0.1, 0.25, 0.5, 1.0};
  const std::vector<std::size_t> ns = {1, 5, 10, 20};
  std::map<std::pair<double, std::size_t>, metrics::MeanSd> g;
  for (const auto& a : metrics::run_sweep(runs, afs, ps, ns, ten_seeds()).aggregates()) g[{a.p, a.n_runs}] = a.recall;

  std::size_t violations = 0;
  auto compare = [&](const metrics::MeanSd& lo, const metrics::MeanSd& hi) {
    const double pooled = std::sqrt((lo.sd * lo.sd + hi.sd * hi.sd) / 2.0);
    if (hi.mean < lo.mean - pooled) ++violations;
  };
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      if (i + 1 < ps.size()) compare(g.at({ps[i], ns[j]}), g.at({ps[i + 1], ns[j]}));
      if (j + 1 < ns.size()) compare(g.at({ps[i], ns[j]}), g.at({ps[i], ns[j + 1]}));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool subject_ok = labels.size() >= 5 && states.size() >= 8 && runs.size() == 20;
  std::string row;
  for (double p : ps) row += " p" + fmt(p, 2) + "/n20=" + fmt(g.at({p, 20}).mean);
  return {subject_ok && violations == 0 && elapsed < 120.0,
          std::to_string(labels.size()) + " labels, " + std::to_string(states.size()) + " states, " +
              std::to_string(violations) + " trend violations," + row + ", " + fmt(elapsed, 2) + " s"};
}

Outcome baseline_ordering() {
  const auto& runs = synthetic_runs();
  std::size_t shortest = SIZE_MAX;
  for (const auto& run : runs)
    for (const auto& seg : run.segments) shortest = std::min(shortest, seg.events.size());
  double baseline = 0.0;
  for (std::uint64_t s : ten_seeds()) baseline += metrics::baseline_mean_recall(runs, 0.1, s) / 10.0;
  const double cbr = metrics::run_sweep(runs, synthetic_afs(), {0.1}, {runs.size()}, ten_seeds())
                         .aggregates()
                         .at(0)
                         .recall.mean;
  return {shortest > 30 && cbr > baseline, "CBR " + fmt(cbr) + " vs fixed-length-30 " + fmt(baseline) +
                                               " at p=0.1, shortest segment " + std::to_string(shortest) + " events"};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Every command with the same inputs, into the given directory.
bool run_all_commands(const fs::path& out, const fs::path& scratch, std::string& error) {
  const std::string o = out.string();
  const std::string cart_traces = fixtures::data_path("cart/sessions.jsonl");
  const std::string cart_afs = fixtures::data_path("cart/session_afs.json");
  const std::string synth_traces = fixtures::data_path("synthetic/traces.jsonl");
  const std::string synth_afs = fixtures::data_path("synthetic/afs.json");
  const std::vector<std::vector<std::string>> commands = {
      {"extract", "--program", fixtures::data_path("cart/cart.mir"), "--targets", "Cart"},
      {"profile", "--traces", cart_traces, "--afs", cart_afs},
      {"filter", "--matrix", o + "/matrix.csv", "--afs", cart_afs},
      {"collect", "--traces", synth_traces, "--mode", "fixed_length", "--p", "0.3"},
      {"collect", "--traces", synth_traces, "--afs", synth_afs, "--p", "0.3"},
      {"synthesize", "--bursts", o + "/bursts.jsonl"},
      {"simulate", "--fsm", o + "/fsm.json", "--start", "FFF", "--max-hops", "3"},
      {"evaluate", "--fsm", o + "/fsm.json", "--traces", synth_traces, "--afs", synth_afs, "--samples",
       o + "/samples.jsonl"},
      {"sweep", "--traces", synth_traces, "--afs", synth_afs, "--p", "0.1", "0.5", "--n-runs", "5", "20", "--seeds",
       "1", "2", "3"},
  };
  for (auto args : commands) {
    const std::string name = args.front();
    args.insert(args.begin(), {"--out-dir", o, "--seed", "11"});
    const auto r = fixtures::run_cli(args, scratch);
    if (r.exit_code != 0) {
      error = name + " exited with " + std::to_string(r.exit_code) + ": " + r.err;
      return false;
    }
  }
  return true;
}

Outcome cli_determinism() {
  const auto scratch = fixtures::scratch_dir("acceptance");
  std::map<std::string, std::uint64_t> hashes[2];
  for (int k = 0; k < 2; ++k) {
    const auto out = scratch / ("run" + std::to_string(k));
    std::string error;
    if (!run_all_commands(out, scratch, error)) {
      fs::remove_all(scratch);
      return {false, error};
    }
    for (const auto& e : fs::directory_iterator(out)) hashes[k][e.path().filename().string()] = fnv1a(fixtures::slurp(e.path()));
  }
  fs::remove_all(scratch);
  std::size_t differing = 0;
  for (const auto& [name, h] : hashes[0]) differing += hashes[1].count(name) && hashes[1].at(name) == h ? 0 : 1;
  const bool ok = differing == 0 && hashes[0].size() == hashes[1].size() && hashes[0].size() >= 14;
  return {ok, std::to_string(hashes[0].size()) + " output files over 8 commands, " + std::to_string(differing) +
                  " differing"};
}

Outcome unknown_semantics() {
  const std::map<std::string, std::int64_t> constants = {{"Cart.CART_SIZE", 10}, {"Cart.PRICE", 100}};
  auto clause = [&](const std::string& t) { return fixtures::parse_clause(t, constants); };
  const auto empty_cart = collector::parse_state_json(
      R"({"roots":{"Cart":"c"},"objects":{"c":{"class":"Cart","fields":{"nProducts":0,"products":[],"total":0}}}})");
  const auto no_cart = collector::parse_state_json(R"({"roots":{"Cart":null},"objects":{}})");
  const auto one_product = collector::parse_state_json(
      R"({"roots":{"Cart":"c"},"objects":{"c":{"class":"Cart","fields":{"nProducts":1,"products":["p"],"total":0}},)"
      R"("p":{"class":"Product","fields":{"value":150,"taxFree":true}}}})");

  const bool missing_element = eval_clause(clause("Cart.products.[0].taxFree == true"), empty_cart) == Ternary::U;
  const bool missing_root = eval_clause(clause("Cart.nProducts > 0"), no_cart) == Ternary::U;
  AbstractionFunction f;
  f.clauses = {clause("Cart.nProducts > 5"), clause("Cart.products[3].value > 0")};
  const bool dominates = eval_clause(f.clauses[0], one_product) == Ternary::F &&
                         eval_function(f, one_product) == Ternary::U;
  return {missing_element && missing_root && dominates,
          std::string("missing element ") + (missing_element ? "U" : "not U") + ", missing root " +
              (missing_root ? "U" : "not U") + ", F && U " + (dominates ? "= U" : "!= U")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Cart golden extraction", cart_golden},
      {"filtering golden example", filtering_golden},
      {"distinguishability preservation", distinguishability},
      {"self-acceptance at certainty", self_acceptance},
      {"Cart session FSM precision", session_fsm},
      {"recall trend", recall_trend},
      {"baseline ordering", baseline_ordering},
      {"CLI determinism", cli_determinism},
      {"unknown semantics", unknown_semantics},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
