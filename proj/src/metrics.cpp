#include "cbr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "cbr/error.hpp"

namespace cbr::metrics {

std::optional<double> NodePrecision::precision() const {
  if (ts == 0) return std::nullopt;
  return static_cast<double>(cs) / static_cast<double>(ts);
}

namespace {

// (label before, label after, abstract state in between) for every pair of
// consecutive segments in the originals.
using Witness = std::tuple<std::string, std::string, std::string>;

std::set<Witness> witnesses(const std::vector<Run>& runs, const std::vector<AbstractionFunction>& afs) {
  std::set<Witness> out;
  for (const auto& run : runs) {
    for (std::size_t k = 0; k + 1 < run.segments.size(); ++k) {
      out.emplace(run.segments[k].label, run.segments[k + 1].label,
                  abstract_state(afs, run.segments[k].post_state).str());
    }
  }
  return out;
}

NodePrecision score(const AnnotatedFSM& fsm, const std::string& node, const std::set<Witness>& seen) {
  using Pair = std::pair<std::string, std::string>;
  std::set<Pair> in, out;
  for (const auto& [key, traces] : fsm.transitions()) {
    if (key.to == node) in.emplace(key.label, key.from);
    if (key.from == node) out.emplace(key.label, key.to);
  }
  NodePrecision np;
  np.state = node;
  np.ts = in.size() * out.size();
  for (const auto& a : in) {
    for (const auto& b : out) {
      if (seen.count({a.first, b.first, node})) ++np.cs;
    }
  }
  return np;
}

void check_hash(const AnnotatedFSM& fsm, const std::vector<AbstractionFunction>& afs) {
  if (fsm.empty()) return;
  const std::string hash = af_list_hash(afs);
  if (hash != fsm.af_hash()) {
    throw Error(ErrorKind::HashMismatch, "AF list hash " + hash + " differs from model hash " + fsm.af_hash());
  }
}

}  // namespace

NodePrecision node_precision(const AnnotatedFSM& fsm, const std::string& node, const std::vector<Run>& originals,
                             const std::vector<AbstractionFunction>& afs) {
  if (!fsm.has_state(node)) throw Error(ErrorKind::UnknownState, "unknown node '" + node + "'");
  check_hash(fsm, afs);
  return score(fsm, node, witnesses(originals, afs));
}

PrecisionReport overall_precision(const AnnotatedFSM& fsm, const std::vector<Run>& originals,
                                  const std::vector<AbstractionFunction>& afs) {
  PrecisionReport r;
  if (fsm.empty()) return r;
  check_hash(fsm, afs);
  const auto seen = witnesses(originals, afs);
  double sum = 0.0;
  std::size_t included = 0;
  for (const auto& s : fsm.states()) {
    r.nodes.push_back(score(fsm, s, seen));
    if (auto p = r.nodes.back().precision()) {
      sum += *p;
      ++included;
    } else {
      ++r.excluded;
    }
  }
  if (included > 0) r.overall = sum / static_cast<double>(included);
  return r;
}

double trace_recall(std::size_t captured, const Run& original) {
  const std::size_t total = original.event_count();
  if (captured > total) {
    throw Error(ErrorKind::Precondition, "run " + original.id + ": captured " + std::to_string(captured) +
                                             " events out of " + std::to_string(total));
  }
  if (total == 0) return 1.0;
  return static_cast<double>(captured) / static_cast<double>(total);
}

namespace {

RecallReport finish(RecallReport r) {
  double sum = 0.0;
  for (const auto& x : r.runs) sum += x.recall;
  r.mean = r.runs.empty() ? 0.0 : sum / static_cast<double>(r.runs.size());
  return r;
}

}  // namespace

RecallReport model_recall(const AnnotatedFSM& fsm, const std::vector<Run>& runs,
                          const std::vector<AbstractionFunction>& afs) {
  RecallReport r;
  for (const auto& run : runs) {
    const std::size_t captured = model::accepts_prefix(fsm, run, afs);
    r.runs.push_back({run.id, captured, run.event_count(), trace_recall(captured, run)});
  }
  return finish(std::move(r));
}

RecallReport baseline_recall(const std::vector<collector::SampledTrace>& samples, const std::vector<Run>& runs) {
  std::map<std::string, std::size_t> captured;
  for (const auto& s : samples) captured[s.run_id] += s.events.size();
  RecallReport r;
  for (const auto& run : runs) {
    const std::size_t c = captured.count(run.id) ? captured.at(run.id) : 0;
    r.runs.push_back({run.id, c, run.event_count(), trace_recall(c, run)});
  }
  return finish(std::move(r));
}

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return m;
}

std::vector<SweepAggregate> SweepResult::aggregates() const {
  std::map<std::pair<double, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& c : cells) {
    auto& g = groups[{c.p, c.n_runs}];
    g.first.push_back(c.mean_recall);
    if (c.overall_precision) g.second.push_back(*c.overall_precision);
  }
  std::vector<SweepAggregate> out;
  for (const auto& [key, g] : groups) out.push_back({key.first, key.second, mean_sd(g.first), mean_sd(g.second)});
  return out;
}

namespace {

template <typename T>
void check_axis(const std::vector<T>& axis, const char* name) {
  if (axis.empty()) throw Error(ErrorKind::Precondition, std::string("sweep axis '") + name + "' is empty");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i - 1] < axis[i])) {
      throw Error(ErrorKind::Precondition, std::string("sweep axis '") + name + "' must be strictly increasing");
    }
  }
}

}  // namespace

SweepResult run_sweep(const std::vector<Run>& runs, const std::vector<AbstractionFunction>& afs,
                      const std::vector<double>& probabilities, const std::vector<std::size_t>& n_runs,
                      const std::vector<std::uint64_t>& seeds) {
  check_axis(probabilities, "p");
  check_axis(n_runs, "n_runs");
  check_axis(seeds, "seed");
  if (n_runs.back() > runs.size()) {
    throw Error(ErrorKind::Precondition, "n_runs " + std::to_string(n_runs.back()) + " exceeds the " +
                                             std::to_string(runs.size()) + " available runs");
  }
  SweepResult result;
  for (double p : probabilities) {
    for (std::size_t n : n_runs) {
      const std::vector<Run> training(runs.begin(), runs.begin() + static_cast<std::ptrdiff_t>(n));
      for (std::uint64_t seed : seeds) {
        collector::SamplerConfig cfg;
        cfg.p = p;
        cfg.rng_seed = seed;
        cfg.validate();
        const auto fsm = model::synthesize(collector::collect_cbr_bursts(training, afs, cfg));
        SweepCell cell{p, n, seed, overall_precision(fsm, runs, afs).overall, model_recall(fsm, runs, afs).mean};
        result.cells.push_back(cell);
      }
    }
  }
  return result;
}

double baseline_mean_recall(const std::vector<Run>& runs, double p, std::uint64_t seed, std::size_t length) {
  collector::SamplerConfig cfg;
  cfg.p = p;
  cfg.rng_seed = seed;
  cfg.mode = collector::SamplingMode::FixedLength;
  cfg.fixed_length = length;
  cfg.validate();
  return baseline_recall(collector::collect_fixed_sampling(runs, cfg), runs).mean;
}

// ---------------------------------------------------------------------------
// Reports

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string precision_csv(const PrecisionReport& r) {
  std::ostringstream out;
  out << "state,cs,ts,precision\n";
  for (const auto& n : r.nodes) {
    out << n.state << ',' << n.cs << ',' << n.ts << ',';
    if (auto p = n.precision()) out << format_double(*p);
    out << '\n';
  }
  return out.str();
}

std::string recall_csv(const RecallReport& r) {
  std::ostringstream out;
  out << "run,captured,total,recall\n";
  for (const auto& x : r.runs) out << x.run_id << ',' << x.captured << ',' << x.total << ',' << format_double(x.recall) << '\n';
  return out.str();
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "p,n_runs,seed,overall_precision,mean_recall\n";
  for (const auto& c : r.cells) {
    out << format_double(c.p) << ',' << c.n_runs << ',' << c.seed << ',';
    if (c.overall_precision) out << format_double(*c.overall_precision);
    out << ',' << format_double(c.mean_recall) << '\n';
  }
  return out.str();
}

std::string sweep_summary_json(const SweepResult& r) {
  using json = nlohmann::ordered_json;
  auto stats = [](const MeanSd& m) {
    json j = {{"count", m.count}};
    if (m.count > 0) {
      j["mean"] = m.mean;
      j["sd"] = m.sd;
    }
    return j;
  };
  json groups = json::array();
  for (const auto& a : r.aggregates()) {
    groups.push_back({{"p", a.p}, {"n_runs", a.n_runs}, {"recall", stats(a.recall)}, {"precision", stats(a.precision)}});
  }
  return json({{"groups", groups}}).dump(2) + "\n";
}

}  // namespace cbr::metrics
