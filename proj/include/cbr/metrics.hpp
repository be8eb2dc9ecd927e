#pragma once

// Node precision, trace-level recall and the probability / run-count sweep.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbr/collector.hpp"
#include "cbr/model.hpp"

namespace cbr::metrics {

using collector::Run;
using model::AnnotatedFSM;

struct NodePrecision {
  std::string state;
  std::size_t cs = 0;
  std::size_t ts = 0;

  /// Absent when ts == 0; such nodes are left out of the mean.
  std::optional<double> precision() const;
};

struct PrecisionReport {
  std::vector<NodePrecision> nodes;  // in state order
  std::size_t excluded = 0;
  std::optional<double> overall;
};

/// TS counts distinct (label, from) pairs entering the node times distinct
/// (label, to) pairs leaving it. CS counts those combinations whose labels
/// occur on consecutive segments of some original run with the node as the
/// abstract state in between. Throws Error(UnknownState) for a foreign node.
NodePrecision node_precision(const AnnotatedFSM& fsm, const std::string& node, const std::vector<Run>& originals,
                             const std::vector<AbstractionFunction>& afs);

PrecisionReport overall_precision(const AnnotatedFSM& fsm, const std::vector<Run>& originals,
                                  const std::vector<AbstractionFunction>& afs);

/// captured / total events. A run without events has recall 1.0.
/// Throws Error(Precondition) when captured exceeds the run's events.
double trace_recall(std::size_t captured, const Run& original);

struct RunRecall {
  std::string run_id;
  std::size_t captured = 0;
  std::size_t total = 0;
  double recall = 0.0;
};

struct RecallReport {
  std::vector<RunRecall> runs;
  double mean = 0.0;
};

/// Recall of the model: events covered by the accepted prefix of each run.
RecallReport model_recall(const AnnotatedFSM& fsm, const std::vector<Run>& runs,
                          const std::vector<AbstractionFunction>& afs);

/// Recall of fixed-length sampling: events captured from each run's samples.
RecallReport baseline_recall(const std::vector<collector::SampledTrace>& samples, const std::vector<Run>& runs);

struct SweepCell {
  double p = 0.0;
  std::size_t n_runs = 0;
  std::uint64_t seed = 0;
  std::optional<double> overall_precision;
  double mean_recall = 0.0;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for fewer than two values
  std::size_t count = 0;
};

MeanSd mean_sd(const std::vector<double>& xs);

struct SweepAggregate {
  double p = 0.0;
  std::size_t n_runs = 0;
  MeanSd recall;
  MeanSd precision;  // over the seeds that produced a precision value
};

struct SweepResult {
  std::vector<SweepCell> cells;  // p-major, then n_runs, then seed

  std::vector<SweepAggregate> aggregates() const;
};

/// For each (p, n, seed): collect bursts from the first n runs, synthesize,
/// and score against all runs. Throws Error(Precondition) when an axis is not
/// strictly increasing, is empty, or n exceeds the number of runs.
SweepResult run_sweep(const std::vector<Run>& runs, const std::vector<AbstractionFunction>& afs,
                      const std::vector<double>& probabilities, const std::vector<std::size_t>& n_runs,
                      const std::vector<std::uint64_t>& seeds);

/// Fixed-length baseline recall averaged over all runs for one seed.
double baseline_mean_recall(const std::vector<Run>& runs, double p, std::uint64_t seed, std::size_t length = 30);

std::string format_double(double v);

std::string precision_csv(const PrecisionReport& r);
std::string recall_csv(const RecallReport& r);
std::string sweep_csv(const SweepResult& r);
std::string sweep_summary_json(const SweepResult& r);

}  // namespace cbr::metrics
