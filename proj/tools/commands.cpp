#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cbr/collector.hpp"
#include "cbr/error.hpp"
#include "cbr/filtering.hpp"
#include "cbr/ir.hpp"
#include "cbr/metrics.hpp"
#include "cbr/model.hpp"

namespace cbr::cli {

using json = nlohmann::ordered_json;

void warn(const std::string& message) { std::cerr << json({{"warning", message}}).dump() << "\n"; }

namespace {

void write_output(const Global& g, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(g.out_dir, ec);
  const std::string path = (std::filesystem::path(g.out_dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
}

symex::Extraction load_afs(const std::string& path) { return symex::read_af_json(collector::read_file(path)); }

}  // namespace

void run_extract(const Global& g, const ExtractArgs& a) {
  a.bounds.validate();
  const auto program = ir::parse_program(collector::read_file(a.program));
  std::vector<std::string> targets = a.targets;
  if (targets.empty()) {
    for (const auto& c : program.classes) targets.push_back(c.name);
  }
  const auto relevant = ir::detect_relevant_classes(ir::build_dependency_graph(program), targets);
  const auto extraction = symex::extract_abstraction_functions(program, relevant, a.bounds);
  if (extraction.functions.empty()) warn("no abstraction functions were extracted");
  for (const auto& m : extraction.methods) {
    if (m.truncated) warn(m.class_name + "." + m.method + " was truncated (" + m.truncation_reason + ")");
  }
  write_output(g, "afs.json", symex::write_af_json(extraction));
}

void run_profile(const Global& g, const ProfileArgs& a) {
  const auto afs = load_afs(a.afs);
  const auto runs = collector::load_runs(a.traces);
  std::vector<std::string> ids;
  for (const auto& f : afs.functions) ids.push_back(f.id);
  std::vector<std::pair<AbstractState, filtering::Provenance>> evaluations;
  for (const auto& run : runs) {
    const auto snaps = collector::profile_snapshots(run);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      evaluations.emplace_back(abstract_state(afs.functions, *snaps[i]), filtering::Provenance{run.id, i});
    }
  }
  write_output(g, "matrix.csv", filtering::write_matrix_csv(filtering::build_matrix(ids, evaluations)));
}

void run_filter(const Global& g, const FilterArgs& a) {
  const auto matrix = filtering::read_matrix_csv(collector::read_file(a.matrix));
  auto afs = load_afs(a.afs);
  std::vector<std::string> ids;
  for (const auto& f : afs.functions) ids.push_back(f.id);
  if (ids != matrix.columns) {
    throw Error(ErrorKind::HashMismatch, "matrix columns hash " + af_list_hash(matrix.columns) +
                                             " differs from AF list hash " + af_list_hash(ids));
  }
  const auto [kept, report] = filtering::filter_functions(matrix);
  for (const auto& w : report.warnings) warn(w);
  std::vector<AbstractionFunction> functions;
  for (const auto& f : afs.functions) {
    if (std::find(kept.columns.begin(), kept.columns.end(), f.id) != kept.columns.end()) functions.push_back(f);
  }
  afs.functions = std::move(functions);
  write_output(g, "kept_afs.json", symex::write_af_json(afs));
  write_output(g, "filter_report.json", filtering::write_report_json(report));
}

void run_collect(const Global& g, const CollectArgs& a) {
  collector::SamplerConfig cfg;
  cfg.p = a.p;
  cfg.rng_seed = g.seed;
  cfg.fixed_length = a.fixed_length;
  if (a.mode == "cbr") {
    cfg.mode = collector::SamplingMode::Cbr;
  } else if (a.mode == "fixed_length") {
    cfg.mode = collector::SamplingMode::FixedLength;
  } else {
    throw Error(ErrorKind::Precondition, "unknown sampling mode '" + a.mode + "'");
  }
  cfg.validate();
  const auto runs = collector::load_runs(a.traces);
  if (cfg.mode == collector::SamplingMode::Cbr) {
    const auto afs = load_afs(a.afs);
    const auto bursts = collector::collect_cbr_bursts(runs, afs.functions, cfg);
    if (bursts.empty()) warn("no bursts were collected");
    write_output(g, "bursts.jsonl", collector::write_bursts(bursts));
  } else {
    const auto samples = collector::collect_fixed_sampling(runs, cfg);
    if (samples.empty()) warn("no samples were collected");
    write_output(g, "samples.jsonl", collector::write_samples(samples));
  }
}

void run_synthesize(const Global& g, const SynthesizeArgs& a) {
  const auto fsm = model::synthesize(collector::parse_bursts(collector::read_file(a.bursts)));
  if (fsm.empty()) warn("the model is empty");
  write_output(g, "fsm.json", model::export_json(fsm));
  write_output(g, "fsm.dot", model::export_dot(fsm));
}

void run_simulate(const Global& g, const SimulateArgs& a) {
  const auto fsm = model::import_json(collector::read_file(a.fsm));
  const auto traces = model::simulate_traces(fsm, a.start, a.max_hops, a.budget);
  if (traces.size() >= a.budget) warn("simulation stopped at the budget of " + std::to_string(a.budget));
  write_output(g, "simulations.jsonl", model::write_reconstructions(traces));
}

void run_evaluate(const Global& g, const EvaluateArgs& a) {
  const auto fsm = model::import_json(collector::read_file(a.fsm));
  const auto afs = load_afs(a.afs);
  const auto runs = collector::load_runs(a.traces);
  if (fsm.empty()) warn("the model is empty; precision is undefined");
  const auto precision = metrics::overall_precision(fsm, runs, afs.functions);
  const auto recall = metrics::model_recall(fsm, runs, afs.functions);

  json doc;
  doc["af_hash"] = af_list_hash(afs.functions);
  doc["states"] = fsm.states().size();
  doc["transitions"] = fsm.transitions().size();
  doc["overall_precision"] = precision.overall ? json(*precision.overall) : json(nullptr);
  doc["excluded_nodes"] = precision.excluded;
  doc["mean_recall"] = recall.mean;
  write_output(g, "precision.csv", metrics::precision_csv(precision));
  write_output(g, "recall.csv", metrics::recall_csv(recall));
  if (!a.samples.empty()) {
    const auto baseline =
        metrics::baseline_recall(collector::parse_samples(collector::read_file(a.samples)), runs);
    doc["baseline_mean_recall"] = baseline.mean;
    write_output(g, "baseline_recall.csv", metrics::recall_csv(baseline));
  }
  write_output(g, "evaluation.json", doc.dump(2) + "\n");
}

void run_sweep(const Global& g, const SweepArgs& a) {
  const auto afs = load_afs(a.afs);
  const auto runs = collector::load_runs(a.traces);
  std::vector<std::uint64_t> seeds = a.seeds;
  if (seeds.empty()) seeds.push_back(g.seed);
  std::vector<std::size_t> n_runs = a.n_runs;
  if (n_runs.empty()) n_runs.push_back(runs.size());
  const auto result = metrics::run_sweep(runs, afs.functions, a.p, n_runs, seeds);
  write_output(g, "sweep.csv", metrics::sweep_csv(result));
  write_output(g, "sweep_summary.json", metrics::sweep_summary_json(result));
}

}  // namespace cbr::cli
