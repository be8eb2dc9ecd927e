// Command-line front end. Each subcommand is one pipeline stage reading and
// writing the documented file formats.
//
// --config takes a JSON object: top-level scalars fill global flags and the
// object named after the subcommand fills that subcommand's flags. Keys use
// the flag spelling with '_' for '-'. Flags given on the command line win.

#include <algorithm>
#include <chrono>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbr/collector.hpp"
#include "cbr/error.hpp"
#include "commands.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace cbr::cli;

struct Cli {
  CLI::App app{"Controlled burst recording pipeline", "cbr"};
  Global global;
  std::string config;
  ExtractArgs extract;
  std::int64_t time_budget_ms = 60000;
  ProfileArgs profile;
  FilterArgs filter;
  CollectArgs collect;
  SynthesizeArgs synthesize;
  SimulateArgs simulate;
  EvaluateArgs evaluate;
  SweepArgs sweep;

  // Required flags are only enforced on the final parse, after the config
  // file has had a chance to supply them.
  explicit Cli(bool strict) {
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", global.seed, "Sampler seed");
    app.add_option("--out-dir", global.out_dir, "Output directory")->capture_default_str();
    app.add_option("--config", config, "JSON configuration file");

    auto req = [strict](CLI::Option* o) { return strict ? o->required() : o; };

    auto* ex = app.add_subcommand("extract", "Derive abstraction functions from a mini-IR program");
    req(ex->add_option("--program", extract.program, "Program source"));
    ex->add_option("--targets", extract.targets, "Target classes (default: all)");
    ex->add_option("--max-branches", extract.bounds.max_branches_per_path)->capture_default_str();
    ex->add_option("--max-states", extract.bounds.max_states)->capture_default_str();
    ex->add_option("--time-budget-ms", time_budget_ms)->capture_default_str();
    ex->add_option("--max-loop-unroll", extract.bounds.max_loop_unroll)->capture_default_str();

    auto* pr = app.add_subcommand("profile", "Evaluate functions on training traces");
    req(pr->add_option("--traces", profile.traces, "Trace JSONL"));
    req(pr->add_option("--afs", profile.afs, "AF JSON"));

    auto* fi = app.add_subcommand("filter", "Minimize functions against a matrix");
    req(fi->add_option("--matrix", filter.matrix, "Matrix CSV"));
    req(fi->add_option("--afs", filter.afs, "AF JSON"));

    auto* co = app.add_subcommand("collect", "Replay traces and record bursts or fixed-length samples");
    req(co->add_option("--traces", collect.traces, "Trace JSONL"));
    co->add_option("--afs", collect.afs, "AF JSON (cbr mode)");
    co->add_option("--p", collect.p, "Recording probability")->capture_default_str();
    co->add_option("--mode", collect.mode, "cbr or fixed_length")->capture_default_str();
    co->add_option("--fixed-length", collect.fixed_length)->capture_default_str();

    auto* sy = app.add_subcommand("synthesize", "Build the annotated model from bursts");
    req(sy->add_option("--bursts", synthesize.bursts, "Burst JSONL"));

    auto* si = app.add_subcommand("simulate", "Reconstruct traces by walking the model");
    req(si->add_option("--fsm", simulate.fsm, "Model JSON"));
    req(si->add_option("--start", simulate.start, "Start state, e.g. UU"));
    si->add_option("--max-hops", simulate.max_hops)->capture_default_str();
    si->add_option("--budget", simulate.budget)->capture_default_str();

    auto* ev = app.add_subcommand("evaluate", "Node precision and trace recall");
    req(ev->add_option("--fsm", evaluate.fsm, "Model JSON"));
    req(ev->add_option("--traces", evaluate.traces, "Original trace JSONL"));
    req(ev->add_option("--afs", evaluate.afs, "AF JSON"));
    ev->add_option("--samples", evaluate.samples, "Fixed-length samples for baseline recall");

    auto* sw = app.add_subcommand("sweep", "Precision and recall over probabilities and run counts");
    req(sw->add_option("--traces", sweep.traces, "Trace JSONL"));
    req(sw->add_option("--afs", sweep.afs, "AF JSON"));
    req(sw->add_option("--p", sweep.p, "Probabilities"));
    sw->add_option("--n-runs", sweep.n_runs, "Run counts (default: all runs)");
    sw->add_option("--seeds", sweep.seeds, "Seeds (default: --seed)");
  }

  void dispatch() {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "extract") {
      extract.bounds.per_method_time_budget = std::chrono::milliseconds(time_budget_ms);
      run_extract(global, extract);
    } else if (name == "profile") {
      run_profile(global, profile);
    } else if (name == "filter") {
      run_filter(global, filter);
    } else if (name == "collect") {
      if (collect.mode == "cbr" && collect.afs.empty()) {
        throw cbr::Error(cbr::ErrorKind::Precondition, "--afs is required in cbr mode");
      }
      run_collect(global, collect);
    } else if (name == "synthesize") {
      run_synthesize(global, synthesize);
    } else if (name == "simulate") {
      run_simulate(global, simulate);
    } else if (name == "evaluate") {
      run_evaluate(global, evaluate);
    } else {
      run_sweep(global, sweep);
    }
  }
};

std::string flag_for(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

void append_value(const json& v, std::vector<std::string>& out, const std::string& key) {
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_number() || v.is_boolean()) {
    out.push_back(v.dump());
  } else {
    throw cbr::Error(cbr::ErrorKind::Schema, "config key '" + key + "' must be a scalar or a list of scalars");
  }
}

// Flags from `section` that `scope` did not receive on the command line.
void inject(const json& section, const CLI::App& scope, std::vector<std::string>& out, const std::string& where) {
  for (const auto& [key, value] : section.items()) {
    if (value.is_object()) continue;
    const CLI::Option* opt = scope.get_option_no_throw(flag_for(key));
    if (opt == nullptr || key == "config") {
      throw cbr::Error(cbr::ErrorKind::Schema, "unknown config key '" + key + "' in " + where);
    }
    if (opt->count() > 0) continue;
    out.push_back(flag_for(key));
    if (value.is_array()) {
      for (const auto& v : value) append_value(v, out, key);
    } else {
      append_value(value, out, key);
    }
  }
}

std::vector<std::string> config_args(const Cli& first) {
  json doc;
  try {
    doc = json::parse(cbr::collector::read_file(first.config));
  } catch (const json::parse_error& e) {
    throw cbr::Error(cbr::ErrorKind::Schema, "config is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw cbr::Error(cbr::ErrorKind::Schema, "config must be a JSON object");
  std::vector<std::string> out;
  inject(doc, first.app, out, "the top level");
  const CLI::App* sub = first.app.get_subcommands().front();
  if (doc.contains(sub->get_name())) {
    const json& section = doc.at(sub->get_name());
    if (!section.is_object()) throw cbr::Error(cbr::ErrorKind::Schema, "config section '" + sub->get_name() + "' must be an object");
    inject(section, *sub, out, "section '" + sub->get_name() + "'");
  }
  return out;
}

int report(const std::string& kind, const std::string& message, int code) {
  std::cerr << json({{"error", kind}, {"message", message}}).dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    Cli first(false);
    try {
      first.app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return first.app.exit(e);
      return report("usage", e.what(), 2);
    }
    if (!first.config.empty()) {
      const auto extra = config_args(first);
      args.insert(args.end(), extra.begin(), extra.end());
    }
    Cli cli(true);
    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      cli.app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      return report("usage", e.what(), 2);
    }
    cli.dispatch();
    return 0;
  } catch (const cbr::Error& e) {
    return report(std::string(cbr::to_string(e.kind())), e.what(), 2);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
}
