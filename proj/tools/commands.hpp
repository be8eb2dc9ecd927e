#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbr/symex.hpp"

namespace cbr::cli {

struct Global {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

struct ExtractArgs {
  std::string program;
  std::vector<std::string> targets;  // empty: every class
  symex::SymexBounds bounds;
};

struct ProfileArgs {
  std::string traces;
  std::string afs;
};

struct FilterArgs {
  std::string matrix;
  std::string afs;
};

struct CollectArgs {
  std::string traces;
  std::string afs;
  double p = 1.0;
  std::string mode = "cbr";
  std::size_t fixed_length = 30;
};

struct SynthesizeArgs {
  std::string bursts;
};

struct SimulateArgs {
  std::string fsm;
  std::string start;
  std::size_t max_hops = 5;
  std::size_t budget = 10000;
};

struct EvaluateArgs {
  std::string fsm;
  std::string traces;
  std::string afs;
  std::string samples;  // optional fixed-length samples for baseline recall
};

struct SweepArgs {
  std::string traces;
  std::string afs;
  std::vector<double> p;
  std::vector<std::size_t> n_runs;
  std::vector<std::uint64_t> seeds;  // empty: just the global seed
};

// Each command writes its outputs under g.out_dir and reports soft problems
// through warn(). Failures throw cbr::Error.
void warn(const std::string& message);

void run_extract(const Global& g, const ExtractArgs& a);
void run_profile(const Global& g, const ProfileArgs& a);
void run_filter(const Global& g, const FilterArgs& a);
void run_collect(const Global& g, const CollectArgs& a);
void run_synthesize(const Global& g, const SynthesizeArgs& a);
void run_simulate(const Global& g, const SimulateArgs& a);
void run_evaluate(const Global& g, const EvaluateArgs& a);
void run_sweep(const Global& g, const SweepArgs& a);

}  // namespace cbr::cli
