#pragma once

// Replay of recorded full runs as if they happened in the field: operation
// segments, probabilistic burst collection, and the fixed-length sampling
// baseline that ignores operation boundaries.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/state.hpp"
#include "cbr/term.hpp"

namespace cbr::collector {

enum class SrtCategory { Instantaneous, Immediate, Continuous, Captive };

std::string_view to_string(SrtCategory c);

struct MethodCall {
  std::string method;
  std::string class_name;
  std::string params;  // compact JSON array of literals; part of trace identity
  std::optional<ConcreteState> state;  // snapshot taken at this call, if recorded

  /// Identity ignores the optional snapshot.
  friend bool operator==(const MethodCall& a, const MethodCall& b) {
    return a.method == b.method && a.class_name == b.class_name && a.params == b.params;
  }
  friend bool operator<(const MethodCall& a, const MethodCall& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.class_name != b.class_name) return a.class_name < b.class_name;
    return a.params < b.params;
  }
};

using EventTrace = std::vector<MethodCall>;

struct OperationSegment {
  std::string label;
  SrtCategory srt_category = SrtCategory::Instantaneous;
  ConcreteState pre_state;
  EventTrace events;
  ConcreteState post_state;
};

struct Run {
  std::string id;
  std::vector<OperationSegment> segments;

  std::size_t event_count() const;
};

std::vector<Run> parse_runs(std::string_view jsonl);
/// Reads a trace file. Error(Io) when unreadable, Error(Schema) with the
/// 1-based record index, Error(StateReference) naming a dangling object id.
std::vector<Run> load_runs(const std::string& path);
std::string write_runs(const std::vector<Run>& runs);

ConcreteState parse_state_json(std::string_view text);
std::string state_to_json(const ConcreteState& s);

struct Burst {
  std::string label;
  AbstractState pre;
  EventTrace trace;
  AbstractState post;
};

std::string write_bursts(const std::vector<Burst>& bursts);
std::vector<Burst> parse_bursts(std::string_view jsonl);

enum class SamplingMode { Cbr, FixedLength };

struct SamplerConfig {
  double p = 1.0;
  std::uint64_t rng_seed = 0;
  SamplingMode mode = SamplingMode::Cbr;
  std::size_t fixed_length = 30;

  /// Throws Error(Precondition) when p is outside [0, 1] or the length is 0.
  void validate() const;
};

/// Uniform doubles in [0, 1): the top 53 bits of a 64-bit Mersenne Twister.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

/// One draw per segment, in run order then segment order; the segment is
/// recorded when the draw is below p.
std::vector<Burst> collect_cbr_bursts(const std::vector<Run>& runs,
                                      const std::vector<AbstractionFunction>& afs,
                                      const SamplerConfig& cfg);

struct SampledTrace {
  std::string run_id;
  std::size_t first_event = 0;  // offset within the run's event sequence
  EventTrace events;
};

/// Draws only at segment starts while idle. A started recording takes the
/// next fixed_length events, crossing segment boundaries, and stops early at
/// the end of the run.
std::vector<SampledTrace> collect_fixed_sampling(const std::vector<Run>& runs, const SamplerConfig& cfg);

std::string write_samples(const std::vector<SampledTrace>& samples);
std::vector<SampledTrace> parse_samples(std::string_view jsonl);

/// Evaluation points used for training: each segment's pre_state, every
/// event snapshot, and the run's final post_state.
std::vector<const ConcreteState*> profile_snapshots(const Run& run);

std::string read_file(const std::string& path);

}  // namespace cbr::collector
