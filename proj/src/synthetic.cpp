#include "cbr/synthetic.hpp"

#include <array>
#include <string>

namespace cbr::synthetic {

namespace {

constexpr std::array<const char*, kLabelCount> kLabels = {"open", "edit", "save", "search", "undo", "sync"};
// Bits of (a, b, c) each operation flips.
constexpr std::array<int, kLabelCount> kMasks = {1, 2, 4, 3, 6, 5};
constexpr std::array<const char*, 5> kMethods = {"load", "render", "validate", "store", "notify"};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ConcreteState state_of(int bits) {
  ConcreteState s;
  s.roots["App"] = "app";
  Object app{"App", {}};
  const char* names[] = {"a", "b", "c"};
  for (int i = 0; i < 3; ++i) {
    Value v;
    v.kind = Value::Kind::Int;
    v.int_value = (bits >> i) & 1;
    app.fields[names[i]] = v;
  }
  s.objects["app"] = std::move(app);
  return s;
}

// The calls an operation makes depend only on the operation, the state it
// starts from and the variant, so identical situations repeat identically.
collector::EventTrace events_for(int label, int state, int variant) {
  const std::uint64_t h = mix(static_cast<std::uint64_t>(label * 64 + state * 2 + variant));
  const std::size_t count = 31 + h % 30;
  collector::EventTrace trace;
  for (std::size_t i = 0; i < count; ++i) {
    collector::MethodCall c;
    c.class_name = "App";
    c.method = kMethods[mix(h + i) % kMethods.size()];
    c.params = i == 0 ? "[" + std::to_string(variant) + "]" : "[]";
    trace.push_back(std::move(c));
  }
  return trace;
}

}  // namespace

std::vector<collector::Run> generate_runs(const SyntheticConfig& cfg) {
  collector::Sampler rng(cfg.seed);
  std::vector<collector::Run> runs;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    collector::Run run;
    run.id = "run" + std::to_string(r + 1);
    int state = 0;
    for (std::size_t k = 0; k < cfg.segments_per_run; ++k) {
      int label = state % kLabelCount;
      if (rng.next() >= cfg.preferred_probability) {
        label = static_cast<int>(rng.next() * kLabelCount);
      }
      const int variant = rng.next() < cfg.variant_probability ? 1 : 0;
      collector::OperationSegment seg;
      seg.label = kLabels[label];
      seg.srt_category = static_cast<collector::SrtCategory>(label % 4);
      seg.pre_state = state_of(state);
      seg.events = events_for(label, state, variant);
      state ^= kMasks[label];
      seg.post_state = state_of(state);
      run.segments.push_back(std::move(seg));
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

symex::Extraction abstraction_functions() {
  symex::Extraction e;
  const char* fields[] = {"a", "b", "c"};
  for (int i = 0; i < 3; ++i) {
    AbstractionFunction af;
    af.class_name = "App";
    af.method = "update";
    af.id = "App.update-F" + std::to_string(i + 1);
    af.clauses.push_back({parse_term(std::string("App.") + fields[i], {}), ir::BinaryOp::Gt, parse_term("0", {}), false});
    e.functions.push_back(std::move(af));
  }
  return e;
}

}  // namespace cbr::synthetic
