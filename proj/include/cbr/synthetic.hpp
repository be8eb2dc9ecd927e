#pragma once

// A small generated application used for the recall experiments. Its state is
// three integer fields; one predicate per field gives eight abstract states.
// Users mostly follow a preferred operation per state, so a handful of paths
// dominate, and every operation runs well over 30 method calls.

#include <cstdint>
#include <vector>

#include "cbr/collector.hpp"
#include "cbr/symex.hpp"

namespace cbr::synthetic {

struct SyntheticConfig {
  std::size_t runs = 20;
  std::size_t segments_per_run = 15;
  double preferred_probability = 0.75;
  double variant_probability = 0.1;
  std::uint64_t seed = 2024;
};

inline constexpr int kLabelCount = 6;

std::vector<collector::Run> generate_runs(const SyntheticConfig& cfg = {});

/// App.a > 0, App.b > 0, App.c > 0, in that order.
symex::Extraction abstraction_functions();

}  // namespace cbr::synthetic
