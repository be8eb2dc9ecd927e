#pragma once

// Annotated finite state model synthesized from bursts: states are abstract
// program states, transitions are user operations, and each transition keeps
// the set of method-call traces observed for it.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cbr/collector.hpp"

namespace cbr::model {

using collector::Burst;
using collector::EventTrace;

struct TransitionKey {
  std::string label;
  std::string from;  // abstract state string, e.g. "UF"
  std::string to;

  friend auto operator<=>(const TransitionKey&, const TransitionKey&) = default;
};

class AnnotatedFSM {
 public:
  const std::string& af_hash() const { return af_hash_; }
  const std::set<std::string>& states() const { return states_; }
  /// Annotation traces in first-seen order; duplicates are stored once.
  const std::map<TransitionKey, std::vector<EventTrace>>& transitions() const { return transitions_; }

  bool empty() const { return states_.empty(); }
  bool has_state(const std::string& s) const { return states_.count(s) > 0; }

  /// Adds the transition and the trace. Throws Error(HashMismatch) when the
  /// hash differs from earlier additions.
  void add(const std::string& af_hash, const TransitionKey& key, const EventTrace& trace);

  /// Equality with annotation sets compared as sets.
  bool same_as(const AnnotatedFSM& other) const;

 private:
  std::string af_hash_;
  std::set<std::string> states_;
  std::map<TransitionKey, std::vector<EventTrace>> transitions_;
};

AnnotatedFSM synthesize(const std::vector<Burst>& bursts);

struct ReconstructedTrace {
  std::string start;
  std::vector<std::string> states;  // start, then the state after each hop
  std::vector<std::pair<std::string, EventTrace>> segments;
  std::string end;
};

/// Maximal walks only: a walk is emitted when it reaches max_hops or a state
/// without outgoing transitions. Transitions are tried in (label, to) order,
/// annotation traces in insertion order. Stops after `budget` results.
/// Throws Error(UnknownState) when start is not a state of the model.
std::vector<ReconstructedTrace> simulate_traces(const AnnotatedFSM& fsm, const std::string& start,
                                                std::size_t max_hops, std::size_t budget = 10000);

/// Number of events in the longest prefix of segments that the model accepts.
std::size_t accepts_prefix(const AnnotatedFSM& fsm, const collector::Run& run,
                           const std::vector<AbstractionFunction>& afs);

std::string export_json(const AnnotatedFSM& fsm);
std::string export_dot(const AnnotatedFSM& fsm);
/// Throws Error(Schema) on malformed input.
AnnotatedFSM import_json(std::string_view text);

std::string write_reconstructions(const std::vector<ReconstructedTrace>& traces);

}  // namespace cbr::model
