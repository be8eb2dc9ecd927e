#include "cbr/model.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "cbr/error.hpp"

namespace cbr::model {

using json = nlohmann::ordered_json;

void AnnotatedFSM::add(const std::string& af_hash, const TransitionKey& key, const EventTrace& trace) {
  if (states_.empty() && transitions_.empty()) {
    af_hash_ = af_hash;
  } else if (af_hash != af_hash_) {
    throw Error(ErrorKind::HashMismatch, "burst hash " + af_hash + " differs from model hash " + af_hash_);
  }
  states_.insert(key.from);
  states_.insert(key.to);
  auto& traces = transitions_[key];
  if (std::find(traces.begin(), traces.end(), trace) == traces.end()) traces.push_back(trace);
}

bool AnnotatedFSM::same_as(const AnnotatedFSM& other) const {
  if (af_hash_ != other.af_hash_ || states_ != other.states_ ||
      transitions_.size() != other.transitions_.size()) {
    return false;
  }
  for (const auto& [key, traces] : transitions_) {
    auto it = other.transitions_.find(key);
    if (it == other.transitions_.end()) return false;
    std::set<EventTrace> a(traces.begin(), traces.end());
    std::set<EventTrace> b(it->second.begin(), it->second.end());
    if (a != b) return false;
  }
  return true;
}

AnnotatedFSM synthesize(const std::vector<Burst>& bursts) {
  AnnotatedFSM fsm;
  for (const auto& b : bursts) {
    if (b.pre.af_hash != b.post.af_hash) {
      throw Error(ErrorKind::HashMismatch, "burst pre and post states use different AF lists");
    }
    fsm.add(b.pre.af_hash, {b.label, b.pre.str(), b.post.str()}, b.trace);
  }
  return fsm;
}

namespace {

struct Walker {
  const AnnotatedFSM& fsm;
  std::size_t max_hops;
  std::size_t budget;
  std::map<std::string, std::vector<const std::pair<const TransitionKey, std::vector<EventTrace>>*>> out_edges;
  std::vector<ReconstructedTrace> results;
  ReconstructedTrace current;

  void walk(const std::string& state) {
    if (results.size() >= budget) return;
    const auto it = out_edges.find(state);
    const bool dead_end = it == out_edges.end() || it->second.empty();
    if (current.segments.size() == max_hops || dead_end) {
      current.end = state;
      results.push_back(current);
      return;
    }
    for (const auto* edge : it->second) {
      for (const auto& trace : edge->second) {
        if (results.size() >= budget) return;
        current.segments.emplace_back(edge->first.label, trace);
        current.states.push_back(edge->first.to);
        walk(edge->first.to);
        current.segments.pop_back();
        current.states.pop_back();
      }
    }
  }
};

}  // namespace

std::vector<ReconstructedTrace> simulate_traces(const AnnotatedFSM& fsm, const std::string& start,
                                                std::size_t max_hops, std::size_t budget) {
  if (!fsm.has_state(start)) throw Error(ErrorKind::UnknownState, "unknown start state '" + start + "'");
  Walker w{fsm, max_hops, budget, {}, {}, {}};
  for (const auto& entry : fsm.transitions()) w.out_edges[entry.first.from].push_back(&entry);
  for (auto& [state, edges] : w.out_edges) {
    std::stable_sort(edges.begin(), edges.end(), [](const auto* a, const auto* b) {
      return std::tie(a->first.label, a->first.to) < std::tie(b->first.label, b->first.to);
    });
  }
  w.current.start = start;
  w.current.states.push_back(start);
  w.walk(start);
  return std::move(w.results);
}

std::size_t accepts_prefix(const AnnotatedFSM& fsm, const collector::Run& run,
                           const std::vector<AbstractionFunction>& afs) {
  if (fsm.empty()) return 0;
  const std::string hash = af_list_hash(afs);
  if (hash != fsm.af_hash()) {
    throw Error(ErrorKind::HashMismatch, "AF list hash " + hash + " differs from model hash " + fsm.af_hash());
  }
  std::size_t accepted = 0;
  for (const auto& seg : run.segments) {
    const TransitionKey key{seg.label, abstract_state(afs, seg.pre_state).str(),
                            abstract_state(afs, seg.post_state).str()};
    const auto it = fsm.transitions().find(key);
    if (it == fsm.transitions().end()) break;
    if (std::find(it->second.begin(), it->second.end(), seg.events) == it->second.end()) break;
    accepted += seg.events.size();
  }
  return accepted;
}

// ---------------------------------------------------------------------------
// Export / import

namespace {

json trace_json(const EventTrace& t) {
  json a = json::array();
  for (const auto& c : t) {
    a.push_back({{"method", c.method}, {"class", c.class_name}, {"params", json::parse(c.params)}});
  }
  return a;
}

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorKind::Schema, "FSM document: " + why); }

std::string need_string(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    bad(std::string("'") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string export_json(const AnnotatedFSM& fsm) {
  json states = json::array();
  for (const auto& s : fsm.states()) states.push_back(s);
  json transitions = json::array();
  for (const auto& [key, traces] : fsm.transitions()) {
    json ts = json::array();
    for (const auto& t : traces) ts.push_back(trace_json(t));
    transitions.push_back({{"label", key.label}, {"from", key.from}, {"to", key.to}, {"traces", ts}});
  }
  json doc = {{"af_hash", fsm.af_hash()}, {"states", states}, {"transitions", transitions}};
  return doc.dump(2) + "\n";
}

std::string export_dot(const AnnotatedFSM& fsm) {
  std::ostringstream out;
  out << "digraph fsm {\n";
  for (const auto& s : fsm.states()) out << "  \"" << dot_escape(s) << "\";\n";
  for (const auto& [key, traces] : fsm.transitions()) {
    out << "  \"" << dot_escape(key.from) << "\" -> \"" << dot_escape(key.to) << "\" [label=\""
        << dot_escape(key.label) << " (" << traces.size() << ")\"];\n";
  }
  out << "}\n";
  return out.str();
}

AnnotatedFSM import_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  const std::string hash = need_string(doc, "af_hash");
  if (!doc.contains("states") || !doc.at("states").is_array()) bad("'states' must be an array");
  if (!doc.contains("transitions") || !doc.at("transitions").is_array()) bad("'transitions' must be an array");

  AnnotatedFSM fsm;
  std::set<std::string> declared;
  for (const auto& s : doc.at("states")) {
    if (!s.is_string()) bad("state entries must be strings");
    declared.insert(s.get<std::string>());
  }
  for (const auto& t : doc.at("transitions")) {
    const TransitionKey key{need_string(t, "label"), need_string(t, "from"), need_string(t, "to")};
    if (!declared.count(key.from) || !declared.count(key.to)) bad("transition endpoint is not a declared state");
    if (!t.contains("traces") || !t.at("traces").is_array() || t.at("traces").empty()) {
      bad("every transition needs at least one trace");
    }
    for (const auto& tr : t.at("traces")) {
      if (!tr.is_array()) bad("a trace must be an array of events");
      EventTrace trace;
      for (const auto& e : tr) {
        collector::MethodCall c;
        c.method = need_string(e, "method");
        c.class_name = need_string(e, "class");
        if (!e.contains("params") || !e.at("params").is_array()) bad("'params' must be an array");
        c.params = e.at("params").dump();
        trace.push_back(std::move(c));
      }
      fsm.add(hash, key, trace);
    }
  }
  if (fsm.states() != declared) bad("every state must be an endpoint of some transition");
  return fsm;
}

std::string write_reconstructions(const std::vector<ReconstructedTrace>& traces) {
  std::string out;
  for (const auto& r : traces) {
    json segs = json::array();
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
      segs.push_back({{"label", r.segments[i].first},
                      {"to", r.states[i + 1]},
                      {"trace", trace_json(r.segments[i].second)}});
    }
    out += json({{"start", r.start}, {"segments", segs}, {"end", r.end}}).dump() + "\n";
  }
  return out;
}

}  // namespace cbr::model
