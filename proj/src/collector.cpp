#include "cbr/collector.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbr/error.hpp"

namespace cbr::collector {

using json = nlohmann::ordered_json;

std::string_view to_string(SrtCategory c) {
  switch (c) {
    case SrtCategory::Instantaneous: return "Instantaneous";
    case SrtCategory::Immediate: return "Immediate";
    case SrtCategory::Continuous: return "Continuous";
    case SrtCategory::Captive: return "Captive";
  }
  return "Instantaneous";
}

std::size_t Run::event_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.events.size();
  return n;
}

void SamplerConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::Precondition, "sampling probability must lie in [0, 1]");
  }
  if (mode == SamplingMode::FixedLength && fixed_length == 0) {
    throw Error(ErrorKind::Precondition, "fixed_length must be positive");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// JSON mapping

namespace {

struct SchemaAt {
  std::size_t record;
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::Schema, "record " + std::to_string(record) + ": " + why);
  }
  const json& get(const json& obj, const char* key) const {
    if (!obj.is_object() || !obj.contains(key)) fail(std::string("missing '") + key + "'");
    return obj.at(key);
  }
  std::string str(const json& obj, const char* key) const {
    const json& v = get(obj, key);
    if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }
};

Value value_from_json(const json& j, const SchemaAt& at) {
  Value v;
  if (j.is_null()) {
    v.kind = Value::Kind::Null;
  } else if (j.is_boolean()) {
    v.kind = Value::Kind::Bool;
    v.bool_value = j.get<bool>();
  } else if (j.is_number_integer()) {
    v.kind = Value::Kind::Int;
    v.int_value = j.get<std::int64_t>();
  } else if (j.is_string()) {
    v.kind = Value::Kind::Ref;
    v.ref = j.get<std::string>();
  } else if (j.is_array()) {
    v.kind = Value::Kind::Array;
    for (const auto& item : j) {
      if (item.is_array()) at.fail("nested arrays are not supported");
      v.items.push_back(value_from_json(item, at));
    }
  } else {
    at.fail("field values must be null, bool, integer, object id or array");
  }
  return v;
}

json value_to_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Null: return nullptr;
    case Value::Kind::Int: return v.int_value;
    case Value::Kind::Bool: return v.bool_value;
    case Value::Kind::Ref: return v.ref;
    case Value::Kind::Array: {
      json a = json::array();
      for (const auto& item : v.items) a.push_back(value_to_json(item));
      return a;
    }
  }
  return nullptr;
}

ConcreteState state_from_json(const json& j, const SchemaAt& at) {
  if (!j.is_object()) at.fail("state must be an object");
  ConcreteState s;
  if (j.contains("roots")) {
    const json& roots = j.at("roots");
    if (!roots.is_object()) at.fail("'roots' must be an object");
    for (const auto& [cls, id] : roots.items()) {
      if (id.is_null()) {
        s.roots[cls] = std::nullopt;
      } else if (id.is_string()) {
        s.roots[cls] = id.get<std::string>();
      } else {
        at.fail("root '" + cls + "' must be an object id or null");
      }
    }
  }
  if (j.contains("objects")) {
    const json& objects = j.at("objects");
    if (!objects.is_object()) at.fail("'objects' must be an object");
    for (const auto& [id, o] : objects.items()) {
      Object obj;
      obj.class_name = at.str(o, "class");
      if (o.contains("fields")) {
        const json& fields = o.at("fields");
        if (!fields.is_object()) at.fail("'fields' of " + id + " must be an object");
        for (const auto& [name, v] : fields.items()) obj.fields[name] = value_from_json(v, at);
      }
      s.objects[id] = std::move(obj);
    }
  }
  validate_state(s);
  return s;
}

json state_json(const ConcreteState& s) {
  json roots = json::object();
  for (const auto& [cls, id] : s.roots) roots[cls] = id ? json(*id) : json(nullptr);
  json objects = json::object();
  for (const auto& [id, obj] : s.objects) {
    json fields = json::object();
    for (const auto& [name, v] : obj.fields) fields[name] = value_to_json(v);
    objects[id] = {{"class", obj.class_name}, {"fields", fields}};
  }
  return {{"roots", roots}, {"objects", objects}};
}

MethodCall call_from_json(const json& j, const SchemaAt& at) {
  MethodCall c;
  c.method = at.str(j, "method");
  c.class_name = at.str(j, "class");
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_array()) at.fail("'params' must be an array");
    c.params = p.dump();
  } else {
    c.params = "[]";
  }
  if (j.contains("state")) c.state = state_from_json(j.at("state"), at);
  return c;
}

json call_json(const MethodCall& c, bool with_state) {
  json j = {{"method", c.method}, {"class", c.class_name}, {"params", json::parse(c.params)}};
  if (with_state && c.state) j["state"] = state_json(*c.state);
  return j;
}

json trace_json(const EventTrace& t, bool with_state) {
  json a = json::array();
  for (const auto& c : t) a.push_back(call_json(c, with_state));
  return a;
}

EventTrace trace_from_json(const json& j, const SchemaAt& at) {
  if (!j.is_array()) at.fail("event list must be an array");
  EventTrace t;
  for (const auto& e : j) t.push_back(call_from_json(e, at));
  return t;
}

SrtCategory srt_from_string(const std::string& s, const SchemaAt& at) {
  for (auto c : {SrtCategory::Instantaneous, SrtCategory::Immediate, SrtCategory::Continuous,
                 SrtCategory::Captive}) {
    if (s == to_string(c)) return c;
  }
  at.fail("unknown srt_category '" + s + "'");
}

json parse_line(const std::string& line, const SchemaAt& at) {
  try {
    return json::parse(line);
  } catch (const json::parse_error&) {
    at.fail("invalid JSON");
  }
}

template <typename F>
void for_each_record(std::string_view text, F&& f) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++record;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const SchemaAt at{record};
    f(parse_line(line, at), at);
  }
}

}  // namespace

ConcreteState parse_state_json(std::string_view text) {
  const SchemaAt at{1};
  return state_from_json(parse_line(std::string(text), at), at);
}

std::string state_to_json(const ConcreteState& s) { return state_json(s).dump(); }

std::vector<Run> parse_runs(std::string_view jsonl) {
  std::vector<Run> runs;
  for_each_record(jsonl, [&](const json& j, const SchemaAt& at) {
    if (!j.is_object() || j.size() != 1) at.fail("expected a single 'run' or 'segment' key");
    if (j.contains("run")) {
      const json& id = j.at("run");
      Run r;
      if (id.is_string()) {
        r.id = id.get<std::string>();
      } else if (id.is_number_integer()) {
        r.id = id.dump();
      } else {
        at.fail("run id must be a string or integer");
      }
      runs.push_back(std::move(r));
      return;
    }
    if (!j.contains("segment")) at.fail("expected a single 'run' or 'segment' key");
    if (runs.empty()) at.fail("segment before any run header");
    const json& s = j.at("segment");
    OperationSegment seg;
    seg.label = at.str(s, "label");
    seg.srt_category = srt_from_string(at.str(s, "srt_category"), at);
    seg.pre_state = state_from_json(at.get(s, "pre_state"), at);
    seg.events = trace_from_json(at.get(s, "events"), at);
    seg.post_state = state_from_json(at.get(s, "post_state"), at);
    runs.back().segments.push_back(std::move(seg));
  });
  return runs;
}

std::vector<Run> load_runs(const std::string& path) { return parse_runs(read_file(path)); }

std::string write_runs(const std::vector<Run>& runs) {
  std::string out;
  for (const auto& r : runs) {
    out += json({{"run", r.id}}).dump() + "\n";
    for (const auto& s : r.segments) {
      json seg = {{"label", s.label},
                  {"srt_category", std::string(to_string(s.srt_category))},
                  {"pre_state", state_json(s.pre_state)},
                  {"events", trace_json(s.events, true)},
                  {"post_state", state_json(s.post_state)}};
      out += json({{"segment", seg}}).dump() + "\n";
    }
  }
  return out;
}

std::string write_bursts(const std::vector<Burst>& bursts) {
  std::string out;
  for (const auto& b : bursts) {
    json j = {{"label", b.label},
              {"pre", b.pre.str()},
              {"trace", trace_json(b.trace, false)},
              {"post", b.post.str()},
              {"af_hash", b.pre.af_hash}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<Burst> parse_bursts(std::string_view jsonl) {
  std::vector<Burst> bursts;
  for_each_record(jsonl, [&](const json& j, const SchemaAt& at) {
    Burst b;
    b.label = at.str(j, "label");
    const std::string hash = at.str(j, "af_hash");
    try {
      b.pre = AbstractState::parse(at.str(j, "pre"), hash);
      b.post = AbstractState::parse(at.str(j, "post"), hash);
    } catch (const Error& e) {
      at.fail(e.what());
    }
    if (b.pre.values.size() != b.post.values.size()) at.fail("pre and post differ in length");
    b.trace = trace_from_json(at.get(j, "trace"), at);
    bursts.push_back(std::move(b));
  });
  return bursts;
}

std::string write_samples(const std::vector<SampledTrace>& samples) {
  std::string out;
  for (const auto& s : samples) {
    json j = {{"run_id", s.run_id}, {"first_event", s.first_event}, {"events", trace_json(s.events, false)}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<SampledTrace> parse_samples(std::string_view jsonl) {
  std::vector<SampledTrace> out;
  for_each_record(jsonl, [&](const json& j, const SchemaAt& at) {
    SampledTrace s;
    s.run_id = at.str(j, "run_id");
    const json& first = at.get(j, "first_event");
    if (!first.is_number_unsigned()) at.fail("'first_event' must be a non-negative integer");
    s.first_event = first.get<std::size_t>();
    s.events = trace_from_json(at.get(j, "events"), at);
    out.push_back(std::move(s));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Burst> collect_cbr_bursts(const std::vector<Run>& runs,
                                      const std::vector<AbstractionFunction>& afs,
                                      const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SamplingMode::Cbr) {
    throw Error(ErrorKind::Precondition, "burst collection needs mode=cbr");
  }
  Sampler rng(cfg.rng_seed);
  std::vector<Burst> out;
  for (const auto& run : runs) {
    for (const auto& seg : run.segments) {
      if (rng.next() >= cfg.p) continue;
      Burst b;
      b.label = seg.label;
      b.pre = abstract_state(afs, seg.pre_state);
      b.trace = seg.events;
      for (auto& e : b.trace) e.state.reset();
      b.post = abstract_state(afs, seg.post_state);
      out.push_back(std::move(b));
    }
  }
  return out;
}

std::vector<SampledTrace> collect_fixed_sampling(const std::vector<Run>& runs, const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SamplingMode::FixedLength) {
    throw Error(ErrorKind::Precondition, "fixed-length sampling needs mode=fixed_length");
  }
  Sampler rng(cfg.rng_seed);
  std::vector<SampledTrace> out;
  for (const auto& run : runs) {
    EventTrace flat;
    std::vector<std::size_t> starts;
    for (const auto& seg : run.segments) {
      starts.push_back(flat.size());
      flat.insert(flat.end(), seg.events.begin(), seg.events.end());
    }
    std::size_t busy_until = 0;  // no new draw before this index
    for (std::size_t start : starts) {
      if (start < busy_until) continue;
      if (rng.next() >= cfg.p) continue;
      const std::size_t end = std::min(flat.size(), start + cfg.fixed_length);
      busy_until = start + cfg.fixed_length;  // stays busy past a run end that cut the recording short
      if (end == start) continue;
      SampledTrace t;
      t.run_id = run.id;
      t.first_event = start;
      t.events.assign(flat.begin() + static_cast<std::ptrdiff_t>(start),
                      flat.begin() + static_cast<std::ptrdiff_t>(end));
      for (auto& e : t.events) e.state.reset();
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<const ConcreteState*> profile_snapshots(const Run& run) {
  std::vector<const ConcreteState*> out;
  for (const auto& seg : run.segments) {
    out.push_back(&seg.pre_state);
    for (const auto& e : seg.events) {
      if (e.state) out.push_back(&*e.state);
    }
  }
  if (!run.segments.empty()) out.push_back(&run.segments.back().post_state);
  return out;
}

}  // namespace cbr::collector
