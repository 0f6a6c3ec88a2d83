#include "dkb/log.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dkb/errors.hpp"

namespace dkb {

namespace {
const Value kBottom{};

std::string_view strip_cr(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}
}  // namespace

const Value& lookup(const Payload& payload, std::string_view key) {
  auto it = payload.find(key);
  return it == payload.end() ? kBottom : it->second;
}

double normalize_time(std::size_t position, std::size_t length) {
  if (position < 1 || position > length)
    throw std::out_of_range("position " + std::to_string(position) + " outside 1.." +
                            std::to_string(length));
  if (length == 1) return 1.0;
  return static_cast<double>(position - 1) / static_cast<double>(length - 1);
}

void Log::add_trace(Trace trace) {
  if (case_ids_.contains(trace.case_id)) throw DuplicateCaseId(trace.case_id);

  for (auto& ev : trace.events) {
    if (ev.activity.empty()) throw Error("trace '" + trace.case_id + "': empty activity label");
    for (auto it = ev.payload.begin(); it != ev.payload.end();) {
      if (it->second.is_bottom()) {
        it = ev.payload.erase(it);
        continue;
      }
      auto tk = trace.trace_payload.find(it->first);
      if (tk != trace.trace_payload.end()) {
        if (!(tk->second == it->second)) throw TraceKeyConflict(trace.case_id, it->first);
        it = ev.payload.erase(it);
        continue;
      }
      if (trace_keys_.contains(it->first)) throw TraceKeyConflict(trace.case_id, it->first);
      ++it;
    }
  }

  std::erase_if(trace.trace_payload, [](const auto& kv) { return kv.second.is_bottom(); });
  for (const auto& [k, v] : trace.trace_payload) {
    if (event_keys_.contains(k))
      throw Error("key '" + k + "' is used both as a trace key and an event key");
    trace_keys_.insert(k);
  }

  bool any_ts = std::any_of(trace.events.begin(), trace.events.end(),
                            [](const Event& e) { return e.raw_timestamp.has_value(); });
  if (any_ts) {
    if (!std::all_of(trace.events.begin(), trace.events.end(),
                     [](const Event& e) { return e.raw_timestamp.has_value(); }))
      throw Error("trace '" + trace.case_id + "': timestamps must be given for all events or none");
    std::stable_sort(trace.events.begin(), trace.events.end(), [](const Event& a, const Event& b) {
      return *a.raw_timestamp < *b.raw_timestamp;
    });
  }

  const std::size_t n = trace.events.size();
  trace.norm_times.resize(n);
  for (std::size_t i = 0; i < n; ++i) trace.norm_times[i] = normalize_time(i + 1, n);

  for (const auto& ev : trace.events) {
    alphabet_.insert(ev.activity);
    for (const auto& [k, v] : ev.payload) event_keys_.insert(k);
  }
  case_ids_.insert(trace.case_id);
  traces_.push_back(std::move(trace));
}

const Trace* Log::find(std::string_view case_id) const {
  auto it = std::find_if(traces_.begin(), traces_.end(),
                         [&](const Trace& t) { return t.case_id == case_id; });
  return it == traces_.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------------------
// compact format

Log parse_compact(std::istream& in) {
  Log log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = strip_cr(line);
    if (blank(body)) continue;
    auto colon = body.find(':');
    if (colon == std::string_view::npos || colon == 0)
      throw ParseError(lineno, "expected 'case:labels'");
    Trace t;
    t.case_id = std::string(body.substr(0, colon));
    for (char c : body.substr(colon + 1)) {
      if (!std::isalpha(static_cast<unsigned char>(c)))
        throw ParseError(lineno, std::string("invalid activity character '") + c + "'");
      t.events.push_back(Event{std::string(1, c), {}, std::nullopt});
    }
    try {
      log.add_trace(std::move(t));
    } catch (const DuplicateCaseId&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return log;
}

// ---------------------------------------------------------------------------
// jsonl format

namespace {
using nlohmann::json;

Value to_value(const json& j, const ValueOrder& order, std::size_t lineno) {
  if (j.is_null()) return Value::bottom();
  if (j.is_string()) return order.classify(j.get<std::string>());
  if (j.is_number()) {
    double x = j.get<double>();
    if (!std::isfinite(x)) throw ParseError(lineno, "non-finite number");
    return Value::num(x);
  }
  throw ParseError(lineno, "payload values must be strings, numbers or null");
}

Payload to_payload(const json& j, const ValueOrder& order, std::size_t lineno) {
  Payload p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ParseError(lineno, "payload must be an object");
  for (const auto& [k, v] : j.items()) {
    Value val = to_value(v, order, lineno);
    if (!val.is_bottom()) p.emplace(k, std::move(val));
  }
  return p;
}

json from_value(const Value& v) {
  if (v.tag() == ValueTag::Num) return v.number();
  return v.text();
}

json from_payload(const Payload& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = from_value(v);
  return j;
}
}  // namespace

Log parse_jsonl(std::istream& in, const ValueOrder& order) {
  struct Pending {
    Trace trace;
    std::size_t line;
  };
  std::vector<Pending> pending;
  std::set<std::string> trace_keys;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = strip_cr(line);
    if (blank(body)) continue;
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
    Trace t;
    auto c = j.find("case");
    if (c == j.end()) throw ParseError(lineno, "missing \"case\"");
    if (c->is_string())
      t.case_id = c->get<std::string>();
    else if (c->is_number_integer())
      t.case_id = c->dump();
    else
      throw ParseError(lineno, "\"case\" must be a string or an integer");
    if (t.case_id.empty()) throw ParseError(lineno, "empty case id");

    if (auto tp = j.find("trace_payload"); tp != j.end()) t.trace_payload = to_payload(*tp, order, lineno);
    for (const auto& [k, v] : t.trace_payload) trace_keys.insert(k);

    if (auto evs = j.find("events"); evs != j.end()) {
      if (!evs->is_array()) throw ParseError(lineno, "\"events\" must be an array");
      for (const auto& e : *evs) {
        if (!e.is_object()) throw ParseError(lineno, "events must be objects");
        auto act = e.find("act");
        if (act == e.end() || !act->is_string() || act->get<std::string>().empty())
          throw ParseError(lineno, "event without a non-empty \"act\"");
        Event ev{act->get<std::string>(), {}, std::nullopt};
        if (auto p = e.find("payload"); p != e.end()) ev.payload = to_payload(*p, order, lineno);
        if (auto ts = e.find("ts"); ts != e.end() && !ts->is_null()) {
          if (!ts->is_number()) throw ParseError(lineno, "\"ts\" must be numeric");
          ev.raw_timestamp = ts->get<double>();
        }
        t.events.push_back(std::move(ev));
      }
    }
    pending.push_back({std::move(t), lineno});
  }

  Log log;
  for (auto& [t, ln] : pending) {
    // A trace key repeated at event level must agree across all events of the trace.
    for (const auto& k : trace_keys) {
      if (t.trace_payload.contains(k)) continue;
      bool seen = std::any_of(t.events.begin(), t.events.end(),
                              [&](const Event& e) { return e.payload.contains(k); });
      if (!seen) continue;
      const Value& first = lookup(t.events.front().payload, k);
      for (const auto& e : t.events)
        if (!(lookup(e.payload, k) == first)) throw TraceKeyConflict(t.case_id, k);
      t.trace_payload.emplace(k, first);
    }
    try {
      log.add_trace(std::move(t));
    } catch (const DuplicateCaseId&) {
      throw;
    } catch (const TraceKeyConflict&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
  }
  return log;
}

LogFormat detect_log_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return LogFormat::Jsonl;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c))
    if (!std::isspace(static_cast<unsigned char>(c))) break;
  return c == '{' ? LogFormat::Jsonl : LogFormat::Compact;
}

Log parse_log(const std::filesystem::path& path, LogFormat format, const ValueOrder& order) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log file '" + path.string() + "'");
  return format == LogFormat::Jsonl ? parse_jsonl(in, order) : parse_compact(in);
}

void write_jsonl(const Log& log, std::ostream& out) {
  for (const auto& t : log.traces()) {
    json j;
    j["case"] = t.case_id;
    j["trace_payload"] = from_payload(t.trace_payload);
    json evs = json::array();
    for (const auto& e : t.events) {
      json je;
      je["act"] = e.activity;
      je["payload"] = from_payload(e.payload);
      if (e.raw_timestamp) je["ts"] = *e.raw_timestamp;
      evs.push_back(std::move(je));
    }
    j["events"] = std::move(evs);
    out << j.dump() << '\n';
  }
}

}  // namespace dkb
