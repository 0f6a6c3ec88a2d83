#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dkb/value.hpp"

namespace dkb {

/// Key -> value map. Absent keys read as bottom.
using Payload = std::map<std::string, Value, std::less<>>;

const Value& lookup(const Payload& payload, std::string_view key);

struct Event {
  std::string activity;
  Payload payload;
  std::optional<double> raw_timestamp;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::string case_id;
  Payload trace_payload;
  std::vector<Event> events;
  std::vector<double> norm_times;

  std::size_t size() const noexcept { return events.size(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Time of the event at 1-based `position` in a trace of `length` events,
/// spread evenly over [0, 1]. A single event sits at 1.0.
/// Throws std::out_of_range unless 1 <= position <= length.
double normalize_time(std::size_t position, std::size_t length);

class Log {
public:
  Log() = default;

  /// Validates and appends a trace: assigns normalized times, checks the
  /// case id is fresh and that trace keys are consistent across events.
  void add_trace(Trace trace);

  /// Extends the alphabet with labels that do not occur in any trace.
  template <typename Range>
  void declare_labels(const Range& labels) {
    for (const auto& l : labels) alphabet_.insert(std::string(l));
  }

  const std::vector<Trace>& traces() const noexcept { return traces_; }
  std::size_t size() const noexcept { return traces_.size(); }
  const std::set<std::string>& alphabet() const noexcept { return alphabet_; }
  const std::set<std::string>& trace_keys() const noexcept { return trace_keys_; }
  const std::set<std::string>& event_keys() const noexcept { return event_keys_; }

  const Trace* find(std::string_view case_id) const;

  friend bool operator==(const Log&, const Log&) = default;

private:
  std::vector<Trace> traces_;
  std::set<std::string> case_ids_;
  std::set<std::string> alphabet_;
  std::set<std::string> trace_keys_;
  std::set<std::string> event_keys_;
};

enum class LogFormat { Jsonl, Compact };

/// `case:labels`, one trace per line, every character one activity.
Log parse_compact(std::istream& in);
/// One JSON object per line:
/// {"case": id, "trace_payload": {...}, "events": [{"act": a, "payload": {...}, "ts": t}]}
/// Strings naming a node of `order`'s hierarchy become hierarchy values.
Log parse_jsonl(std::istream& in, const ValueOrder& order = {});

Log parse_log(const std::filesystem::path& path, LogFormat format, const ValueOrder& order = {});
/// Picks the format from the extension (.jsonl/.json) or the first character.
LogFormat detect_log_format(const std::filesystem::path& path);

void write_jsonl(const Log& log, std::ostream& out);

}  // namespace dkb
