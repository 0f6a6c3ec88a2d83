#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dkb/log.hpp"
#include "dkb/poset.hpp"
#include "dkb/value.hpp"

namespace dkb {

/// 1-based index of a trace in log order.
enum class TraceId : std::uint32_t {};
constexpr std::uint32_t index(TraceId id) noexcept { return static_cast<std::uint32_t>(id); }

using LabelId = std::uint32_t;

/// 1-based row offset into the Act table.
using RowOffset = std::uint32_t;
inline constexpr RowOffset kMinusInf = 0;
inline constexpr RowOffset kPlusInf = std::numeric_limits<RowOffset>::max();

/// Half-open range [begin, end) of Act offsets.
struct RowRange {
  RowOffset begin = 1;
  RowOffset end = 1;
  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
};

struct ActRow {
  LabelId act;
  TraceId sigma;
  std::uint32_t position;  // 1-based
  double time;
  RowOffset next;  // kPlusInf after the last event
  RowOffset prev;  // kMinusInf before the first event
};

struct CountRow {
  LabelId act;
  TraceId sigma;
  std::uint32_t count;
};

struct AttrRow {
  LabelId act;
  Value value;
  RowOffset act_offset;
};

struct EventRef {
  TraceId sigma;
  std::uint32_t position;
  double time;
  std::string label;
};

struct CountPredicate {
  enum class Kind { NonZero, Zero, AtLeast, Exactly };
  Kind kind;
  std::uint32_t n = 0;

  static CountPredicate non_zero() { return {Kind::NonZero}; }
  static CountPredicate zero() { return {Kind::Zero}; }
  static CountPredicate at_least(std::uint32_t n) { return {Kind::AtLeast, n}; }
  static CountPredicate exactly(std::uint32_t n) { return {Kind::Exactly, n}; }

  bool operator()(std::uint32_t count) const noexcept;
};

/// One attribute column: every event's value under a single event key,
/// missing values stored as bottom. Sorted by (act, value storage order).
class AttrTable {
public:
  std::size_t size() const noexcept { return act_.size(); }
  AttrRow row(std::size_t i) const { return {act_[i], value_[i], offset_[i]}; }
  const Value& value_at(RowOffset off) const { return value_[by_offset_[off - 1]]; }

private:
  friend class KnowledgeBase;
  std::vector<LabelId> act_;
  std::vector<Value> value_;
  std::vector<RowOffset> offset_;
  std::vector<std::uint32_t> by_offset_;  // Act offset - 1 -> row
};

/// In-memory column store over a log: the Act table (one row per event with
/// temporal successor/predecessor offsets), the dense CountTemplate table
/// (label x trace), and one AttributeK table per event key. Immutable after
/// build; all queries are read-only.
class KnowledgeBase {
public:
  KnowledgeBase() = default;

  /// Counts are accumulated during the ingestion pass. The labels of
  /// `log.alphabet()` define the label ids (sorted lexicographically).
  static KnowledgeBase build(const Log& log, ValuePoset poset);
  static KnowledgeBase build(const Log& log) { return build(log, build_poset(log)); }

  // --- dimensions
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<LabelId> label_id(std::string_view label) const;
  std::size_t trace_count() const noexcept { return case_ids_.size(); }
  const std::string& case_id(TraceId id) const { return case_ids_.at(index(id) - 1); }
  std::optional<TraceId> trace_id(std::string_view case_id) const;
  std::size_t trace_length(TraceId id) const;
  /// Act offsets of the trace's events in time order.
  std::span<const RowOffset> trace_rows(TraceId id) const;
  const Payload& trace_payload(TraceId id) const { return trace_payloads_.at(index(id) - 1); }
  const ValuePoset& poset() const noexcept { return poset_; }

  // --- Act
  std::size_t act_size() const noexcept { return act_.size(); }
  /// Throws BadOffset.
  ActRow act_row(RowOffset off) const;
  LabelId act_label(RowOffset off) const { return act_[off - 1]; }
  double act_time(RowOffset off) const { return time_[off - 1]; }
  TraceId act_trace(RowOffset off) const { return sigma_[off - 1]; }
  /// Contiguous rows carrying `label`; empty when the label is unknown.
  RowRange select_act(std::string_view label) const;
  RowRange select_act(LabelId label) const;
  /// Throws BadOffset.
  EventRef resolve_event(RowOffset off) const;

  // --- CountTemplate
  std::size_t count_size() const noexcept { return count_.size(); }
  CountRow count_row(std::size_t i) const;
  std::uint32_t count(LabelId label, TraceId id) const;
  std::vector<std::pair<TraceId, std::uint32_t>> select_count(std::string_view label,
                                                              CountPredicate pred) const;

  // --- AttributeK
  const std::map<std::string, AttrTable, std::less<>>& attributes() const noexcept { return attrs_; }
  bool is_event_key(std::string_view key) const { return attrs_.find(key) != attrs_.end(); }
  bool is_trace_key(std::string_view key) const;
  /// Value of `key` at the event; bottom for keys without a table.
  const Value& attr_value(std::string_view key, RowOffset off) const;
  /// Offsets of `label` events whose `key` value v satisfies `v op k`, ascending.
  /// Throws UnknownKey when `key` has no attribute table.
  std::vector<RowOffset> attr_range(std::string_view key, std::string_view label, CmpOp op,
                                    const Value& k) const;

  /// Re-checks sortedness, next/prev closure and count consistency; throws
  /// std::logic_error on violation. Called at the end of build.
  void verify() const;

private:
  std::vector<std::string> labels_;
  std::vector<std::string> case_ids_;
  std::unordered_map<std::string, TraceId> trace_ids_;
  std::vector<Payload> trace_payloads_;
  std::vector<std::string> trace_keys_;
  ValuePoset poset_;

  // Act columns (row i holds offset i + 1)
  std::vector<LabelId> act_;
  std::vector<TraceId> sigma_;
  std::vector<std::uint32_t> position_;
  std::vector<double> time_;
  std::vector<RowOffset> next_;
  std::vector<RowOffset> prev_;
  std::vector<RowOffset> label_begin_;  // label l occupies [label_begin_[l], label_begin_[l+1])

  // per-trace event offsets in time order (CSR)
  std::vector<std::size_t> trace_begin_;
  std::vector<RowOffset> trace_rows_;

  // CountTemplate, dense: row = label * trace_count + (trace - 1)
  std::vector<std::uint32_t> count_;

  std::map<std::string, AttrTable, std::less<>> attrs_;
};

/// Sentinel-aware rendering of an Act offset ("+inf", "-inf" or the number).
std::string format_offset(RowOffset off);

}  // namespace dkb
