#include "dkb/kb.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dkb/errors.hpp"

namespace dkb {

namespace {
const Value kBottom{};
}

bool CountPredicate::operator()(std::uint32_t count) const noexcept {
  switch (kind) {
    case Kind::NonZero: return count != 0;
    case Kind::Zero: return count == 0;
    case Kind::AtLeast: return count >= n;
    case Kind::Exactly: return count == n;
  }
  return false;
}

std::string format_offset(RowOffset off) {
  if (off == kPlusInf) return "+inf";
  if (off == kMinusInf) return "-inf";
  return std::to_string(off);
}

KnowledgeBase KnowledgeBase::build(const Log& log, ValuePoset poset) {
  KnowledgeBase kb;
  kb.poset_ = std::move(poset);
  kb.labels_.assign(log.alphabet().begin(), log.alphabet().end());
  kb.trace_keys_.assign(log.trace_keys().begin(), log.trace_keys().end());

  const std::size_t n_labels = kb.labels_.size();
  const std::size_t n_traces = log.size();
  std::unordered_map<std::string_view, LabelId> label_ids;
  for (LabelId l = 0; l < n_labels; ++l) label_ids.emplace(kb.labels_[l], l);

  // Single ingestion pass: label of every event, counts accumulated on the fly.
  struct Raw {
    LabelId label;
    std::uint32_t trace;  // 0-based
    std::uint32_t position;
  };
  std::vector<Raw> raw;
  kb.count_.assign(n_labels * n_traces, 0);
  kb.trace_begin_.reserve(n_traces + 1);
  kb.trace_begin_.push_back(0);
  for (std::uint32_t t = 0; t < n_traces; ++t) {
    const Trace& tr = log.traces()[t];
    kb.case_ids_.push_back(tr.case_id);
    kb.trace_ids_.emplace(tr.case_id, TraceId{t + 1});
    kb.trace_payloads_.push_back(tr.trace_payload);
    for (std::uint32_t p = 0; p < tr.events.size(); ++p) {
      LabelId l = label_ids.at(tr.events[p].activity);
      raw.push_back({l, t, p + 1});
      ++kb.count_[l * n_traces + t];
    }
    kb.trace_begin_.push_back(raw.size());
  }

  // Bucket by label. Within a bucket, traversal order already gives (sigma, time).
  kb.label_begin_.assign(n_labels + 1, 1);
  {
    std::vector<std::size_t> per_label(n_labels, 0);
    for (const Raw& r : raw) ++per_label[r.label];
    RowOffset next_free = 1;
    for (LabelId l = 0; l < n_labels; ++l) {
      kb.label_begin_[l] = next_free;
      next_free += static_cast<RowOffset>(per_label[l]);
    }
    kb.label_begin_[n_labels] = next_free;
  }
  const std::size_t n = raw.size();
  kb.act_.resize(n);
  kb.sigma_.resize(n);
  kb.position_.resize(n);
  kb.time_.resize(n);
  kb.next_.resize(n);
  kb.prev_.resize(n);
  kb.trace_rows_.resize(n);
  {
    std::vector<RowOffset> cursor(kb.label_begin_.begin(), kb.label_begin_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const Raw& r = raw[i];
      RowOffset off = cursor[r.label]++;
      kb.act_[off - 1] = r.label;
      kb.sigma_[off - 1] = TraceId{r.trace + 1};
      kb.position_[off - 1] = r.position;
      kb.time_[off - 1] = log.traces()[r.trace].norm_times[r.position - 1];
      kb.trace_rows_[i] = off;
    }
  }
  for (std::size_t t = 0; t < n_traces; ++t) {
    const std::size_t b = kb.trace_begin_[t], e = kb.trace_begin_[t + 1];
    for (std::size_t i = b; i < e; ++i) {
      RowOffset off = kb.trace_rows_[i];
      kb.prev_[off - 1] = i == b ? kMinusInf : kb.trace_rows_[i - 1];
      kb.next_[off - 1] = i + 1 == e ? kPlusInf : kb.trace_rows_[i + 1];
    }
  }

  // AttributeK tables, one per event key, dense over events.
  const ValueOrder& order = kb.poset_.order();
  for (const std::string& key : log.event_keys()) {
    AttrTable table;
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<const Value*> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Raw& r = raw[i];
      vals[kb.trace_rows_[i] - 1] = &lookup(log.traces()[r.trace].events[r.position - 1].payload, key);
    }
    std::stable_sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (kb.act_[a] != kb.act_[b]) return kb.act_[a] < kb.act_[b];
      return order.storage_less(*vals[a], *vals[b]);
    });
    table.act_.reserve(n);
    table.value_.reserve(n);
    table.offset_.reserve(n);
    table.by_offset_.resize(n);
    for (std::size_t row = 0; row < n; ++row) {
      std::uint32_t i = perm[row];
      table.act_.push_back(kb.act_[i]);
      table.value_.push_back(*vals[i]);
      table.offset_.push_back(i + 1);
      table.by_offset_[i] = static_cast<std::uint32_t>(row);
    }
    kb.attrs_.emplace(key, std::move(table));
  }

  kb.verify();
  return kb;
}

std::optional<LabelId> KnowledgeBase::label_id(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<LabelId>(it - labels_.begin());
}

std::optional<TraceId> KnowledgeBase::trace_id(std::string_view case_id) const {
  auto it = trace_ids_.find(std::string(case_id));
  if (it == trace_ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t KnowledgeBase::trace_length(TraceId id) const {
  const std::size_t t = index(id) - 1;
  return trace_begin_.at(t + 1) - trace_begin_.at(t);
}

std::span<const RowOffset> KnowledgeBase::trace_rows(TraceId id) const {
  const std::size_t t = index(id) - 1;
  return std::span<const RowOffset>(trace_rows_).subspan(trace_begin_.at(t),
                                                          trace_begin_.at(t + 1) - trace_begin_[t]);
}

ActRow KnowledgeBase::act_row(RowOffset off) const {
  if (off < 1 || off > act_.size()) throw BadOffset(off);
  const std::size_t i = off - 1;
  return {act_[i], sigma_[i], position_[i], time_[i], next_[i], prev_[i]};
}

RowRange KnowledgeBase::select_act(LabelId label) const {
  if (label >= labels_.size()) return {};
  return {label_begin_[label], label_begin_[label + 1]};
}

RowRange KnowledgeBase::select_act(std::string_view label) const {
  auto id = label_id(label);
  return id ? select_act(*id) : RowRange{};
}

EventRef KnowledgeBase::resolve_event(RowOffset off) const {
  ActRow r = act_row(off);
  return {r.sigma, r.position, r.time, labels_[r.act]};
}

CountRow KnowledgeBase::count_row(std::size_t i) const {
  const std::size_t n_traces = trace_count();
  return {static_cast<LabelId>(i / n_traces), TraceId{static_cast<std::uint32_t>(i % n_traces + 1)},
          count_.at(i)};
}

std::uint32_t KnowledgeBase::count(LabelId label, TraceId id) const {
  return count_.at(label * trace_count() + index(id) - 1);
}

std::vector<std::pair<TraceId, std::uint32_t>> KnowledgeBase::select_count(std::string_view label,
                                                                           CountPredicate pred) const {
  std::vector<std::pair<TraceId, std::uint32_t>> out;
  auto id = label_id(label);
  if (!id) return out;
  const std::size_t n_traces = trace_count();
  const std::size_t b = *id * n_traces;
  for (std::size_t i = b; i < b + n_traces; ++i)
    if (pred(count_[i])) out.emplace_back(TraceId{static_cast<std::uint32_t>(i - b + 1)}, count_[i]);
  return out;
}

bool KnowledgeBase::is_trace_key(std::string_view key) const {
  return std::binary_search(trace_keys_.begin(), trace_keys_.end(), key);
}

const Value& KnowledgeBase::attr_value(std::string_view key, RowOffset off) const {
  auto it = attrs_.find(key);
  if (it == attrs_.end()) return kBottom;
  if (off < 1 || off > act_.size()) throw BadOffset(off);
  return it->second.value_at(off);
}

std::vector<RowOffset> KnowledgeBase::attr_range(std::string_view key, std::string_view label,
                                                 CmpOp op, const Value& k) const {
  auto it = attrs_.find(key);
  if (it == attrs_.end()) throw UnknownKey(std::string(key));
  const AttrTable& table = it->second;
  std::vector<RowOffset> out;
  auto lid = label_id(label);
  if (!lid) return out;
  const ValueOrder& order = poset_.order();
  order.leq(k, k);  // validates hierarchy constants

  auto label_lo = std::lower_bound(table.act_.begin(), table.act_.end(), *lid);
  auto label_hi = std::upper_bound(label_lo, table.act_.end(), *lid);
  std::size_t pos = label_lo - table.act_.begin();
  const std::size_t stop = label_hi - table.act_.begin();

  auto take = [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out.push_back(table.offset_[i]);
  };
  auto less = [&](const Value& a, const Value& b) { return order.storage_less(a, b); };

  // Scan block by block; values of one tag are contiguous.
  while (pos < stop) {
    const ValueTag tag = table.value_[pos].tag();
    std::size_t end = pos;
    while (end < stop && table.value_[end].tag() == tag) ++end;

    const bool uniform = tag != k.tag() || tag == ValueTag::Bottom || tag == ValueTag::Top;
    if (uniform) {
      if (order.holds(table.value_[pos], op, k)) take(pos, end);
    } else if (tag == ValueTag::Hier) {
      for (std::size_t i = pos; i < end; ++i)
        if (order.holds(table.value_[i], op, k)) out.push_back(table.offset_[i]);
    } else {
      auto first = table.value_.begin() + pos;
      auto last = table.value_.begin() + end;
      const std::size_t lo = std::lower_bound(first, last, k, less) - table.value_.begin();
      const std::size_t hi = std::upper_bound(first, last, k, less) - table.value_.begin();
      switch (op) {
        case CmpOp::Leq: take(pos, hi); break;
        case CmpOp::Lt: take(pos, lo); break;
        case CmpOp::Geq: take(lo, end); break;
        case CmpOp::Gt: take(hi, end); break;
        case CmpOp::Eq: take(lo, hi); break;
        case CmpOp::Neq: take(pos, lo), take(hi, end); break;
      }
    }
    pos = end;
  }
  std::sort(out.begin(), out.end());
  return out;
}

void KnowledgeBase::verify() const {
  const std::size_t n = act_.size();
  auto fail = [](const std::string& what) { throw std::logic_error("knowledge base: " + what); };
  for (std::size_t i = 1; i < n; ++i) {
    auto a = std::tie(act_[i - 1], sigma_[i - 1], position_[i - 1]);
    auto b = std::tie(act_[i], sigma_[i], position_[i]);
    if (!(a < b)) fail("Act not sorted at row " + std::to_string(i + 1));
  }
  std::size_t visited = 0;
  for (std::size_t t = 0; t < trace_count(); ++t) {
    const TraceId id{static_cast<std::uint32_t>(t + 1)};
    auto rows = trace_rows(id);
    RowOffset cur = rows.empty() ? kPlusInf : rows.front();
    if (!rows.empty() && prev_[cur - 1] != kMinusInf) fail("first event has a predecessor");
    RowOffset last = kMinusInf;
    std::size_t steps = 0;
    while (cur != kPlusInf) {
      if (cur < 1 || cur > n || sigma_[cur - 1] != id || prev_[cur - 1] != last)
        fail("broken next/prev chain in trace " + case_ids_[t]);
      if (++steps > rows.size()) fail("next chain does not terminate");
      last = cur;
      cur = next_[cur - 1];
    }
    if (steps != rows.size()) fail("next chain misses events");
    visited += steps;
    std::size_t total = 0;
    for (LabelId l = 0; l < labels_.size(); ++l) total += count(l, id);
    if (total != rows.size()) fail("counts do not sum to the trace length");
  }
  if (visited != n) fail("Act rows not covered by traces");
  const ValueOrder& order = poset_.order();
  for (const auto& [key, table] : attrs_) {
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (table.act_[i - 1] > table.act_[i] ||
          (table.act_[i - 1] == table.act_[i] && order.storage_less(table.value_[i], table.value_[i - 1])))
        fail("AttributeK table '" + key + "' not sorted");
    }
  }
}

}  // namespace dkb
