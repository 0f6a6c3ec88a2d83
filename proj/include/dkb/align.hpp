#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dkb/declare.hpp"
#include "dkb/kb.hpp"

namespace dkb {

/// Finite map trace -> weight in [0, 1].
class WeightedSet {
public:
  using Map = std::map<TraceId, double>;

  WeightedSet() = default;
  WeightedSet(std::initializer_list<std::pair<const TraceId, double>> entries);

  /// Throws std::invalid_argument for weights outside [0, 1] or a repeated trace.
  void insert(TraceId id, double weight);

  std::optional<double> find(TraceId id) const;
  double weight_or_zero(TraceId id) const { return find(id).value_or(0.0); }
  bool contains(TraceId id) const { return entries_.contains(id); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  Map::const_iterator begin() const noexcept { return entries_.begin(); }
  Map::const_iterator end() const noexcept { return entries_.end(); }

  friend bool operator==(const WeightedSet&, const WeightedSet&) = default;

private:
  Map entries_;
};

/// A ⊕ B. Throws DisjointnessViolation when both carry the same trace.
WeightedSet w_union(const WeightedSet& a, const WeightedSet& b);
/// Traces in both, weights multiplied.
WeightedSet w_product_intersect(const WeightedSet& a, const WeightedSet& b);
/// Traces in any operand; weight = sum of its weights (absent = 0) / n.
/// Throws std::invalid_argument on an empty list.
WeightedSet w_avg_intersect(std::span<const WeightedSet> sets);

/// Traces whose count of `label` is non-zero, each at `weight`.
WeightedSet exists_set(const KnowledgeBase& kb, std::string_view label, double weight);
/// Traces where `label` never occurs, each at `weight`. A label unknown to
/// the knowledge base occurs nowhere.
WeightedSet notexists_set(const KnowledgeBase& kb, std::string_view label, double weight);

// Alignment scores, one entry per candidate trace. `pred` restricts the
// activation events that are considered.

/// max(1 - time) over the trace's matching events; a trace consisting of a
/// single matching event scores 1. Traces without one are absent.
WeightedSet align_init(const KnowledgeBase& kb, std::string_view label, const DataPredicate& pred = {});
/// max(time) over the trace's matching events. Traces without one are absent.
WeightedSet align_end(const KnowledgeBase& kb, std::string_view label, const DataPredicate& pred = {});
/// max(0, 1 - |n - count| / len) for every trace; empty traces score 1 iff n = 0.
WeightedSet align_exactly(const KnowledgeBase& kb, std::string_view label, std::uint32_t n,
                          const DataPredicate& pred = {});
/// 1 when count >= n, otherwise the exactly-style penalty.
WeightedSet align_existence(const KnowledgeBase& kb, std::string_view label, std::uint32_t n,
                            const DataPredicate& pred = {});
/// notexists¹(A) ⊕ ifte(A∧P, exists¹(B) ⊕ notexists^c(B), 1): vacuous traces
/// and traces where A never satisfies P score 1; otherwise 1 if B occurs, c if not.
WeightedSet align_resp_existence(const KnowledgeBase& kb, std::string_view activation,
                                 std::string_view target, const DataPredicate& pred, double c);

/// Dispatches on the template; Absence/Response/Precedence score 1 or 0 by
/// evaluating their LTLf translation.
WeightedSet align_constraint(const KnowledgeBase& kb, const DeclareConstraint& constraint, double c);

struct AlignmentReport {
  std::vector<WeightedSet> per_constraint;
  /// Indexed by trace id - 1; covers every trace of the knowledge base.
  std::vector<double> per_trace;
  std::vector<std::uint32_t> sat_count;
  std::size_t total = 0;  // number of constraints

  double aggregate(TraceId id) const { return per_trace.at(index(id) - 1); }
};

/// Averages the per-constraint sets (absent traces count 0). A trace
/// aggregates to exactly 1 iff every constraint scores exactly 1 on it.
/// Constraints are scored in parallel on `threads` workers; the result does
/// not depend on the thread count. Throws std::invalid_argument for an empty model.
AlignmentReport align_model(const KnowledgeBase& kb, const DeclareModel& model, double c,
                            unsigned threads = 1);

}  // namespace dkb
