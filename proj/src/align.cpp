#include "dkb/align.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dkb/errors.hpp"
#include "dkb/ground.hpp"
#include "dkb/parallel.hpp"

namespace dkb {

WeightedSet::WeightedSet(std::initializer_list<std::pair<const TraceId, double>> entries) {
  for (const auto& [id, w] : entries) insert(id, w);
}

void WeightedSet::insert(TraceId id, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::invalid_argument("weight " + std::to_string(weight) + " outside [0, 1]");
  if (!entries_.emplace(id, weight).second)
    throw std::invalid_argument("trace " + std::to_string(index(id)) + " already present");
}

std::optional<double> WeightedSet::find(TraceId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

WeightedSet w_union(const WeightedSet& a, const WeightedSet& b) {
  WeightedSet out = a;
  for (const auto& [id, w] : b) {
    if (a.contains(id)) throw DisjointnessViolation(index(id));
    out.insert(id, w);
  }
  return out;
}

WeightedSet w_product_intersect(const WeightedSet& a, const WeightedSet& b) {
  WeightedSet out;
  for (const auto& [id, p] : a)
    if (auto q = b.find(id)) out.insert(id, p * *q);
  return out;
}

WeightedSet w_avg_intersect(std::span<const WeightedSet> sets) {
  if (sets.empty()) throw std::invalid_argument("n-ary intersection of zero sets");
  struct Acc {
    double sum = 0, lo = 1, hi = 0;
    std::size_t seen = 0;
  };
  std::map<TraceId, Acc> acc;
  for (const auto& s : sets)
    for (const auto& [id, w] : s) {
      Acc& a = acc[id];
      a.sum += w;
      a.lo = std::min(a.lo, w);
      a.hi = std::max(a.hi, w);
      ++a.seen;
    }
  WeightedSet out;
  const double n = static_cast<double>(sets.size());
  for (const auto& [id, a] : acc) {
    // equal weights average to themselves; sum / n could be off by an ulp
    if (a.seen == sets.size() && a.lo == a.hi)
      out.insert(id, a.lo);
    else
      out.insert(id, std::min(a.sum / n, 1.0));
  }
  return out;
}

WeightedSet exists_set(const KnowledgeBase& kb, std::string_view label, double weight) {
  WeightedSet out;
  for (const auto& [id, count] : kb.select_count(label, CountPredicate::non_zero())) out.insert(id, weight);
  return out;
}

WeightedSet notexists_set(const KnowledgeBase& kb, std::string_view label, double weight) {
  WeightedSet out;
  if (!kb.label_id(label)) {
    for (std::uint32_t t = 1; t <= kb.trace_count(); ++t) out.insert(TraceId{t}, weight);
    return out;
  }
  for (const auto& [id, count] : kb.select_count(label, CountPredicate::zero())) out.insert(id, weight);
  return out;
}

namespace {

/// Act rows of `label` whose event satisfies `pred`.
std::vector<RowOffset> matching_rows(const KnowledgeBase& kb, std::string_view label,
                                     const DataPredicate& pred) {
  std::vector<RowOffset> rows;
  RowRange range = kb.select_act(label);
  if (pred.trivial()) {
    for (RowOffset off = range.begin; off < range.end; ++off) rows.push_back(off);
    return rows;
  }
  FormulaEvaluator probe(Formula::atom(std::string(label), pred), kb);
  for (RowOffset off = range.begin; off < range.end; ++off) {
    ActRow r = kb.act_row(off);
    if (probe.atom_holds(0, r.sigma, r.position)) rows.push_back(off);
  }
  return rows;
}

/// Per-trace count of matching events (index = trace id - 1).
std::vector<std::uint32_t> counts_of(const KnowledgeBase& kb, std::string_view label,
                                     const DataPredicate& pred) {
  std::vector<std::uint32_t> counts(kb.trace_count(), 0);
  if (pred.trivial()) {
    if (auto id = kb.label_id(label))
      for (std::uint32_t t = 1; t <= kb.trace_count(); ++t) counts[t - 1] = kb.count(*id, TraceId{t});
    return counts;
  }
  for (RowOffset off : matching_rows(kb, label, pred)) ++counts[index(kb.act_trace(off)) - 1];
  return counts;
}

double count_penalty(std::uint32_t n, std::uint32_t count, std::size_t len) {
  if (count == n) return 1.0;
  if (len == 0) return 0.0;
  double w = 1.0 - std::abs(static_cast<double>(n) - static_cast<double>(count)) / static_cast<double>(len);
  return std::clamp(w, 0.0, 1.0);
}

}  // namespace

WeightedSet align_init(const KnowledgeBase& kb, std::string_view label, const DataPredicate& pred) {
  std::map<TraceId, double> best;
  for (RowOffset off : matching_rows(kb, label, pred)) {
    const TraceId id = kb.act_trace(off);
    double w = kb.trace_length(id) == 1 ? 1.0 : 1.0 - kb.act_time(off);
    auto [it, inserted] = best.emplace(id, w);
    if (!inserted) it->second = std::max(it->second, w);
  }
  WeightedSet out;
  for (const auto& [id, w] : best) out.insert(id, w);
  return out;
}

WeightedSet align_end(const KnowledgeBase& kb, std::string_view label, const DataPredicate& pred) {
  std::map<TraceId, double> best;
  for (RowOffset off : matching_rows(kb, label, pred)) {
    auto [it, inserted] = best.emplace(kb.act_trace(off), kb.act_time(off));
    if (!inserted) it->second = std::max(it->second, kb.act_time(off));
  }
  WeightedSet out;
  for (const auto& [id, w] : best) out.insert(id, w);
  return out;
}

WeightedSet align_exactly(const KnowledgeBase& kb, std::string_view label, std::uint32_t n,
                          const DataPredicate& pred) {
  auto counts = counts_of(kb, label, pred);
  WeightedSet out;
  for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
    out.insert(TraceId{t}, count_penalty(n, counts[t - 1], kb.trace_length(TraceId{t})));
  return out;
}

WeightedSet align_existence(const KnowledgeBase& kb, std::string_view label, std::uint32_t n,
                            const DataPredicate& pred) {
  auto counts = counts_of(kb, label, pred);
  WeightedSet out;
  for (std::uint32_t t = 1; t <= kb.trace_count(); ++t) {
    const std::uint32_t count = counts[t - 1];
    out.insert(TraceId{t}, count >= n ? 1.0 : count_penalty(n, count, kb.trace_length(TraceId{t})));
  }
  return out;
}

WeightedSet align_resp_existence(const KnowledgeBase& kb, std::string_view activation,
                                 std::string_view target, const DataPredicate& pred, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("c must lie in [0, 1]");
  const WeightedSet target_branch = w_union(exists_set(kb, target, 1.0), notexists_set(kb, target, c));

  std::vector<bool> activated(kb.trace_count(), false);
  for (RowOffset off : matching_rows(kb, activation, pred)) activated[index(kb.act_trace(off)) - 1] = true;

  // ifte over the traces where the activation occurs: A∧P somewhere -> target
  // branch, otherwise ⊤¹.
  WeightedSet present;
  for (const auto& [id, w] : exists_set(kb, activation, 1.0))
    present.insert(id, activated[index(id) - 1] ? target_branch.weight_or_zero(id) : 1.0);
  return w_union(notexists_set(kb, activation, 1.0), present);
}

WeightedSet align_constraint(const KnowledgeBase& kb, const DeclareConstraint& constraint, double c) {
  constraint.validate();
  const auto& a = constraint.activation;
  const auto& p = constraint.predicate;
  switch (constraint.kind) {
    case Template::Init: return align_init(kb, a, p);
    case Template::End: return align_end(kb, a, p);
    case Template::Existence: return align_existence(kb, a, constraint.n, p);
    case Template::Exactly: return align_exactly(kb, a, constraint.n, p);
    case Template::RespExistence: return align_resp_existence(kb, a, *constraint.target, p, c);
    case Template::Absence:
    case Template::Response:
    case Template::Precedence: {
      FormulaEvaluator ev(to_ltlf(constraint), kb);
      WeightedSet out;
      for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
        out.insert(TraceId{t}, ev.holds(TraceId{t}) ? 1.0 : 0.0);
      return out;
    }
  }
  throw UnsupportedTemplate(std::string(template_name(constraint.kind)));
}

AlignmentReport align_model(const KnowledgeBase& kb, const DeclareModel& model, double c,
                            unsigned threads) {
  if (model.empty()) throw std::invalid_argument("cannot align against an empty model");
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("c must lie in [0, 1]");
  AlignmentReport report;
  report.total = model.size();
  report.per_constraint.resize(model.size());
  parallel_for(model.size(), threads, [&](std::size_t i) {
    report.per_constraint[i] = align_constraint(kb, model.constraints[i], c);
  });

  const WeightedSet avg = w_avg_intersect(report.per_constraint);
  const std::size_t n_traces = kb.trace_count();
  report.per_trace.assign(n_traces, 0.0);
  report.sat_count.assign(n_traces, 0);
  for (const auto& set : report.per_constraint)
    for (const auto& [id, w] : set)
      if (w == 1.0) ++report.sat_count[index(id) - 1];
  for (std::uint32_t t = 1; t <= n_traces; ++t) {
    double w = avg.weight_or_zero(TraceId{t});
    // Rounding in the average must not turn a near-miss into a perfect alignment.
    if (report.sat_count[t - 1] == report.total)
      w = 1.0;
    else
      w = std::min(w, std::nextafter(1.0, 0.0));
    report.per_trace[t - 1] = w;
  }
  return report;
}

}  // namespace dkb
