#include "dkb/ground.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dkb/errors.hpp"

namespace dkb {

using GKind = GroundedFormula::Kind;

namespace {
constexpr std::uint32_t kTrue = 0;
constexpr std::uint32_t kFalse = 1;
constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
}  // namespace

std::span<const std::uint32_t> GroundedFormula::children(std::uint32_t id) const {
  const Node& n = node(id);
  return std::span<const std::uint32_t>(children_).subspan(n.first_child, n.child_count);
}

std::size_t GroundedFormula::size() const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::uint32_t> stack{root_};
  std::size_t count = 0;
  while (!stack.empty()) {
    std::uint32_t id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = true;
    ++count;
    for (std::uint32_t c : children(id)) stack.push_back(c);
  }
  return count;
}

// ---------------------------------------------------------------------------
// CompiledFormula

CompiledFormula::CompiledFormula(const Formula& phi) : phi_(lower_sugar(to_nnf(phi))) {
  root_ = flatten(phi_);
}

std::uint32_t CompiledFormula::flatten(const Formula& f) {
  Op op{f.kind()};
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom:
      op.atom = static_cast<std::uint32_t>(atoms_.size());
      atoms_.push_back({f.label(), f.predicate()});
      break;
    case FormulaKind::Next:
    case FormulaKind::WeakNext: op.a = flatten(f.lhs()); break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Until:
    case FormulaKind::Release:
      op.a = flatten(f.lhs());
      op.b = flatten(f.rhs());
      break;
    case FormulaKind::True:
    case FormulaKind::False: break;
    default: throw std::logic_error("formula not in lowered NNF");
  }
  ops_.push_back(op);
  return static_cast<std::uint32_t>(ops_.size() - 1);
}

namespace {

class Grounder {
public:
  Grounder(std::vector<GroundedFormula::Node>& nodes, std::vector<std::uint32_t>& children,
           std::size_t n, std::size_t n_ops)
      : nodes_(nodes), children_(children), n_(n), width_(n + 2), memo_(n_ops * (n + 2), kUnset) {
    nodes_.push_back({GKind::True});
    nodes_.push_back({GKind::False});
  }

  template <typename Ops>
  std::uint32_t go(const Ops& ops, std::uint32_t op_id, std::size_t pos) {
    pos = std::min(pos, n_ + 1);
    if (memo_[op_id * width_ + pos] != kUnset) return memo_[op_id * width_ + pos];
    const auto& op = ops[op_id];
    std::uint32_t result = kFalse;
    switch (op.kind) {
      case FormulaKind::True: result = kTrue; break;
      case FormulaKind::False: result = kFalse; break;
      case FormulaKind::Atom:
      case FormulaKind::NegAtom: {
        const bool neg = op.kind == FormulaKind::NegAtom;
        if (pos > n_) {
          result = neg ? kTrue : kFalse;
        } else {
          GroundedFormula::Node node{GKind::Atom, neg, op.atom, static_cast<std::uint32_t>(pos)};
          nodes_.push_back(node);
          result = static_cast<std::uint32_t>(nodes_.size() - 1);
        }
        break;
      }
      case FormulaKind::Next: result = pos + 1 <= n_ ? go(ops, op.a, pos + 1) : kFalse; break;
      case FormulaKind::WeakNext: result = pos + 1 <= n_ ? go(ops, op.a, pos + 1) : kTrue; break;
      case FormulaKind::And: {
        std::uint32_t l = go(ops, op.a, pos);
        result = l == kFalse ? kFalse : junction(GKind::And, {l, go(ops, op.b, pos)});
        break;
      }
      case FormulaKind::Or: {
        std::uint32_t l = go(ops, op.a, pos);
        result = l == kTrue ? kTrue : junction(GKind::Or, {l, go(ops, op.b, pos)});
        break;
      }
      case FormulaKind::Until: result = until(ops, op, pos); break;
      case FormulaKind::Release: result = release(ops, op, pos); break;
      default: throw std::logic_error("formula not in lowered NNF");
    }
    memo_[op_id * width_ + pos] = result;
    return result;
  }

private:
  // ⋁_{pos≤τ≤n} (φ₂@τ ∧ ⋀_{pos≤u<τ} φ₁@u)
  template <typename Ops, typename Op>
  std::uint32_t until(const Ops& ops, const Op& op, std::size_t pos) {
    if (pos > n_) return kFalse;
    std::vector<std::uint32_t> terms;
    std::vector<std::uint32_t> prefix;
    for (std::size_t tau = pos; tau <= n_; ++tau) {
      std::uint32_t rhs = go(ops, op.b, tau);
      if (rhs != kFalse) {
        std::vector<std::uint32_t> conj{rhs};
        conj.insert(conj.end(), prefix.begin(), prefix.end());
        std::uint32_t term = junction(GKind::And, std::move(conj));
        if (term == kTrue) return kTrue;
        if (term != kFalse) terms.push_back(term);
      }
      if (tau == n_) break;
      std::uint32_t lhs = go(ops, op.a, tau);
      if (lhs == kFalse) break;  // every later disjunct contains it
      if (lhs != kTrue) prefix.push_back(lhs);
    }
    return junction(GKind::Or, std::move(terms));
  }

  // ⋀_{pos≤τ≤n} (φ₂@τ ∨ ⋁_{pos≤u<τ} φ₁@u)
  template <typename Ops, typename Op>
  std::uint32_t release(const Ops& ops, const Op& op, std::size_t pos) {
    if (pos > n_) return kTrue;
    std::vector<std::uint32_t> terms;
    std::vector<std::uint32_t> prefix;
    for (std::size_t tau = pos; tau <= n_; ++tau) {
      std::uint32_t rhs = go(ops, op.b, tau);
      if (rhs != kTrue) {
        std::vector<std::uint32_t> disj{rhs};
        disj.insert(disj.end(), prefix.begin(), prefix.end());
        std::uint32_t term = junction(GKind::Or, std::move(disj));
        if (term == kFalse) return kFalse;
        if (term != kTrue) terms.push_back(term);
      }
      if (tau == n_) break;
      std::uint32_t lhs = go(ops, op.a, tau);
      if (lhs == kTrue) break;  // every later conjunct contains it
      if (lhs != kFalse) prefix.push_back(lhs);
    }
    return junction(GKind::And, std::move(terms));
  }

  /// n-ary And/Or with constant folding.
  std::uint32_t junction(GKind kind, std::vector<std::uint32_t> kids) {
    const std::uint32_t unit = kind == GKind::And ? kTrue : kFalse;
    const std::uint32_t zero = kind == GKind::And ? kFalse : kTrue;
    std::vector<std::uint32_t> kept;
    kept.reserve(kids.size());
    for (std::uint32_t k : kids) {
      if (k == zero) return zero;
      if (k != unit) kept.push_back(k);
    }
    if (kept.empty()) return unit;
    if (kept.size() == 1) return kept.front();
    GroundedFormula::Node node{kind};
    node.first_child = static_cast<std::uint32_t>(children_.size());
    node.child_count = static_cast<std::uint32_t>(kept.size());
    children_.insert(children_.end(), kept.begin(), kept.end());
    nodes_.push_back(node);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  std::vector<GroundedFormula::Node>& nodes_;
  std::vector<std::uint32_t>& children_;
  std::size_t n_;
  std::size_t width_;
  std::vector<std::uint32_t> memo_;
};

}  // namespace

GroundedFormula CompiledFormula::ground(std::size_t length, std::size_t t) const {
  if (t < 1) throw std::out_of_range("grounding position must be >= 1");
  GroundedFormula g;
  Grounder grounder(g.nodes_, g.children_, length, ops_.size());
  g.root_ = grounder.go(ops_, root_, t);
  return g;
}

GroundedFormula ground(const Formula& phi, const Trace& trace, std::size_t t) {
  return CompiledFormula(phi).ground(trace.size(), t);
}

// ---------------------------------------------------------------------------
// FormulaEvaluator

FormulaEvaluator::FormulaEvaluator(const Formula& phi, const KnowledgeBase& kb)
    : compiled_(phi), kb_(&kb) {
  for (const auto& slot : compiled_.atoms()) {
    AtomPlan plan;
    plan.label = kb.label_id(slot.label);
    for (std::uint32_t i = 0; i < slot.pred.conjuncts.size(); ++i) {
      const Condition& cond = slot.pred.conjuncts[i];
      if (const auto* c = std::get_if<ConstCond>(&cond)) {
        if (kb.is_event_key(c->key)) {
          std::vector<bool> hits(kb.act_size() + 1, false);
          if (plan.label)
            for (RowOffset off : kb.attr_range(c->key, slot.label, c->op, c->constant)) hits[off] = true;
          plan.const_hits.push_back(std::move(hits));
        } else {
          kb.poset().order().leq(c->constant, c->constant);  // validates hierarchy constants
          plan.trace_conds.push_back(i);
        }
      } else {
        plan.joins.push_back(i);
      }
    }
    plans_.push_back(std::move(plan));
  }
}

GroundedFormula FormulaEvaluator::ground(TraceId trace, std::size_t t) const {
  return compiled_.ground(kb_->trace_length(trace), t);
}

const Value& FormulaEvaluator::key_value(std::string_view key, TraceId trace, RowOffset off) const {
  if (kb_->is_event_key(key)) return kb_->attr_value(key, off);
  return lookup(kb_->trace_payload(trace), key);
}

bool FormulaEvaluator::atom_holds(std::uint32_t atom, TraceId trace, std::size_t position) const {
  const AtomPlan& plan = plans_.at(atom);
  auto rows = kb_->trace_rows(trace);
  if (position < 1 || position > rows.size() || !plan.label) return false;
  const RowOffset off = rows[position - 1];
  if (kb_->act_label(off) != *plan.label) return false;
  for (const auto& hits : plan.const_hits)
    if (!hits[off]) return false;
  const ValueOrder& order = kb_->poset().order();
  const auto& conjuncts = compiled_.atoms()[atom].pred.conjuncts;
  for (std::uint32_t i : plan.trace_conds) {
    const auto& c = std::get<ConstCond>(conjuncts[i]);
    if (!order.holds(key_value(c.key, trace, off), c.op, c.constant)) return false;
  }
  for (std::uint32_t i : plan.joins) {
    const auto* j = &std::get<JoinCond>(conjuncts[i]);
    auto other = kb_->label_id(j->other_label);
    if (!other) return false;
    const Value& mine = key_value(j->key, trace, off);
    bool found = false;
    for (std::size_t tau = 1; tau < position && !found; ++tau) {
      RowOffset o = rows[tau - 1];
      found = kb_->act_label(o) == *other && order.holds(mine, j->op, key_value(j->other_key, trace, o));
    }
    if (!found) return false;
  }
  return true;
}

bool FormulaEvaluator::evaluate(const GroundedFormula& g, TraceId trace) const {
  std::vector<std::int8_t> memo(g.node_count(), -1);
  auto rec = [&](auto& self, std::uint32_t id) -> bool {
    if (memo[id] >= 0) return memo[id] != 0;
    const auto& n = g.node(id);
    bool v = false;
    switch (n.kind) {
      case GKind::True: v = true; break;
      case GKind::False: v = false; break;
      case GKind::Atom: v = atom_holds(n.atom, trace, n.position) != n.negated; break;
      case GKind::And:
        v = true;
        for (std::uint32_t c : g.children(id))
          if (!self(self, c)) {
            v = false;
            break;
          }
        break;
      case GKind::Or:
        v = false;
        for (std::uint32_t c : g.children(id))
          if (self(self, c)) {
            v = true;
            break;
          }
        break;
    }
    memo[id] = v ? 1 : 0;
    return v;
  };
  return rec(rec, g.root());
}

bool eval(const Formula& phi, const Trace& trace, const KnowledgeBase& kb) {
  auto id = kb.trace_id(trace.case_id);
  if (!id) throw Error("trace '" + trace.case_id + "' is not in the knowledge base");
  return FormulaEvaluator(phi, kb).holds(*id);
}

// ---------------------------------------------------------------------------
// direct semantics

namespace {

const Value& direct_value(const Trace& tr, std::size_t pos, std::string_view key) {
  const Value& v = lookup(tr.events[pos - 1].payload, key);
  return v.is_bottom() ? lookup(tr.trace_payload, key) : v;
}

bool direct_atom(const Formula& f, const Trace& tr, const ValueOrder& order, std::size_t i) {
  if (i < 1 || i > tr.size() || tr.events[i - 1].activity != f.label()) return false;
  for (const auto& cond : f.predicate().conjuncts) {
    if (const auto* c = std::get_if<ConstCond>(&cond)) {
      if (!order.holds(direct_value(tr, i, c->key), c->op, c->constant)) return false;
    } else {
      const auto& j = std::get<JoinCond>(cond);
      const Value& mine = direct_value(tr, i, j.key);
      bool found = false;
      for (std::size_t tau = 1; tau < i && !found; ++tau)
        found = tr.events[tau - 1].activity == j.other_label &&
                order.holds(mine, j.op, direct_value(tr, tau, j.other_key));
      if (!found) return false;
    }
  }
  return true;
}

bool sat(const Formula& f, const Trace& tr, const ValueOrder& order, std::size_t i) {
  const std::size_t n = tr.size();
  switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Atom: return direct_atom(f, tr, order, i);
    case FormulaKind::NegAtom: return !direct_atom(f, tr, order, i);
    case FormulaKind::Not: return !sat(f.lhs(), tr, order, i);
    case FormulaKind::Next: return i < n && sat(f.lhs(), tr, order, i + 1);
    case FormulaKind::WeakNext: return i >= n || sat(f.lhs(), tr, order, i + 1);
    case FormulaKind::And: return sat(f.lhs(), tr, order, i) && sat(f.rhs(), tr, order, i);
    case FormulaKind::Or: return sat(f.lhs(), tr, order, i) || sat(f.rhs(), tr, order, i);
    case FormulaKind::Until:
      for (std::size_t j = i; j <= n; ++j) {
        if (sat(f.rhs(), tr, order, j)) return true;
        if (!sat(f.lhs(), tr, order, j)) return false;
      }
      return false;
    case FormulaKind::Release:
      for (std::size_t j = i; j <= n; ++j) {
        if (!sat(f.rhs(), tr, order, j)) return false;
        if (sat(f.lhs(), tr, order, j)) return true;
      }
      return true;
    case FormulaKind::Eventually:
      for (std::size_t j = i; j <= n; ++j)
        if (sat(f.lhs(), tr, order, j)) return true;
      return false;
    case FormulaKind::Globally:
      for (std::size_t j = i; j <= n; ++j)
        if (!sat(f.lhs(), tr, order, j)) return false;
      return true;
  }
  return false;
}

}  // namespace

bool eval_direct(const Formula& phi, const Trace& trace, const ValueOrder& order, std::size_t t) {
  return sat(phi, trace, order, t);
}

}  // namespace dkb
