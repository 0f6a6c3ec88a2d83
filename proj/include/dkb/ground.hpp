#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dkb/kb.hpp"
#include "dkb/log.hpp"
#include "dkb/ltlf.hpp"

namespace dkb {

/// Trace-specialized propositional structure: the formula unrolled over the
/// positions of one trace. Leaves are ground atoms `label∧P @ position`;
/// Until/Release become finite disjunctions/conjunctions over positions.
/// Nodes are shared (a DAG); structural constants are folded away.
class GroundedFormula {
public:
  enum class Kind : std::uint8_t { True, False, Atom, And, Or };

  struct Node {
    Kind kind;
    bool negated = false;     // Atom only: ¬(label ∧ P)
    std::uint32_t atom = 0;   // Atom only: index into the compiled atom list
    std::uint32_t position = 0;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
  };

  std::uint32_t root() const noexcept { return root_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const Node& node(std::uint32_t id) const { return nodes_.at(id); }
  std::span<const std::uint32_t> children(std::uint32_t id) const;
  /// Distinct nodes reachable from the root.
  std::size_t size() const;
  bool is_constant() const { return node(root_).kind <= Kind::False; }
  bool constant_value() const { return node(root_).kind == Kind::True; }

private:
  friend class CompiledFormula;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> children_;
  std::uint32_t root_ = 0;
};

/// Lowered NNF formula flattened into an array, ready to ground on any trace.
class CompiledFormula {
public:
  struct AtomSlot {
    std::string label;
    DataPredicate pred;
  };

  /// Converts to NNF and lowers F/G first.
  explicit CompiledFormula(const Formula& phi);

  const Formula& formula() const noexcept { return phi_; }
  const std::vector<AtomSlot>& atoms() const noexcept { return atoms_; }

  /// Unrolls the formula at 1-based position `t` of a trace with `length`
  /// events. Positions past the end make atoms and strong next false.
  GroundedFormula ground(std::size_t length, std::size_t t = 1) const;

private:
  struct Op {
    FormulaKind kind;
    std::uint32_t a = 0, b = 0;  // child op indices
    std::uint32_t atom = 0;
  };
  std::uint32_t flatten(const Formula& f);

  Formula phi_;
  std::vector<Op> ops_;
  std::vector<AtomSlot> atoms_;
  std::uint32_t root_ = 0;
};

/// Evaluates a formula on traces of a knowledge base through the grounded
/// path. Constant data conditions are answered once per atom with
/// KnowledgeBase::attr_range; join conditions look at earlier events.
/// Immutable after construction and safe to share between threads.
class FormulaEvaluator {
public:
  FormulaEvaluator(const Formula& phi, const KnowledgeBase& kb);

  const CompiledFormula& compiled() const noexcept { return compiled_; }

  GroundedFormula ground(TraceId trace, std::size_t t = 1) const;
  bool evaluate(const GroundedFormula& g, TraceId trace) const;
  bool holds(TraceId trace, std::size_t t = 1) const { return evaluate(ground(trace, t), trace); }

  /// label ∧ P at the 1-based position of the trace; false past the end.
  bool atom_holds(std::uint32_t atom, TraceId trace, std::size_t position) const;

private:
  struct AtomPlan {
    std::optional<LabelId> label;
    std::vector<std::vector<bool>> const_hits;  // per event-key ConstCond, indexed by Act offset
    std::vector<std::uint32_t> trace_conds;  // conjunct indices: trace keys or unknown keys
    std::vector<std::uint32_t> joins;        // conjunct indices
  };
  const Value& key_value(std::string_view key, TraceId trace, RowOffset off) const;

  CompiledFormula compiled_;
  const KnowledgeBase* kb_;
  std::vector<AtomPlan> plans_;
};

/// Free-standing grounding; only the length of the trace matters.
GroundedFormula ground(const Formula& phi, const Trace& trace, std::size_t t = 1);

/// Truth of `phi` on a trace of the knowledge base via the grounded path.
bool eval(const Formula& phi, const Trace& trace, const KnowledgeBase& kb);

/// Textbook recursive LTLf semantics on suffixes, straight from the trace's
/// payloads. Accepts any formula, negations included. Used as the oracle
/// for the grounded path.
bool eval_direct(const Formula& phi, const Trace& trace, const ValueOrder& order = {},
                 std::size_t t = 1);

}  // namespace dkb
