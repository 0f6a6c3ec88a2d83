#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dkb/value.hpp"

namespace dkb {

/// `key op constant`, tested on the event the atom binds.
struct ConstCond {
  std::string key;
  CmpOp op;
  Value constant;
  friend bool operator==(const ConstCond&, const ConstCond&) = default;
};

/// `this.key op other(label).other_key`: holds when some earlier event of the
/// trace labelled `other_label` satisfies the comparison.
struct JoinCond {
  std::string key;
  CmpOp op;
  std::string other_label;
  std::string other_key;
  friend bool operator==(const JoinCond&, const JoinCond&) = default;
};

using Condition = std::variant<ConstCond, JoinCond>;

/// Conjunction of conditions; empty means true.
struct DataPredicate {
  std::vector<Condition> conjuncts;

  bool trivial() const noexcept { return conjuncts.empty(); }
  std::string to_string() const;
  friend bool operator==(const DataPredicate&, const DataPredicate&) = default;
};

enum class FormulaKind {
  True,
  False,
  Atom,     // label ∧ predicate
  NegAtom,  // ¬(label ∧ predicate)
  Not,      // only before NNF conversion
  Next,     // strong next: false at the last position
  WeakNext, // true at the last position
  And,
  Or,
  Until,
  Release,
  Eventually,
  Globally,
};

/// Immutable LTLf formula over labelled atoms with data predicates.
/// Children are shared, copies are cheap.
class Formula {
public:
  static Formula top();
  static Formula bottom();
  static Formula atom(std::string label, DataPredicate pred = {});
  static Formula neg_atom(std::string label, DataPredicate pred = {});
  static Formula negation(Formula f);
  static Formula next(Formula f);
  static Formula weak_next(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula until(Formula a, Formula b);
  static Formula release(Formula a, Formula b);
  static Formula eventually(Formula f);
  static Formula globally(Formula f);
  /// ¬a ∨ b
  static Formula implies(Formula a, Formula b);

  FormulaKind kind() const noexcept;
  const std::string& label() const noexcept;
  const DataPredicate& predicate() const noexcept;
  /// Operand of unary nodes, left operand of binary ones.
  const Formula& lhs() const;
  const Formula& rhs() const;

  bool is_nnf() const;
  /// Number of nodes in the formula tree.
  std::size_t size() const;
  /// Nesting depth of U, R, F and G.
  std::size_t temporal_depth() const;
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(FormulaKind kind, std::string label, DataPredicate pred,
                      const Formula* lhs, const Formula* rhs);

  std::shared_ptr<const Node> node_;
};

/// Pushes negations down to atoms using the finite-trace dualities
/// (X/N, U/R, F/G, ∧/∨). Sugar is kept.
Formula to_nnf(const Formula& f);

/// F φ -> true U φ, G φ -> false R φ.
Formula lower_sugar(const Formula& f);

/// Grammar (loosest first): `->`, `|`, `&`, `U`/`R` (right assoc), prefix
/// `!` `X` `N` `F` `G`, atoms `label` or `label[pred]`, `true`, `false`, parens.
/// `pred` is `cond (& cond)*` with cond `key op const` or
/// `this.key op other(label).key`; op is one of <= >= < > == !=.
/// Throws SyntaxError.
Formula parse_formula(std::string_view text, const ValueOrder& order = {});

/// Predicate on its own. A `q.key` qualifier must be `this` or `self_label`.
DataPredicate parse_predicate(std::string_view text, const ValueOrder& order = {},
                              std::string_view self_label = {});

}  // namespace dkb
