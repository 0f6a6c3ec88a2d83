#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dkb {

/// Kind of a payload value. The enumerator order is the type-major order
/// used when heterogeneous values have to be laid out in one sorted column.
enum class ValueTag : std::uint8_t { Bottom, Str, Num, Hier, Top };

using NodeId = std::uint32_t;

/// Tagged heterogeneous scalar: string, finite float, hierarchy node, or one
/// of the two bounds.
class Value {
public:
  Value() = default;  // bottom

  static Value bottom() { return Value(); }
  static Value top();
  static Value str(std::string s);
  /// Throws std::invalid_argument for NaN or infinities.
  static Value num(double x);
  static Value hier(NodeId node, std::string name);

  ValueTag tag() const noexcept { return tag_; }
  bool is_bound() const noexcept { return tag_ == ValueTag::Bottom || tag_ == ValueTag::Top; }
  bool is_bottom() const noexcept { return tag_ == ValueTag::Bottom; }

  /// String payload for Str, node name for Hier.
  const std::string& text() const noexcept { return text_; }
  double number() const noexcept { return num_; }
  NodeId node() const noexcept { return node_; }

  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) noexcept;

private:
  ValueTag tag_ = ValueTag::Bottom;
  double num_ = 0.0;
  NodeId node_ = 0;
  std::string text_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

/// Is-a DAG over named entities. Edges go child -> parent; reachability is the
/// reflexive-transitive closure and is precomputed.
class Hierarchy {
public:
  Hierarchy() = default;

  /// Throws HierarchyCycle when the edges contain a cycle (self-loops included).
  static Hierarchy from_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                              const std::vector<std::string>& isolated = {});
  /// `child <= parent` per line, `#` comments, a lone name declares an isolated node.
  static Hierarchy parse(std::istream& in);
  static Hierarchy load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return names_.size(); }
  std::optional<NodeId> find(std::string_view name) const;
  const std::string& name(NodeId node) const { return names_.at(node); }

  /// True iff `ancestor` is reachable from `node` (ancestor-or-self).
  bool reaches(NodeId node, NodeId ancestor) const;
  /// Position in a topological order where every node precedes its ancestors.
  std::size_t rank(NodeId node) const { return rank_.at(node); }

  /// Throws UnknownHierNode.
  Value value(std::string_view name) const;
  /// Hier when `s` names a node, Str otherwise.
  Value classify(std::string s) const;

private:
  std::vector<std::string> names_;
  std::vector<std::vector<bool>> reach_;  // reach_[a][b]: b is ancestor-or-self of a
  std::vector<std::size_t> rank_;
};

enum class Ordering { Less, Equal, Greater, Incomparable };

/// Comparison operators usable in data predicates. All of them reduce to the
/// value order and equality.
enum class CmpOp { Leq, Geq, Eq, Lt, Gt, Neq };

std::string_view to_string(CmpOp op) noexcept;
std::optional<CmpOp> parse_cmp_op(std::string_view text) noexcept;

/// The partial order over strings, floats, hierarchy nodes and the two bounds.
///
/// Strings compare byte-wise, floats numerically, hierarchy nodes by is-a
/// reachability; bottom is below and top above everything. Values of two
/// different kinds are incomparable unless one of them is a bound.
class ValueOrder {
public:
  ValueOrder() = default;
  explicit ValueOrder(std::shared_ptr<const Hierarchy> hierarchy)
      : hierarchy_(std::move(hierarchy)) {}

  const Hierarchy* hierarchy() const noexcept { return hierarchy_.get(); }
  const std::shared_ptr<const Hierarchy>& shared_hierarchy() const noexcept { return hierarchy_; }

  bool leq(const Value& u, const Value& v) const;
  Ordering compare(const Value& u, const Value& v) const;
  /// `v op k`; incomparable pairs satisfy only Neq.
  bool holds(const Value& v, CmpOp op, const Value& k) const;

  /// Strict total order used for sorted storage: tag-major, then in-kind order
  /// (hierarchy nodes by topological rank). Linear extension of leq.
  bool storage_less(const Value& a, const Value& b) const;

  /// Hier when a hierarchy is loaded and names `s`, Str otherwise.
  Value classify(std::string s) const;

private:
  void check_node(const Value& v) const;

  std::shared_ptr<const Hierarchy> hierarchy_;
};

}  // namespace dkb
