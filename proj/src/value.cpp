#include "dkb/value.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dkb/errors.hpp"

namespace dkb {

Value Value::top() {
  Value v;
  v.tag_ = ValueTag::Top;
  return v;
}

Value Value::str(std::string s) {
  Value v;
  v.tag_ = ValueTag::Str;
  v.text_ = std::move(s);
  return v;
}

Value Value::num(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("numeric values must be finite");
  Value v;
  v.tag_ = ValueTag::Num;
  v.num_ = x == 0.0 ? 0.0 : x;  // fold -0.0
  return v;
}

Value Value::hier(NodeId node, std::string name) {
  Value v;
  v.tag_ = ValueTag::Hier;
  v.node_ = node;
  v.text_ = std::move(name);
  return v;
}

bool operator==(const Value& a, const Value& b) noexcept {
  if (a.tag_ != b.tag_) return false;
  switch (a.tag_) {
    case ValueTag::Str: return a.text_ == b.text_;
    case ValueTag::Num: return a.num_ == b.num_;
    case ValueTag::Hier: return a.node_ == b.node_;
    default: return true;
  }
}

std::string format_number(double x) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

std::string Value::to_string() const {
  switch (tag_) {
    case ValueTag::Bottom: return "bottom";
    case ValueTag::Top: return "top";
    case ValueTag::Num: return format_number(num_);
    default: return text_;
  }
}

// ---------------------------------------------------------------------------
// Hierarchy

Hierarchy Hierarchy::from_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                                const std::vector<std::string>& isolated) {
  Hierarchy h;
  std::unordered_map<std::string, NodeId> ids;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<NodeId>(h.names_.size()));
    if (inserted) h.names_.push_back(name);
    return it->second;
  };
  std::vector<std::pair<NodeId, NodeId>> id_edges;
  for (const auto& [child, parent] : edges) {
    if (child == parent) throw HierarchyCycle(child);
    id_edges.emplace_back(intern(child), intern(parent));
  }
  for (const auto& name : isolated) intern(name);

  const std::size_t n = h.names_.size();
  std::vector<std::vector<NodeId>> parents(n);
  std::vector<std::size_t> indegree(n, 0);  // number of children
  for (auto [c, p] : id_edges) {
    parents[c].push_back(p);
    ++indegree[p];
  }

  // Kahn's algorithm from the leaves upward: children come before parents.
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    if (indegree[v] == 0) order.push_back(v);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (NodeId p : parents[order[i]])
      if (--indegree[p] == 0) order.push_back(p);
  if (order.size() != n) {
    for (NodeId v = 0; v < n; ++v)
      if (indegree[v] != 0) throw HierarchyCycle(h.names_[v]);
  }

  h.rank_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) h.rank_[order[i]] = i;

  // Ancestors of a node = itself plus ancestors of its parents; visit parents first.
  h.reach_.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = n; i-- > 0;) {
    NodeId v = order[i];
    auto& row = h.reach_[v];
    row[v] = true;
    for (NodeId p : parents[v]) {
      const auto& prow = h.reach_[p];
      for (std::size_t j = 0; j < n; ++j)
        if (prow[j]) row[j] = true;
    }
  }
  return h;
}

namespace {
std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}
}  // namespace

Hierarchy Hierarchy::parse(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> isolated;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    auto sep = body.find("<=");
    if (sep == std::string_view::npos) {
      if (body.find_first_of(" \t") != std::string_view::npos)
        throw ParseError(lineno, "expected 'child <= parent'");
      isolated.emplace_back(body);
      continue;
    }
    auto child = trim(body.substr(0, sep));
    auto parent = trim(body.substr(sep + 2));
    if (child.empty() || parent.empty()) throw ParseError(lineno, "expected 'child <= parent'");
    edges.emplace_back(std::string(child), std::string(parent));
  }
  return from_edges(edges, isolated);
}

Hierarchy Hierarchy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open hierarchy file '" + path.string() + "'");
  return parse(in);
}

std::optional<NodeId> Hierarchy::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeId>(it - names_.begin());
}

bool Hierarchy::reaches(NodeId node, NodeId ancestor) const {
  return reach_.at(node).at(ancestor);
}

Value Hierarchy::value(std::string_view name) const {
  auto id = find(name);
  if (!id) throw UnknownHierNode(std::string(name));
  return Value::hier(*id, std::string(name));
}

Value Hierarchy::classify(std::string s) const {
  if (auto id = find(s)) return Value::hier(*id, std::move(s));
  return Value::str(std::move(s));
}

// ---------------------------------------------------------------------------
// ValueOrder

std::string_view to_string(CmpOp op) noexcept {
  switch (op) {
    case CmpOp::Leq: return "<=";
    case CmpOp::Geq: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Neq: return "!=";
  }
  return "?";
}

std::optional<CmpOp> parse_cmp_op(std::string_view text) noexcept {
  if (text == "<=") return CmpOp::Leq;
  if (text == ">=") return CmpOp::Geq;
  if (text == "==" || text == "=") return CmpOp::Eq;
  if (text == "<") return CmpOp::Lt;
  if (text == ">") return CmpOp::Gt;
  if (text == "!=") return CmpOp::Neq;
  return std::nullopt;
}

void ValueOrder::check_node(const Value& v) const {
  if (v.tag() != ValueTag::Hier) return;
  if (!hierarchy_ || v.node() >= hierarchy_->size() || hierarchy_->name(v.node()) != v.text())
    throw UnknownHierNode(v.text());
}

bool ValueOrder::leq(const Value& u, const Value& v) const {
  check_node(u);
  check_node(v);
  if (u.tag() == ValueTag::Bottom || v.tag() == ValueTag::Top) return true;
  if (u.tag() != v.tag()) return false;
  switch (u.tag()) {
    case ValueTag::Str: return u.text() <= v.text();
    case ValueTag::Num: return u.number() <= v.number();
    case ValueTag::Hier: return hierarchy_->reaches(u.node(), v.node());
    default: return false;  // top <= top handled above; remaining: top vs non-top
  }
}

Ordering ValueOrder::compare(const Value& u, const Value& v) const {
  bool le = leq(u, v);
  bool ge = leq(v, u);
  if (le && ge) return Ordering::Equal;
  if (le) return Ordering::Less;
  if (ge) return Ordering::Greater;
  return Ordering::Incomparable;
}

bool ValueOrder::holds(const Value& v, CmpOp op, const Value& k) const {
  switch (op) {
    case CmpOp::Leq: return leq(v, k);
    case CmpOp::Geq: return leq(k, v);
    case CmpOp::Eq: check_node(v), check_node(k); return v == k;
    case CmpOp::Neq: check_node(v), check_node(k); return !(v == k);
    case CmpOp::Lt: return leq(v, k) && !(v == k);
    case CmpOp::Gt: return leq(k, v) && !(v == k);
  }
  return false;
}

bool ValueOrder::storage_less(const Value& a, const Value& b) const {
  if (a.tag() != b.tag()) return a.tag() < b.tag();
  switch (a.tag()) {
    case ValueTag::Str: return a.text() < b.text();
    case ValueTag::Num: return a.number() < b.number();
    case ValueTag::Hier:
      if (hierarchy_) return hierarchy_->rank(a.node()) < hierarchy_->rank(b.node());
      return a.node() < b.node();
    default: return false;
  }
}

Value ValueOrder::classify(std::string s) const {
  if (hierarchy_) return hierarchy_->classify(std::move(s));
  return Value::str(std::move(s));
}

}  // namespace dkb
