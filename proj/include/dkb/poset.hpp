#pragma once

#include <memory>
#include <vector>

#include "dkb/log.hpp"
#include "dkb/value.hpp"

namespace dkb {

/// Finite universe of the values occurring in a log, bounded by bottom and top,
/// together with the order over it. Immutable once built.
class ValuePoset {
public:
  ValuePoset() : ValuePoset(std::vector<Value>{}, ValueOrder{}) {}
  ValuePoset(std::vector<Value> values, ValueOrder order);

  /// Sorted by storage order; first is bottom, last is top.
  const std::vector<Value>& universe() const noexcept { return universe_; }
  const ValueOrder& order() const noexcept { return order_; }

  bool contains(const Value& v) const;

  bool leq(const Value& u, const Value& v) const { return order_.leq(u, v); }
  Ordering compare(const Value& u, const Value& v) const { return order_.compare(u, v); }

private:
  std::vector<Value> universe_;
  ValueOrder order_;
};

/// Harvests every trace and event payload value of `log`.
ValuePoset build_poset(const Log& log, std::shared_ptr<const Hierarchy> hierarchy = nullptr);

}  // namespace dkb
