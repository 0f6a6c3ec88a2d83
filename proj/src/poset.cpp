#include "dkb/poset.hpp"

#include <algorithm>

namespace dkb {

ValuePoset::ValuePoset(std::vector<Value> values, ValueOrder order) : order_(std::move(order)) {
  std::erase_if(values, [](const Value& v) { return v.is_bound(); });
  for (const auto& v : values) order_.leq(v, v);  // rejects unknown hierarchy nodes
  auto less = [this](const Value& a, const Value& b) { return order_.storage_less(a, b); };
  std::sort(values.begin(), values.end(), less);
  values.erase(std::unique(values.begin(), values.end()), values.end());
  universe_.reserve(values.size() + 2);
  universe_.push_back(Value::bottom());
  universe_.insert(universe_.end(), values.begin(), values.end());
  universe_.push_back(Value::top());
}

bool ValuePoset::contains(const Value& v) const {
  auto less = [this](const Value& a, const Value& b) { return order_.storage_less(a, b); };
  return std::binary_search(universe_.begin(), universe_.end(), v, less);
}

ValuePoset build_poset(const Log& log, std::shared_ptr<const Hierarchy> hierarchy) {
  std::vector<Value> values;
  for (const auto& t : log.traces()) {
    for (const auto& [k, v] : t.trace_payload) values.push_back(v);
    for (const auto& e : t.events)
      for (const auto& [k, v] : e.payload) values.push_back(v);
  }
  return ValuePoset(std::move(values), ValueOrder(std::move(hierarchy)));
}

}  // namespace dkb
