#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dkb/declare.hpp"
#include "dkb/kb.hpp"

namespace dkb {

/// Unary templates over every label (n = 1..max_n for counting ones), binary
/// templates over ordered pairs of distinct labels. Deterministic order.
std::vector<DeclareConstraint> candidate_grid(const std::vector<std::string>& alphabet,
                                              std::uint32_t max_n = 3);

struct MineResult {
  DeclareConstraint constraint;
  std::size_t support = 0;  // traces scoring exactly 1
  std::size_t total = 0;

  double fraction() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(support) / static_cast<double>(total);
  }
};

/// Scores every candidate over the knowledge base; candidates run in parallel.
std::vector<MineResult> mine(const KnowledgeBase& kb, const std::vector<DeclareConstraint>& candidates,
                             double c, unsigned threads = 1);
inline std::vector<MineResult> mine(const KnowledgeBase& kb, double c, unsigned threads = 1) {
  return mine(kb, candidate_grid(kb.labels()), c, threads);
}

}  // namespace dkb
