#include "dkb/mine.hpp"

#include "dkb/align.hpp"
#include "dkb/parallel.hpp"

namespace dkb {

std::vector<DeclareConstraint> candidate_grid(const std::vector<std::string>& alphabet,
                                              std::uint32_t max_n) {
  std::vector<DeclareConstraint> out;
  for (Template t : {Template::Init, Template::End, Template::Absence})
    for (const auto& a : alphabet) out.push_back({t, a, std::nullopt, {}, 1});
  for (Template t : {Template::Existence, Template::Exactly})
    for (const auto& a : alphabet)
      for (std::uint32_t n = 1; n <= max_n; ++n) out.push_back({t, a, std::nullopt, {}, n});
  for (Template t : {Template::RespExistence, Template::Response, Template::Precedence})
    for (const auto& a : alphabet)
      for (const auto& b : alphabet)
        if (a != b) out.push_back({t, a, b, {}, 1});
  return out;
}

std::vector<MineResult> mine(const KnowledgeBase& kb, const std::vector<DeclareConstraint>& candidates,
                             double c, unsigned threads) {
  std::vector<MineResult> out(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    MineResult r{candidates[i], 0, kb.trace_count()};
    for (const auto& [id, w] : align_constraint(kb, candidates[i], c))
      if (w == 1.0) ++r.support;
    out[i] = std::move(r);
  });
  return out;
}

}  // namespace dkb
