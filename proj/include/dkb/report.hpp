#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dkb/align.hpp"
#include "dkb/declare.hpp"
#include "dkb/kb.hpp"
#include "dkb/mine.hpp"

namespace dkb {

/// Time in [0, 1] truncated (not rounded) to two decimals: 2/3 -> "0.66".
std::string format_time(double t);
/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

/// `act,sigma_id,time,next,prev`, one row per Act offset.
void write_act_csv(const KnowledgeBase& kb, std::ostream& out);
/// `act,sigma_id,count`, label-major.
void write_count_csv(const KnowledgeBase& kb, std::ostream& out);
void write_kb_json(const KnowledgeBase& kb, std::ostream& out);

/// Per-constraint, per-trace truth values as computed by `check`.
struct CheckReport {
  std::vector<std::vector<bool>> holds;  // [constraint][trace - 1]
  std::vector<bool> trace_ok;            // [trace - 1]

  bool all_satisfied() const;
};
CheckReport check_model(const KnowledgeBase& kb, const DeclareModel& model, unsigned threads = 1);

void write_check_csv(const KnowledgeBase& kb, const DeclareModel& model, const CheckReport& r,
                     std::ostream& out);
void write_check_json(const KnowledgeBase& kb, const DeclareModel& model, const CheckReport& r,
                      std::ostream& out);
void write_alignment_csv(const KnowledgeBase& kb, const DeclareModel& model, const AlignmentReport& r,
                         std::ostream& out);
void write_alignment_json(const KnowledgeBase& kb, const DeclareModel& model,
                          const AlignmentReport& r, std::ostream& out);
void write_mine_csv(const std::vector<MineResult>& results, std::ostream& out);
void write_mine_json(const std::vector<MineResult>& results, std::ostream& out);

}  // namespace dkb
