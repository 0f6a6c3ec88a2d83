#include "dkb/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dkb/ground.hpp"
#include "dkb/parallel.hpp"

namespace dkb {

using nlohmann::json;

std::string format_time(double t) {
  // the epsilon keeps 0.29 * 100 = 28.999... from losing a hundredth
  const long v = static_cast<long>(std::floor(t * 100.0 + 1e-9));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%ld.%02ld", v / 100, v % 100);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_act_csv(const KnowledgeBase& kb, std::ostream& out) {
  out << "act,sigma_id,time,next,prev\n";
  for (RowOffset off = 1; off <= kb.act_size(); ++off) {
    ActRow r = kb.act_row(off);
    out << csv_field(kb.labels()[r.act]) << ',' << csv_field(kb.case_id(r.sigma)) << ','
        << format_time(r.time) << ',' << format_offset(r.next) << ',' << format_offset(r.prev) << '\n';
  }
}

void write_count_csv(const KnowledgeBase& kb, std::ostream& out) {
  out << "act,sigma_id,count\n";
  for (std::size_t i = 0; i < kb.count_size(); ++i) {
    CountRow r = kb.count_row(i);
    out << csv_field(kb.labels()[r.act]) << ',' << csv_field(kb.case_id(r.sigma)) << ',' << r.count
        << '\n';
  }
}

namespace {
json offset_json(RowOffset off) {
  if (off == kMinusInf || off == kPlusInf) return format_offset(off);
  return off;
}
}  // namespace

void write_kb_json(const KnowledgeBase& kb, std::ostream& out) {
  json act = json::array();
  for (RowOffset off = 1; off <= kb.act_size(); ++off) {
    ActRow r = kb.act_row(off);
    act.push_back({{"act", kb.labels()[r.act]},
                   {"sigma_id", kb.case_id(r.sigma)},
                   {"time", r.time},
                   {"next", offset_json(r.next)},
                   {"prev", offset_json(r.prev)}});
  }
  json count = json::array();
  for (std::size_t i = 0; i < kb.count_size(); ++i) {
    CountRow r = kb.count_row(i);
    count.push_back({{"act", kb.labels()[r.act]}, {"sigma_id", kb.case_id(r.sigma)}, {"count", r.count}});
  }
  out << json{{"act", act}, {"count", count}}.dump(2) << '\n';
}

bool CheckReport::all_satisfied() const {
  for (bool ok : trace_ok)
    if (!ok) return false;
  return true;
}

CheckReport check_model(const KnowledgeBase& kb, const DeclareModel& model, unsigned threads) {
  CheckReport r;
  const std::size_t n = kb.trace_count();
  r.holds.assign(model.size(), std::vector<bool>(n));
  parallel_for(model.size(), threads, [&](std::size_t i) {
    FormulaEvaluator ev(to_ltlf(model.constraints[i]), kb);
    std::vector<bool> row(n);
    for (std::uint32_t t = 1; t <= n; ++t) row[t - 1] = ev.holds(TraceId{t});
    r.holds[i] = std::move(row);
  });
  r.trace_ok.assign(n, true);
  for (const auto& row : r.holds)
    for (std::size_t t = 0; t < n; ++t)
      if (!row[t]) r.trace_ok[t] = false;
  return r;
}

namespace {
const char* boolean(bool b) { return b ? "true" : "false"; }
}  // namespace

void write_check_csv(const KnowledgeBase& kb, const DeclareModel& model, const CheckReport& r,
                     std::ostream& out) {
  out << "constraint_index,constraint,trace_id,satisfied\n";
  for (std::size_t i = 0; i < model.size(); ++i)
    for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
      out << i << ',' << csv_field(model.constraints[i].to_string()) << ','
          << csv_field(kb.case_id(TraceId{t})) << ',' << boolean(r.holds[i][t - 1]) << '\n';
  out << "\ntrace_id,satisfied\n";
  for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
    out << csv_field(kb.case_id(TraceId{t})) << ',' << boolean(r.trace_ok[t - 1]) << '\n';
}

void write_check_json(const KnowledgeBase& kb, const DeclareModel& model, const CheckReport& r,
                      std::ostream& out) {
  json constraints = json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    json per_trace = json::object();
    for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
      per_trace[kb.case_id(TraceId{t})] = static_cast<bool>(r.holds[i][t - 1]);
    constraints.push_back({{"index", i}, {"constraint", model.constraints[i].to_string()}, {"satisfied", per_trace}});
  }
  json traces = json::array();
  for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
    traces.push_back({{"trace_id", kb.case_id(TraceId{t})}, {"satisfied", static_cast<bool>(r.trace_ok[t - 1])}});
  out << json{{"constraints", constraints}, {"traces", traces}, {"all_satisfied", r.all_satisfied()}}.dump(2)
      << '\n';
}

void write_alignment_csv(const KnowledgeBase& kb, const DeclareModel& model, const AlignmentReport& r,
                         std::ostream& out) {
  out << "constraint_index,template,trace_id,score\n";
  for (std::size_t i = 0; i < r.per_constraint.size(); ++i) {
    const std::string name = csv_field(model.constraints[i].to_string());
    for (const auto& [id, w] : r.per_constraint[i])
      out << i << ',' << name << ',' << csv_field(kb.case_id(id)) << ',' << format_number(w) << '\n';
  }
  out << "\ntrace_id,aggregate,sat_count,total\n";
  for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
    out << csv_field(kb.case_id(TraceId{t})) << ',' << format_number(r.per_trace[t - 1]) << ','
        << r.sat_count[t - 1] << ',' << r.total << '\n';
}

void write_alignment_json(const KnowledgeBase& kb, const DeclareModel& model,
                          const AlignmentReport& r, std::ostream& out) {
  json constraints = json::array();
  for (std::size_t i = 0; i < r.per_constraint.size(); ++i) {
    json scores = json::array();
    for (const auto& [id, w] : r.per_constraint[i])
      scores.push_back({{"trace_id", kb.case_id(id)}, {"score", w}});
    constraints.push_back({{"index", i}, {"template", model.constraints[i].to_string()}, {"scores", scores}});
  }
  json traces = json::array();
  for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
    traces.push_back({{"trace_id", kb.case_id(TraceId{t})},
                      {"aggregate", r.per_trace[t - 1]},
                      {"sat_count", r.sat_count[t - 1]},
                      {"total", r.total}});
  out << json{{"constraints", constraints}, {"traces", traces}}.dump(2) << '\n';
}

void write_mine_csv(const std::vector<MineResult>& results, std::ostream& out) {
  out << "template,activation,target,n,support,total,fraction\n";
  for (const auto& r : results) {
    const auto& c = r.constraint;
    out << template_name(c.kind) << ',' << csv_field(c.activation) << ','
        << (c.target ? csv_field(*c.target) : "") << ',' << (has_count(c.kind) ? std::to_string(c.n) : "")
        << ',' << r.support << ',' << r.total << ',' << format_number(r.fraction()) << '\n';
  }
}

void write_mine_json(const std::vector<MineResult>& results, std::ostream& out) {
  json rows = json::array();
  for (const auto& r : results) {
    const auto& c = r.constraint;
    json row = {{"template", template_name(c.kind)},
                {"constraint", c.to_string()},
                {"activation", c.activation},
                {"support", r.support},
                {"total", r.total},
                {"fraction", r.fraction()}};
    if (c.target) row["target"] = *c.target;
    if (has_count(c.kind)) row["n"] = c.n;
    rows.push_back(std::move(row));
  }
  out << rows.dump(2) << '\n';
}

}  // namespace dkb
