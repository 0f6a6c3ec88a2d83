#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "dkb/align.hpp"
#include "dkb/cli.hpp"
#include "dkb/declare.hpp"
#include "dkb/errors.hpp"
#include "dkb/kb.hpp"
#include "dkb/log.hpp"
#include "dkb/mine.hpp"
#include "dkb/report.hpp"

namespace py = pybind11;
using namespace dkb;

namespace {

KnowledgeBase build_kb(Log log, const std::vector<std::string>& extra_labels) {
  log.declare_labels(extra_labels);
  return KnowledgeBase::build(log);
}

LogFormat format_of(const std::string& name) {
  if (name == "compact") return LogFormat::Compact;
  if (name == "jsonl") return LogFormat::Jsonl;
  throw std::invalid_argument("format must be 'compact' or 'jsonl'");
}

template <typename Fn>
std::string capture(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Data-aware Declare conformance over an in-memory column store";

  py::register_exception<Error>(m, "DeclareKbError", PyExc_ValueError);

  py::class_<DeclareModel>(m, "Model")
      .def_static(
          "parse", [](const std::string& text) {
            std::istringstream in(text);
            return parse_model(in);
          },
          py::arg("text"))
      .def_static("load", [](const std::filesystem::path& p) { return parse_model(p); }, py::arg("path"))
      .def("__len__", &DeclareModel::size)
      .def("labels", &DeclareModel::labels)
      .def("constraints", [](const DeclareModel& model) {
        std::vector<std::string> out;
        for (const auto& c : model.constraints) out.push_back(c.to_string());
        return out;
      });

  py::class_<KnowledgeBase>(m, "KnowledgeBase")
      .def_static(
          "from_string",
          [](const std::string& text, const std::string& format, const std::vector<std::string>& labels) {
            std::istringstream in(text);
            Log log = format_of(format) == LogFormat::Compact ? parse_compact(in) : parse_jsonl(in);
            return build_kb(std::move(log), labels);
          },
          py::arg("text"), py::arg("format") = "compact", py::arg("labels") = std::vector<std::string>{})
      .def_static(
          "from_file",
          [](const std::filesystem::path& path, const std::vector<std::string>& labels) {
            return build_kb(parse_log(path, detect_log_format(path)), labels);
          },
          py::arg("path"), py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("labels", &KnowledgeBase::labels)
      .def_property_readonly("trace_count", &KnowledgeBase::trace_count)
      .def("case_ids", [](const KnowledgeBase& kb) {
        std::vector<std::string> out;
        for (std::uint32_t t = 1; t <= kb.trace_count(); ++t) out.push_back(kb.case_id(TraceId{t}));
        return out;
      })
      .def(
          "count",
          [](const KnowledgeBase& kb, const std::string& label, const std::string& case_id) -> std::uint32_t {
            auto id = kb.trace_id(case_id);
            if (!id) throw py::key_error("unknown case " + case_id);
            auto l = kb.label_id(label);
            return l ? kb.count(*l, *id) : 0;
          },
          py::arg("label"), py::arg("case_id"))
      .def("act_csv", [](const KnowledgeBase& kb) { return capture([&](auto& o) { write_act_csv(kb, o); }); })
      .def("count_csv", [](const KnowledgeBase& kb) { return capture([&](auto& o) { write_count_csv(kb, o); }); })
      .def("to_json", [](const KnowledgeBase& kb) { return capture([&](auto& o) { write_kb_json(kb, o); }); });

  m.def(
      "check",
      [](const KnowledgeBase& kb, const DeclareModel& model, unsigned threads) {
        py::gil_scoped_release release;
        return check_model(kb, model, threads).holds;
      },
      py::arg("kb"), py::arg("model"), py::arg("threads") = 1,
      "Truth value per constraint and trace, rows in model order.");

  m.def(
      "align",
      [](const KnowledgeBase& kb, const DeclareModel& model, double c, unsigned threads) {
        AlignmentReport r;
        {
          py::gil_scoped_release release;
          r = align_model(kb, model, c, threads);
        }
        py::list per_constraint;
        for (const auto& set : r.per_constraint) {
          py::dict d;
          for (const auto& [id, w] : set) d[py::str(kb.case_id(id))] = w;
          per_constraint.append(d);
        }
        py::dict aggregate;
        for (std::uint32_t t = 1; t <= kb.trace_count(); ++t)
          aggregate[py::str(kb.case_id(TraceId{t}))] = r.per_trace[t - 1];
        py::dict out;
        out["per_constraint"] = per_constraint;
        out["aggregate"] = aggregate;
        out["sat_count"] = r.sat_count;
        out["total"] = r.total;
        return out;
      },
      py::arg("kb"), py::arg("model"), py::arg("c") = 0.5, py::arg("threads") = 1,
      "Graded alignment per constraint (keyed by case id) and the per-trace aggregate.");

  m.def(
      "mine",
      [](const KnowledgeBase& kb, double c, unsigned threads) {
        std::vector<MineResult> results;
        {
          py::gil_scoped_release release;
          results = mine(kb, c, threads);
        }
        std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
        for (const auto& r : results) out.emplace_back(r.constraint.to_string(), r.support, r.total);
        return out;
      },
      py::arg("kb"), py::arg("c") = 0.5, py::arg("threads") = 1,
      "(constraint, support, total) for every candidate of the template grid.");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "declare-kb");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process; returns (exit code, stdout, stderr).");
}
