#include "dkb/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dkb/align.hpp"
#include "dkb/declare.hpp"
#include "dkb/errors.hpp"
#include "dkb/kb.hpp"
#include "dkb/log.hpp"
#include "dkb/mine.hpp"
#include "dkb/parallel.hpp"
#include "dkb/poset.hpp"
#include "dkb/report.hpp"

namespace dkb {
namespace {

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::filesystem::path log_path;
  std::filesystem::path model_path;
  std::filesystem::path hierarchy_path;
  std::filesystem::path output;
  double c = 0.5;
  unsigned threads = 0;
  Format format = Format::Csv;
};

struct UsageError : Error {
  using Error::Error;
};

unsigned threads_from_env() {
  const char* env = std::getenv("DECLARE_KB_THREADS");
  if (!env || !*env) return default_threads();
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError("DECLARE_KB_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

struct Inputs {
  std::shared_ptr<const Hierarchy> hierarchy;
  ValueOrder order;
  Log log;
  DeclareModel model;
  KnowledgeBase kb;
};

Inputs load(const RunConfig& cfg, bool needs_model) {
  Inputs in;
  if (!cfg.hierarchy_path.empty())
    in.hierarchy = std::make_shared<const Hierarchy>(Hierarchy::load(cfg.hierarchy_path));
  in.order = ValueOrder(in.hierarchy);
  if (!std::filesystem::exists(cfg.log_path))
    throw UsageError("log file '" + cfg.log_path.string() + "' does not exist");
  in.log = parse_log(cfg.log_path, detect_log_format(cfg.log_path), in.order);
  if (needs_model) {
    if (cfg.model_path.empty()) throw UsageError(cfg.command + " needs --model");
    in.model = parse_model(cfg.model_path, in.order);
    in.log.declare_labels(in.model.labels());
  }
  in.kb = KnowledgeBase::build(in.log, build_poset(in.log, in.hierarchy));
  return in;
}

/// Sends a report to --output when given, otherwise to `out`.
template <typename Fn>
void emit(const RunConfig& cfg, std::ostream& out, Fn&& write) {
  if (cfg.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + cfg.output.string() + "'");
  write(file);
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load(cfg, true);
  CheckReport r = check_model(in.kb, in.model, cfg.threads);
  emit(cfg, out, [&](std::ostream& o) {
    if (cfg.format == Format::Json)
      write_check_json(in.kb, in.model, r, o);
    else
      write_check_csv(in.kb, in.model, r, o);
  });
  return r.all_satisfied() ? 0 : 1;
}

int cmd_align(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load(cfg, true);
  if (in.model.empty()) throw UsageError("align needs a model with at least one constraint");
  AlignmentReport r = align_model(in.kb, in.model, cfg.c, cfg.threads);
  emit(cfg, out, [&](std::ostream& o) {
    if (cfg.format == Format::Json)
      write_alignment_json(in.kb, in.model, r, o);
    else
      write_alignment_csv(in.kb, in.model, r, o);
  });
  return 0;
}

int cmd_dump_kb(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load(cfg, false);
  if (cfg.output.empty()) {
    if (cfg.format == Format::Json) {
      write_kb_json(in.kb, out);
    } else {
      write_act_csv(in.kb, out);
      out << '\n';
      write_count_csv(in.kb, out);
    }
    return 0;
  }
  // --output names a directory for the table files
  std::filesystem::create_directories(cfg.output);
  auto write_file = [](const std::filesystem::path& p, auto&& fn) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + p.string() + "'");
    fn(f);
  };
  if (cfg.format == Format::Json) {
    write_file(cfg.output / "kb.json", [&](std::ostream& o) { write_kb_json(in.kb, o); });
  } else {
    write_file(cfg.output / "act.csv", [&](std::ostream& o) { write_act_csv(in.kb, o); });
    write_file(cfg.output / "count.csv", [&](std::ostream& o) { write_count_csv(in.kb, o); });
  }
  return 0;
}

int cmd_mine(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load(cfg, false);
  auto results = mine(in.kb, cfg.c, cfg.threads);
  emit(cfg, out, [&](std::ostream& o) {
    if (cfg.format == Format::Json)
      write_mine_json(results, o);
    else
      write_mine_csv(results, o);
  });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Declare conformance checking, alignment and mining over an in-memory log store",
               "declare-kb"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<unsigned> threads;
  bool json_flag = false;
  std::map<std::string, Format> formats{{"csv", Format::Csv}, {"json", Format::Json}};

  auto add_common = [&](CLI::App* sub, bool model) {
    sub->add_option("--log", cfg.log_path, "event log (.jsonl, or compact case:labels lines)")->required();
    if (model) sub->add_option("--model", cfg.model_path, "Declare model, one constraint per line")->required();
    sub->add_option("--hierarchy", cfg.hierarchy_path, "is-a hierarchy, `child <= parent` per line");
    sub->add_option("--c", cfg.c, "weight of an activated RespExistence whose target is missing")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--threads", threads, "worker threads (default: DECLARE_KB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_flag("--json", json_flag, "same as --format json");
    sub->add_option("--output", cfg.output, "output file (a directory for dump-kb)");
  };
  add_common(app.add_subcommand("check", "report which traces satisfy every constraint"), true);
  add_common(app.add_subcommand("align", "per-trace alignment scores and MAX-SAT aggregate"), true);
  add_common(app.add_subcommand("dump-kb", "print the Act and CountTemplate tables"), false);
  add_common(app.add_subcommand("mine", "support of every candidate constraint over the alphabet"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (json_flag) cfg.format = Format::Json;
  try {
    cfg.threads = threads ? *threads : threads_from_env();
    if (cfg.command == "check") return cmd_check(cfg, out);
    if (cfg.command == "align") return cmd_align(cfg, out);
    if (cfg.command == "dump-kb") return cmd_dump_kb(cfg, out);
    return cmd_mine(cfg, out);
  } catch (const std::exception& e) {
    err << "declare-kb: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace dkb
