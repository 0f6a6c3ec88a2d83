#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dkb/cli.hpp"
#include "dkb/report.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = DKB_TEST_DATA_DIR;
const fs::path kGolden = DKB_TEST_GOLDEN_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "declare-kb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = dkb::run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("dkb_cli_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

const std::string kLog = (kData / "example.log").string();

}  // namespace

TEST_CASE("dump-kb matches the golden tables") {
  TempDir dir;
  Run r = run({"dump-kb", "--log", kLog, "--output", (dir.path / "kb").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir.path / "kb" / "act.csv") == slurp(kGolden / "act.csv"));
  CHECK(slurp(dir.path / "kb" / "count.csv") == slurp(kGolden / "count.csv"));

  Run stdout_run = run({"dump-kb", "--log", kLog});
  CHECK(stdout_run.out == slurp(kGolden / "act.csv") + "\n" + slurp(kGolden / "count.csv"));

  Run json = run({"dump-kb", "--log", kLog, "--format", "json"});
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["act"].size() == 14);
  CHECK(j["act"][3]["next"] == "+inf");
  CHECK(j["act"][3]["prev"] == 9);
  CHECK(j["count"].size() == 9);
}

TEST_CASE("dump-kb on an empty log writes headers only") {
  TempDir dir;
  auto log = dir.write("empty.log", "");
  Run r = run({"dump-kb", "--log", log.string(), "--output", (dir.path / "kb").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir.path / "kb" / "act.csv") == "act,sigma_id,time,next,prev\n");
  CHECK(slurp(dir.path / "kb" / "count.csv") == "act,sigma_id,count\n");
}

TEST_CASE("check") {
  TempDir dir;
  Run exactly = run({"check", "--log", kLog, "--model", dir.write("m1", "Exactly[a,3]\n").string()});
  CHECK(exactly.code == 1);
  CHECK(exactly.out.find("trace_id,satisfied\n1,true\n2,false\n3,false\n") != std::string::npos);

  Run empty = run({"check", "--log", kLog, "--model", dir.write("m2", "# nothing\n").string()});
  CHECK(empty.code == 0);

  Run exist = run({"check", "--log", kLog, "--model", dir.write("m3", "Existence[b,1]\n").string()});
  CHECK(exist.code == 0);
  CHECK(exist.out.find("1,true\n2,true\n3,true\n") != std::string::npos);

  Run json = run({"check", "--log", kLog, "--model", dir.write("m4", "Exactly[a,3]\n").string(), "--json"});
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["all_satisfied"] == false);
  CHECK(j["traces"][0]["satisfied"] == true);
}

TEST_CASE("align") {
  TempDir dir;
  auto model = dir.write("m", "Exactly[a,3]\nEnd[b]\n");
  Run r = run({"align", "--log", kLog, "--model", model.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "constraint_index,template,trace_id,score\n"
        "0,\"Exactly[a,3]\",1,1\n"
        "0,\"Exactly[a,3]\",2,0.6\n"
        "0,\"Exactly[a,3]\",3,0.4\n"
        "1,End[b],1,1\n"
        "1,End[b],2,0.75\n"
        "1,End[b],3,0.75\n"
        "\n"
        "trace_id,aggregate,sat_count,total\n"
        "1,1,2,2\n"
        "2,0.675,0,2\n"
        "3,0.575,0,2\n");

  Run json = run({"align", "--log", kLog, "--model", model.string(), "--format", "json"});
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["traces"][1]["aggregate"].get<double>() == doctest::Approx(0.675));

  auto out = dir.path / "report.csv";
  Run to_file = run({"align", "--log", kLog, "--model", model.string(), "--output", out.string()});
  CHECK(to_file.out.empty());
  CHECK(slurp(out) == r.out);

  Run empty = run({"align", "--log", kLog, "--model", dir.write("e", "").string()});
  CHECK(empty.code == 2);
}

TEST_CASE("check and align agree") {
  TempDir dir;
  auto model = dir.write("m", "Existence[b,1]\nRespExistence[a,b]\nPrecedence[c,b]\nInit[b]\n");
  Run check = run({"check", "--log", kLog, "--model", model.string(), "--json"});
  Run align = run({"align", "--log", kLog, "--model", model.string(), "--json"});
  auto jc = nlohmann::json::parse(check.out), ja = nlohmann::json::parse(align.out);
  for (std::size_t t = 0; t < 3; ++t)
    CHECK(jc["traces"][t]["satisfied"].get<bool>() == (ja["traces"][t]["aggregate"].get<double>() == 1.0));
}

TEST_CASE("mine") {
  Run r = run({"mine", "--log", kLog});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\nExistence,b,,1,3,3,1\n") != std::string::npos);
  CHECK(r.out.find("\nInit,a,,,1,3,0.3333333333333333\n") != std::string::npos);
  CHECK(r.out.find("\nRespExistence,c,b,,3,3,1\n") != std::string::npos);
  for (const char* threads : {"1", "2", "8"})
    CHECK(run({"mine", "--log", kLog, "--threads", threads}).out == r.out);
  Run json = run({"mine", "--log", kLog, "--json"});
  CHECK(nlohmann::json::parse(json.out).size() == 9 + 18 + 18);
}

TEST_CASE("payload logs, hierarchies and predicates end to end") {
  TempDir dir;
  auto log = dir.write("l.jsonl",
                       R"({"case": "o1", "events": [{"act": "order", "payload": {"item": "sparrow", "qty": 3}}, {"act": "ship"}]})"
                       "\n"
                       R"({"case": "o2", "events": [{"act": "order", "payload": {"item": "rock", "qty": 9}}]})"
                       "\n");
  auto hier = dir.write("h.txt", "sparrow <= bird\nbird <= animal\nrock\n");
  auto model = dir.write("m", "RespExistence[order,ship] | item <= animal\n");
  Run r = run({"check", "--log", log.string(), "--model", model.string(), "--hierarchy", hier.string()});
  CHECK(r.code == 0);  // o2 orders a rock, which is not an animal: vacuous
  auto model2 = dir.write("m2", "RespExistence[order,ship] | qty <= 10\n");
  Run r2 = run({"check", "--log", log.string(), "--model", model2.string(), "--hierarchy", hier.string()});
  CHECK(r2.code == 1);
  CHECK(r2.out.find("o2,false") != std::string::npos);
}

TEST_CASE("usage and input errors exit with 2") {
  TempDir dir;
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"check", "--log", kLog}).code == 2);
  CHECK(run({"dump-kb", "--log", (dir.path / "none.log").string()}).code == 2);
  CHECK(run({"align", "--log", kLog, "--model", dir.write("m", "Exactly[a,3]\n").string(), "--c", "2"}).code == 2);
  CHECK(run({"mine", "--log", kLog, "--threads", "0"}).code == 2);
  CHECK(run({"mine", "--log", kLog, "--format", "xml"}).code == 2);
  Run bad_model = run({"check", "--log", kLog, "--model", dir.write("bad", "Init[a]\nFoo[a]\n").string()});
  CHECK(bad_model.code == 2);
  CHECK(bad_model.err.find("Foo") != std::string::npos);
  Run bad_log = run({"dump-kb", "--log", dir.write("bad.log", "1:ab\n1:cd\n").string()});
  CHECK(bad_log.code == 2);
  CHECK(bad_log.err.find("duplicate case id") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("DECLARE_KB_THREADS") {
  ::setenv("DECLARE_KB_THREADS", "3", 1);
  CHECK(run({"mine", "--log", kLog}).code == 0);
  ::setenv("DECLARE_KB_THREADS", "zero", 1);
  CHECK(run({"mine", "--log", kLog}).code == 2);
  CHECK(run({"mine", "--log", kLog, "--threads", "2"}).code == 0);
  ::unsetenv("DECLARE_KB_THREADS");
}

TEST_CASE("format_time truncates") {
  CHECK(dkb::format_time(0.0) == "0.00");
  CHECK(dkb::format_time(1.0 / 3.0) == "0.33");
  CHECK(dkb::format_time(2.0 / 3.0) == "0.66");
  CHECK(dkb::format_time(0.29) == "0.29");
  CHECK(dkb::format_time(1.0) == "1.00");
  CHECK(dkb::csv_field("a,b") == "\"a,b\"");
  CHECK(dkb::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
