#include <doctest.h>

#include <cmath>
#include <random>

#include "dkb/align.hpp"
#include "dkb/errors.hpp"
#include "dkb/ground.hpp"
#include "dkb/mine.hpp"
#include "oracles.hpp"

using namespace dkb;

namespace {

KnowledgeBase example_kb() { return KnowledgeBase::build(oracle::example_log()); }
const std::vector<std::string> kExample{"aaab", "bbbba", "cbcbc"};
constexpr TraceId T1{1}, T2{2}, T3{3};

WeightedSet random_set(std::mt19937_64& rng, std::uint32_t traces) {
  WeightedSet s;
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (std::uint32_t t = 1; t <= traces; ++t)
    if (rng() % 2) s.insert(TraceId{t}, rng() % 5 == 0 ? 1.0 : w(rng));
  return s;
}

void check_bounded(const WeightedSet& s) {
  for (const auto& [id, w] : s) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
  }
}

}  // namespace

TEST_CASE("w_union") {
  CHECK(w_union({{T1, 1}}, {{T2, 0.5}}) == WeightedSet{{T1, 1}, {T2, 0.5}});
  CHECK(w_union({{T1, 1}}, {}) == WeightedSet{{T1, 1}});
  try {
    w_union({{T1, 1}}, {{T1, 0.3}});
    FAIL("expected a disjointness violation");
  } catch (const DisjointnessViolation& e) {
    CHECK(e.trace_id() == 1);
  }
}

TEST_CASE("w_product_intersect") {
  WeightedSet r = w_product_intersect({{T1, 0.5}, {T2, 1}}, {{T1, 0.4}});
  REQUIRE(r.size() == 1);
  CHECK(*r.find(T1) == doctest::Approx(0.2).epsilon(1e-15));
  WeightedSet a{{T1, 0.3}, {T3, 0.9}};
  CHECK(w_product_intersect(a, {}).empty());
  CHECK(w_product_intersect(a, {{T1, 1}, {T3, 1}}) == a);
}

TEST_CASE("w_avg_intersect") {
  std::vector<WeightedSet> two{{{T1, 1}}, {{T1, 0.5}, {T2, 1}}};
  CHECK(w_avg_intersect(two) == WeightedSet{{T1, 0.75}, {T2, 0.5}});
  WeightedSet a{{T1, 0.3}, {T2, 0.7}};
  CHECK(w_avg_intersect(std::vector<WeightedSet>{a}) == a);
  CHECK(w_avg_intersect(std::vector<WeightedSet>(4, WeightedSet{{T1, 0.5}, {T2, 0.25}})) ==
        WeightedSet{{T1, 0.5}, {T2, 0.25}});
  CHECK_THROWS_AS(w_avg_intersect(std::vector<WeightedSet>{}), std::invalid_argument);
}

TEST_CASE("weighted set rejects bad entries") {
  WeightedSet s;
  CHECK_THROWS_AS(s.insert(T1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(s.insert(T1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(s.insert(T1, std::nan("")), std::invalid_argument);
  s.insert(T1, 0.0);
  CHECK_THROWS_AS(s.insert(T1, 0.5), std::invalid_argument);
}

TEST_CASE("algebra properties") {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 500; ++round) {
    WeightedSet a = random_set(rng, 8), b = random_set(rng, 8);
    WeightedSet p = w_product_intersect(a, b);
    check_bounded(p);
    CHECK(p == w_product_intersect(b, a));
    for (const auto& [id, w] : p) CHECK(w == *a.find(id) * *b.find(id));

    std::vector<WeightedSet> sets;
    int n = 1 + int(rng() % 5);
    for (int i = 0; i < n; ++i) sets.push_back(random_set(rng, 8));
    WeightedSet avg = w_avg_intersect(sets);
    check_bounded(avg);
    for (std::uint32_t t = 1; t <= 8; ++t) {
      double sum = 0;
      bool any = false;
      for (const auto& s : sets) {
        sum += s.weight_or_zero(TraceId{t});
        any = any || s.contains(TraceId{t});
      }
      CHECK(avg.contains(TraceId{t}) == any);
      if (any) CHECK(*avg.find(TraceId{t}) == doctest::Approx(sum / n).epsilon(1e-15));
    }

    // boolean sets average to the satisfied fraction
    std::vector<WeightedSet> bools;
    std::vector<int> sat(9, 0);
    for (int i = 0; i < n; ++i) {
      WeightedSet s;
      for (std::uint32_t t = 1; t <= 8; ++t) {
        bool ok = rng() % 2;
        s.insert(TraceId{t}, ok ? 1.0 : 0.0);
        sat[t] += ok;
      }
      bools.push_back(s);
    }
    WeightedSet frac = w_avg_intersect(bools);
    for (std::uint32_t t = 1; t <= 8; ++t)
      CHECK(std::abs(*frac.find(TraceId{t}) - double(sat[t]) / n) <= 1e-12);

    // disjoint split re-unites
    WeightedSet left, right;
    for (const auto& [id, w] : a) (index(id) % 2 ? left : right).insert(id, w);
    CHECK(w_union(left, right) == a);
  }
}

TEST_CASE("exists and notexists") {
  KnowledgeBase kb = example_kb();
  CHECK(exists_set(kb, "a", 1) == WeightedSet{{T1, 1}, {T2, 1}});
  CHECK(notexists_set(kb, "a", 1) == WeightedSet{{T3, 1}});
  CHECK(exists_set(kb, "d", 1).empty());
  CHECK(notexists_set(kb, "d", 0.4) == WeightedSet{{T1, 0.4}, {T2, 0.4}, {T3, 0.4}});
}

TEST_CASE("align_init") {
  KnowledgeBase kb = example_kb();
  CHECK(align_init(kb, "a") == WeightedSet{{T1, 1.0}, {T2, 0.0}});
  CHECK(align_init(kb, "c") == WeightedSet{{T3, 1.0}});
  CHECK(align_init(kb, "d").empty());
  WeightedSet b = align_init(kb, "b");
  CHECK(*b.find(T1) == 0.0);
  CHECK(*b.find(T2) == 1.0);
  CHECK(*b.find(T3) == 0.75);
  KnowledgeBase single = KnowledgeBase::build(oracle::log_of({"a"}));
  CHECK(align_init(single, "a") == WeightedSet{{T1, 1.0}});
}

TEST_CASE("align_end") {
  KnowledgeBase kb = example_kb();
  CHECK(align_end(kb, "b") == WeightedSet{{T1, 1.0}, {T2, 0.75}, {T3, 0.75}});
  WeightedSet a = align_end(kb, "a");
  CHECK(a.size() == 2);
  CHECK(*a.find(T2) == 1.0);
  CHECK(*a.find(T1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  KnowledgeBase single = KnowledgeBase::build(oracle::log_of({"a"}));
  CHECK(align_end(single, "a") == WeightedSet{{T1, 1.0}});
}

TEST_CASE("align_exactly and align_existence") {
  KnowledgeBase kb = example_kb();
  WeightedSet ex = align_exactly(kb, "a", 3);
  CHECK(*ex.find(T1) == 1.0);
  CHECK(std::abs(*ex.find(T2) - 0.6) <= 1e-12);
  CHECK(std::abs(*ex.find(T3) - 0.4) <= 1e-12);
  for (std::uint32_t n = 0; n <= 5; ++n)
    for (const auto& [id, w] : align_exactly(kb, "b", n))
      if (kb.count(*kb.label_id("b"), id) == n) CHECK(w == 1.0);

  CHECK(align_existence(kb, "b", 2) == WeightedSet{{T1, 0.75}, {T2, 1.0}, {T3, 1.0}});
  CHECK(align_existence(kb, "a", 0) == WeightedSet{{T1, 1.0}, {T2, 1.0}, {T3, 1.0}});
  // counts 0, 0, 3 over lengths 4, 5, 5
  CHECK(align_existence(kb, "c", 1) == WeightedSet{{T1, 0.75}, {T2, 0.8}, {T3, 1.0}});

  KnowledgeBase empty = KnowledgeBase::build(oracle::log_of({""}));
  CHECK(align_exactly(empty, "a", 2) == WeightedSet{{T1, 0.0}});
  CHECK(align_exactly(empty, "a", 0) == WeightedSet{{T1, 1.0}});
  CHECK(align_existence(empty, "a", 1) == WeightedSet{{T1, 0.0}});

  // far from n: clamped at 0
  KnowledgeBase short_kb = KnowledgeBase::build(oracle::log_of({"ab"}));
  CHECK(align_exactly(short_kb, "a", 7) == WeightedSet{{T1, 0.0}});
}

TEST_CASE("align_resp_existence") {
  KnowledgeBase kb = example_kb();
  CHECK(align_resp_existence(kb, "a", "b", {}, 0.3) == WeightedSet{{T1, 1}, {T2, 1}, {T3, 1}});
  CHECK(align_resp_existence(kb, "b", "d", {}, 0.3) == WeightedSet{{T1, 0.3}, {T2, 0.3}, {T3, 0.3}});
  CHECK(align_resp_existence(kb, "d", "b", {}, 0.3) == WeightedSet{{T1, 1}, {T2, 1}, {T3, 1}});
  CHECK_THROWS_AS(align_resp_existence(kb, "a", "b", {}, 1.5), std::invalid_argument);
}

TEST_CASE("resp_existence: activation present but predicate never holds scores 1") {
  Log log;
  log.add_trace({"1", {}, {{"a", {{"x", Value::num(9)}}, {}}}, {}});
  log.add_trace({"2", {}, {{"a", {{"x", Value::num(1)}}, {}}}, {}});
  log.declare_labels(std::vector<std::string>{"b"});
  KnowledgeBase kb = KnowledgeBase::build(log);
  DataPredicate p = parse_predicate("x <= 5");
  CHECK(align_resp_existence(kb, "a", "b", p, 0.2) == WeightedSet{{T1, 1.0}, {T2, 0.2}});
}

TEST_CASE("predicates restrict activations in every graded template") {
  Log log;
  log.add_trace({"1", {}, {{"a", {{"x", Value::num(1)}}, {}}, {"a", {{"x", Value::num(7)}}, {}}, {"b", {}, {}}}, {}});
  log.add_trace({"2", {}, {{"a", {{"x", Value::num(8)}}, {}}}, {}});
  KnowledgeBase kb = KnowledgeBase::build(log);
  DataPredicate big = parse_predicate("x >= 5");
  CHECK(align_init(kb, "a", big) == WeightedSet{{T1, 0.5}, {T2, 1.0}});
  CHECK(align_end(kb, "a", big) == WeightedSet{{T1, 0.5}, {T2, 1.0}});
  CHECK(align_exactly(kb, "a", 2, big) == WeightedSet{{T1, 1.0 - 1.0 / 3.0}, {T2, 0.0}});
  CHECK(align_existence(kb, "a", 1, big) == WeightedSet{{T1, 1.0}, {T2, 1.0}});
}

TEST_CASE("graded templates against string oracles") {
  const auto words = oracle::all_words("abc", 4);
  Log log;
  for (std::size_t i = 0; i < words.size(); ++i) log.add_trace(oracle::trace_of(std::to_string(i), words[i]));
  KnowledgeBase kb = KnowledgeBase::build(log);
  for (char a : std::string("abc")) {
    const std::string la(1, a);
    WeightedSet init = align_init(kb, la), end = align_end(kb, la);
    std::vector<WeightedSet> exact, exist;
    for (std::uint32_t n = 0; n <= 4; ++n) {
      exact.push_back(align_exactly(kb, la, n));
      exist.push_back(align_existence(kb, la, n));
    }
    for (std::uint32_t t = 1; t <= words.size(); ++t) {
      const std::string& w = words[t - 1];
      const TraceId id{t};
      CHECK(init.find(id).value_or(-1) == doctest::Approx(oracle::init(w, a)).epsilon(1e-12));
      CHECK(end.find(id).value_or(-1) == doctest::Approx(oracle::end(w, a)).epsilon(1e-12));
      for (std::uint32_t n = 0; n <= 4; ++n) {
        CHECK(*exact[n].find(id) == doctest::Approx(oracle::exactly(w, a, n)).epsilon(1e-12));
        CHECK(*exist[n].find(id) == doctest::Approx(oracle::existence(w, a, n)).epsilon(1e-12));
      }
    }
    for (char b : std::string("abc")) {
      if (a == b) continue;
      const std::string lb(1, b);
      for (double c : {0.0, 0.3, 1.0}) {
        WeightedSet re = align_resp_existence(kb, la, lb, {}, c);
        CHECK(re.size() == words.size());
        for (std::uint32_t t = 1; t <= words.size(); ++t)
          CHECK(*re.find(TraceId{t}) == oracle::resp_existence(words[t - 1], a, b, c));
      }
    }
  }
}

TEST_CASE("resp_existence at the extremes of c") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 60; ++round) {
    Log log;
    for (int i = 0; i < 6; ++i) {
      Trace t;
      t.case_id = std::to_string(i);
      int n = int(rng() % 5);
      for (int e = 0; e < n; ++e)
        t.events.push_back({std::string(1, char('a' + rng() % 3)), {{"x", Value::num(double(rng() % 4))}}, {}});
      log.add_trace(std::move(t));
    }
    log.declare_labels(std::vector<std::string>{"a", "b", "c"});
    KnowledgeBase kb = KnowledgeBase::build(log);
    DataPredicate p = round % 2 ? parse_predicate("x <= 1") : DataPredicate{};
    DeclareConstraint c{Template::RespExistence, "a", "b", p, 1};
    FormulaEvaluator ev(to_ltlf(c), kb);
    WeightedSet one = align_resp_existence(kb, "a", "b", p, 1.0);
    WeightedSet zero = align_resp_existence(kb, "a", "b", p, 0.0);
    for (std::uint32_t t = 1; t <= kb.trace_count(); ++t) {
      CHECK(*one.find(TraceId{t}) == 1.0);
      CHECK(*zero.find(TraceId{t}) == (ev.holds(TraceId{t}) ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("align_existence is monotone in the count") {
  for (std::size_t len = 1; len <= 8; ++len)
    for (std::uint32_t n = 0; n <= 9; ++n) {
      double prev = -1;
      for (std::size_t count = 0; count <= len; ++count) {
        std::string w = std::string(count, 'a') + std::string(len - count, 'b');
        KnowledgeBase kb = KnowledgeBase::build(oracle::log_of({w}));
        double wgt = align_existence(kb, "a", n).weight_or_zero(T1);
        CHECK(wgt >= prev);
        prev = wgt;
      }
    }
}

TEST_CASE("align_constraint dispatch") {
  KnowledgeBase kb = example_kb();
  CHECK(align_constraint(kb, parse_constraint("Exactly[a,3]"), 0.5) == align_exactly(kb, "a", 3));
  CHECK(align_constraint(kb, parse_constraint("Response[a,b]"), 0.5).find(T1) == 1.0);
  CHECK(align_constraint(kb, parse_constraint("Init[b]"), 0.5) == WeightedSet{{T1, 0.0}, {T2, 1.0}, {T3, 0.75}});
  CHECK(align_constraint(kb, parse_constraint("Absence[c]"), 0.5) == WeightedSet{{T1, 1}, {T2, 1}, {T3, 0}});
}

TEST_CASE("align_model") {
  KnowledgeBase kb = example_kb();
  DeclareModel m{{parse_constraint("Exactly[a,3]"), parse_constraint("End[b]")}};
  AlignmentReport r = align_model(kb, m, 0.5);
  CHECK(r.aggregate(T1) == 1.0);
  CHECK(std::abs(r.aggregate(T2) - 0.675) <= 1e-12);
  CHECK(std::abs(r.aggregate(T3) - 0.575) <= 1e-12);
  CHECK(r.sat_count == std::vector<std::uint32_t>{2, 0, 0});

  DeclareModel one{{parse_constraint("Existence[b,2]")}};
  AlignmentReport r1 = align_model(kb, one, 0.5);
  WeightedSet as_set;
  for (std::uint32_t t = 1; t <= 3; ++t) as_set.insert(TraceId{t}, r1.aggregate(TraceId{t}));
  CHECK(as_set == align_existence(kb, "b", 2));

  // absent traces count as 0
  AlignmentReport r2 = align_model(kb, DeclareModel{{parse_constraint("Init[c]")}}, 0.5);
  CHECK(r2.per_trace == std::vector<double>{0.0, 0.0, 1.0});

  CHECK_THROWS_AS(align_model(kb, DeclareModel{}, 0.5), std::invalid_argument);
}

TEST_CASE("MAX-SAT bridge on random models") {
  std::mt19937_64 rng(2025);
  const auto candidates = candidate_grid({"a", "b", "c"});
  for (int round = 0; round < 40; ++round) {
    std::vector<std::string> words;
    for (int i = 0; i < 8; ++i) {
      std::string w;
      int n = int(rng() % 6);
      for (int j = 0; j < n; ++j) w += char('a' + rng() % 3);
      words.push_back(w);
    }
    Log log = oracle::log_of(words);
    log.declare_labels(std::vector<std::string>{"a", "b", "c"});
    KnowledgeBase kb = KnowledgeBase::build(log);
    for (int m = 0; m < 10; ++m) {
      DeclareModel model;
      int size = 1 + int(rng() % 4);
      for (int i = 0; i < size; ++i) model.constraints.push_back(candidates[rng() % candidates.size()]);
      AlignmentReport r = align_model(kb, model, 0.5);
      for (std::uint32_t t = 1; t <= kb.trace_count(); ++t) {
        const bool sat = model_sat(model, log.traces()[t - 1], kb);
        CHECK((r.aggregate(TraceId{t}) == 1.0) == sat);
        CHECK((r.sat_count[t - 1] == r.total) == sat);
        CHECK(r.aggregate(TraceId{t}) >= 0.0);
        CHECK(r.aggregate(TraceId{t}) <= 1.0);
      }
    }
  }
}

TEST_CASE("align_model is identical for every thread count") {
  std::mt19937_64 rng(6);
  std::vector<std::string> words;
  for (int i = 0; i < 300; ++i) {
    std::string w;
    int n = int(rng() % 9);
    for (int j = 0; j < n; ++j) w += char('a' + rng() % 4);
    words.push_back(w);
  }
  KnowledgeBase kb = KnowledgeBase::build(oracle::log_of(words));
  DeclareModel m;
  for (const auto& c : candidate_grid(kb.labels())) m.constraints.push_back(c);
  AlignmentReport base = align_model(kb, m, 0.4, 1);
  for (unsigned threads : {2u, 3u, 8u, 32u}) {
    AlignmentReport r = align_model(kb, m, 0.4, threads);
    CHECK(r.per_constraint == base.per_constraint);
    CHECK(r.per_trace == base.per_trace);
    CHECK(r.sat_count == base.sat_count);
  }
}
