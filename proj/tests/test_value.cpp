#include <doctest.h>

#include <random>
#include <sstream>

#include "dkb/errors.hpp"
#include "dkb/poset.hpp"
#include "dkb/value.hpp"
#include "oracles.hpp"

using namespace dkb;

namespace {

std::shared_ptr<const Hierarchy> chain() {
  // sparrow <= bird <= animal
  return std::make_shared<const Hierarchy>(
      Hierarchy::from_edges({{"sparrow", "bird"}, {"bird", "animal"}}));
}

/// Random DAG: node i may point at any node j > i, so edges never close a cycle.
std::shared_ptr<const Hierarchy> random_dag(std::mt19937_64& rng, int nodes) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> names;
  for (int i = 0; i < nodes; ++i) names.push_back("h" + std::to_string(i));
  std::bernoulli_distribution coin(0.3);
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j)
      if (coin(rng)) edges.emplace_back(names[i], names[j]);
  return std::make_shared<const Hierarchy>(Hierarchy::from_edges(edges, names));
}

std::vector<Value> random_universe(std::mt19937_64& rng, const Hierarchy& h) {
  std::vector<Value> out{Value::bottom(), Value::top()};
  std::uniform_int_distribution<int> kind(0, 2), small(0, 6);
  int n = std::uniform_int_distribution<int>(3, 12)(rng);
  for (int i = 0; i < n; ++i) {
    switch (kind(rng)) {
      case 0: out.push_back(Value::str(std::string(1 + small(rng) % 3, char('a' + small(rng))))); break;
      case 1: out.push_back(Value::num(small(rng) - 3 + 0.5 * small(rng))); break;
      default: {
        NodeId id = std::uniform_int_distribution<NodeId>(0, NodeId(h.size() - 1))(rng);
        out.push_back(Value::hier(id, h.name(id)));
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("leq examples") {
  ValueOrder ord;
  CHECK(ord.leq(Value::str("abc"), Value::str("abd")));
  CHECK_FALSE(ord.leq(Value::str("abd"), Value::str("abc")));
  CHECK_FALSE(ord.leq(Value::num(3.0), Value::str("3")));
  CHECK_FALSE(ord.leq(Value::str("3"), Value::num(3.0)));
  for (const Value& v : {Value::str(""), Value::num(-1e300), Value::top(), Value::bottom()}) {
    CHECK(ord.leq(Value::bottom(), v));
    CHECK(ord.leq(v, Value::top()));
  }
  CHECK_FALSE(ord.leq(Value::top(), Value::bottom()));
}

TEST_CASE("compare examples") {
  ValueOrder ord(chain());
  const auto& h = *ord.hierarchy();
  CHECK(ord.compare(Value::num(1.0), Value::num(1.0)) == Ordering::Equal);
  CHECK(ord.compare(h.value("sparrow"), h.value("animal")) == Ordering::Less);
  CHECK(ord.compare(h.value("animal"), h.value("bird")) == Ordering::Greater);
  CHECK(ord.compare(Value::str("a"), Value::num(0.0)) == Ordering::Incomparable);
}

TEST_CASE("unknown hierarchy nodes are rejected") {
  ValueOrder ord(chain());
  CHECK_THROWS_AS(ord.leq(Value::hier(17, "ghost"), Value::top()), UnknownHierNode);
  CHECK_THROWS_AS(ord.hierarchy()->value("ghost"), UnknownHierNode);
  ValueOrder none;
  CHECK_THROWS_AS(none.leq(Value::hier(0, "x"), Value::hier(0, "x")), UnknownHierNode);
}

TEST_CASE("non-finite numbers are rejected") {
  CHECK_THROWS_AS(Value::num(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(Value::num(HUGE_VAL), std::invalid_argument);
  CHECK(Value::num(-0.0) == Value::num(0.0));
}

TEST_CASE("hierarchy parsing and cycles") {
  std::istringstream in("# taxonomy\nsparrow <= bird\nbird <= animal\nrock\n");
  Hierarchy h = Hierarchy::parse(in);
  CHECK(h.size() == 4);
  CHECK(h.reaches(*h.find("sparrow"), *h.find("animal")));
  CHECK(h.reaches(*h.find("rock"), *h.find("rock")));
  CHECK_FALSE(h.reaches(*h.find("animal"), *h.find("bird")));
  CHECK(h.rank(*h.find("sparrow")) < h.rank(*h.find("animal")));

  CHECK_THROWS_AS(Hierarchy::from_edges({{"a", "b"}, {"b", "a"}}), HierarchyCycle);
  CHECK_THROWS_AS(Hierarchy::from_edges({{"a", "a"}}), HierarchyCycle);
  std::istringstream bad("a <=\n");
  CHECK_THROWS_AS(Hierarchy::parse(bad), ParseError);
}

TEST_CASE("cmp ops reduce to leq") {
  ValueOrder ord;
  auto two = Value::num(2), three = Value::num(3), s = Value::str("x");
  CHECK(ord.holds(two, CmpOp::Lt, three));
  CHECK_FALSE(ord.holds(two, CmpOp::Lt, two));
  CHECK(ord.holds(two, CmpOp::Leq, two));
  CHECK(ord.holds(three, CmpOp::Gt, two));
  CHECK(ord.holds(two, CmpOp::Eq, two));
  // incomparable pairs satisfy only !=
  for (CmpOp op : {CmpOp::Leq, CmpOp::Geq, CmpOp::Eq, CmpOp::Lt, CmpOp::Gt}) CHECK_FALSE(ord.holds(s, op, two));
  CHECK(ord.holds(s, CmpOp::Neq, two));
  CHECK(parse_cmp_op("<=") == CmpOp::Leq);
  CHECK(parse_cmp_op("=") == CmpOp::Eq);
  CHECK_FALSE(parse_cmp_op("=<").has_value());
}

TEST_CASE("build_poset harvests payload values") {
  SUBCASE("numbers and strings") {
    Log log;
    Trace t{"1", {}, {{"a", {{"x", Value::num(5.0)}}, {}}, {"b", {{"y", Value::str("x")}}, {}}}, {}};
    log.add_trace(t);
    ValuePoset p = build_poset(log);
    REQUIRE(p.universe().size() == 4);
    CHECK(p.universe().front() == Value::bottom());
    CHECK(p.universe().back() == Value::top());
    CHECK(p.contains(Value::num(5.0)));
    CHECK(p.contains(Value::str("x")));
  }
  SUBCASE("payload-free log") {
    ValuePoset p = build_poset(oracle::example_log());
    CHECK(p.universe() == std::vector<Value>{Value::bottom(), Value::top()});
  }
  SUBCASE("leq pairs among {2, 3, \"a\"}") {
    Log log;
    log.add_trace({"1", {}, {{"a", {{"k", Value::num(2)}}, {}}, {"a", {{"k", Value::num(3)}}, {}},
                             {"a", {{"k", Value::str("a")}}, {}}}, {}});
    ValuePoset p = build_poset(log);
    std::vector<std::pair<Value, Value>> holding;
    for (const auto& u : p.universe())
      for (const auto& v : p.universe())
        if (!u.is_bound() && !v.is_bound() && p.leq(u, v)) holding.emplace_back(u, v);
    std::vector<std::pair<Value, Value>> expected{{Value::str("a"), Value::str("a")},
                                                  {Value::num(2), Value::num(2)},
                                                  {Value::num(2), Value::num(3)},
                                                  {Value::num(3), Value::num(3)}};
    CHECK(holding == expected);
  }
}

TEST_CASE("hierarchy order is edge reachability") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    auto h = random_dag(rng, 8);
    ValueOrder ord(h);
    // reachability by DFS over the raw parent relation, recomputed here
    for (NodeId a = 0; a < h->size(); ++a)
      for (NodeId b = 0; b < h->size(); ++b)
        CHECK(ord.leq(Value::hier(a, h->name(a)), Value::hier(b, h->name(b))) == h->reaches(a, b));
  }
}

TEST_CASE("partial-order laws on random mixed universes") {
  std::mt19937_64 rng(20240501);
  std::size_t cross_type_pairs = 0;
  for (int round = 0; round < 300; ++round) {
    auto h = random_dag(rng, 6);
    ValueOrder ord(h);
    auto u = random_universe(rng, *h);
    for (const auto& x : u) {
      CHECK(ord.leq(x, x));
      CHECK(ord.leq(Value::bottom(), x));
      CHECK(ord.leq(x, Value::top()));
      for (const auto& y : u) {
        if (ord.leq(x, y) && ord.leq(y, x)) CHECK(x == y);
        if (!x.is_bound() && !y.is_bound() && x.tag() != y.tag()) {
          ++cross_type_pairs;
          CHECK(ord.compare(x, y) == Ordering::Incomparable);
        }
        if (ord.leq(x, y) && !(x == y)) CHECK(ord.storage_less(x, y));
        for (const auto& z : u)
          if (ord.leq(x, y) && ord.leq(y, z)) CHECK(ord.leq(x, z));
      }
    }
  }
  CHECK(cross_type_pairs > 0);
}
