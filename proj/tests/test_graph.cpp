#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hunt/graph.hpp"
#include "hunt/util.hpp"
#include "synth.hpp"

using namespace hunt;

namespace {

Node proc(const std::string& id, const std::string& name = "p") {
  Node n;
  n.id = id;
  n.kind = NodeKind::Process;
  n.attrs = {{"name", name}};
  return n;
}

Node file(const std::string& id, const std::string& name = "f") {
  Node n;
  n.id = id;
  n.kind = NodeKind::File;
  n.attrs = {{"file_name", name}};
  return n;
}

}  // namespace

TEST_CASE("add_node base cases") {
  Graph g;
  g.add_node(proc("p1"));
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 0);

  CHECK_THROWS_AS(g.add_node(proc("p1")), GraphError);

  g.add_node(proc("p2"));
  g.add_edge("p1", "p2", Relation::Fork);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("attribute values are lowercased, keys validated") {
  Graph g;
  Node n = file("f1", "C:\\Windows\\NOTEPAD.EXE");
  g.add_node(n);
  CHECK(*g.node("f1").attrs.at("file_name") == "c:\\windows\\notepad.exe");

  Node bad = file("f2");
  bad.attrs["name"] = "nope";  // process-only key
  CHECK_THROWS_AS(g.add_node(bad), GraphError);
}

TEST_CASE("matched_iocs implies suspicious") {
  Graph g;
  Node n = proc("p1");
  n.matched_iocs = {"i1"};
  g.add_node(n);
  CHECK(g.node("p1").suspicious);
}

TEST_CASE("add_edge relation/kind validation") {
  Graph g;
  g.add_node(proc("p1"));
  g.add_node(file("f1"));
  CHECK_NOTHROW(g.add_edge("p1", "f1", Relation::Read));
  // subjects are processes
  CHECK_THROWS_AS(g.add_edge("f1", "f1", Relation::Read), GraphError);
  // registry row only accepts RegWrite
  Node r;
  r.id = "r1";
  r.kind = NodeKind::Registry;
  r.attrs = {{"key_name", "hklm\\x"}};
  g.add_node(r);
  CHECK_NOTHROW(g.add_edge("p1", "r1", Relation::RegWrite));
  CHECK_THROWS_AS(g.add_edge("p1", "r1", Relation::Write), GraphError);
  CHECK_THROWS_AS(g.add_edge("p1", "missing", Relation::Fork), GraphError);
}

TEST_CASE("neighbors") {
  Graph g;
  g.add_node(proc("c"));
  g.add_node(proc("iso"));
  g.add_node(file("f1"));
  g.add_node(file("f2"));
  g.add_node(file("f3"));
  g.add_edge("c", "f1", Relation::Read);
  g.add_edge("c", "f2", Relation::Write);
  g.add_edge("c", "f3", Relation::Read);

  CHECK(g.neighbors("iso", Direction::Both).empty());
  CHECK(g.neighbors("c", Direction::Out).size() == 3);
  CHECK(g.neighbors("f1", Direction::Out).empty());
  CHECK(g.neighbors("f1", Direction::In).size() == 1);
  CHECK_THROWS_AS(g.neighbors("missing", Direction::Both), GraphError);

  // deterministic order: sorted by id then relation
  auto nb = g.neighbors("c", Direction::Out);
  CHECK(nb[0].first == "f1");
  CHECK(nb[1].first == "f2");
  CHECK(nb[2].first == "f3");
}

TEST_CASE("paths_up_to length bound and base cases") {
  Graph g;
  for (auto id : {"a", "b", "c", "d", "e"}) g.add_node(proc(id, id));
  g.add_edge("a", "b", Relation::Fork);
  g.add_edge("b", "c", Relation::Fork);
  g.add_edge("c", "d", Relation::Fork);
  g.add_edge("d", "e", Relation::Fork);

  auto paths = g.paths_up_to("a", 3);
  std::size_t longest = 0;
  for (const auto& p : paths) longest = std::max(longest, p.size());
  CHECK(longest == 4);  // a,b,c,d

  Graph iso;
  iso.add_node(proc("x"));
  auto only = iso.paths_up_to("x", 3);
  REQUIRE(only.size() == 1);
  CHECK(only[0] == std::vector<std::string>{"x"});

  CHECK_THROWS_AS(g.paths_up_to("missing", 3), GraphError);
}

TEST_CASE("paths_up_to diamond enumerates exactly the hand-derived set") {
  Graph g;
  for (auto id : {"a", "b", "c", "d"}) g.add_node(proc(id, id));
  g.add_edge("a", "b", Relation::Fork);
  g.add_edge("a", "c", Relation::Fork);
  g.add_edge("b", "d", Relation::Fork);
  g.add_edge("c", "d", Relation::Fork);

  auto paths = g.paths_up_to("a", 2);
  std::set<std::vector<std::string>> got(paths.begin(), paths.end());
  std::set<std::vector<std::string>> expect{
      {"a"}, {"a", "b"}, {"a", "b", "d"}, {"a", "c"}, {"a", "c", "d"}};
  CHECK(got == expect);
}

TEST_CASE("json round-trip is structurally identical and byte-stable") {
  Rng rng(7);
  for (int i = 0; i < 25; ++i) {
    Graph g = synth::random_graph(rng, 12);
    std::string j1 = graph_to_json(g);
    Graph back = graph_from_json(j1);
    std::string j2 = graph_to_json(back);
    CHECK(j1 == j2);
    CHECK(back.node_count() == g.node_count());
    CHECK(back.edge_count() == g.edge_count());
  }
}

TEST_CASE("json null attributes survive round-trip") {
  Graph g;
  Node n = proc("p1");
  n.attrs["args"] = std::nullopt;
  g.add_node(n);
  Graph back = graph_from_json(graph_to_json(g));
  CHECK(back.node("p1").attrs.at("args") == std::nullopt);
}

TEST_CASE("multi-edges and cycles are allowed") {
  Graph g;
  g.add_node(proc("p1"));
  g.add_node(proc("p2"));
  g.add_node(file("f"));
  g.add_edge("p1", "f", Relation::Read);
  g.add_edge("p1", "f", Relation::Read);
  g.add_edge("p1", "p2", Relation::Fork);
  g.add_edge("p2", "p1", Relation::Fork);  // cycle at entity granularity
  CHECK(g.edge_count() == 4);
  // traversal with a cycle terminates
  CHECK(g.paths_up_to("p1", 3).size() >= 1);
}
