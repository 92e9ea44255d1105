#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "hunt/ingest.hpp"

using namespace hunt;

namespace {

const char* kEvents = R"({"ts":1,"relation":"fork","subject":{"pid":1,"name":"init"},"object":{"kind":"process","pid":2,"name":"miner"}}
{"ts":2,"relation":"read","subject":{"pid":2,"name":"miner"},"object":{"kind":"file","file_name":"minner.exe"}}
{"ts":3,"relation":"read","subject":{"pid":2,"name":"miner"},"object":{"kind":"file","file_name":"minner.exe"}}
)";

}  // namespace

TEST_CASE("parse_events counts and skips") {
  std::istringstream ok(kEvents);
  auto r = parse_events(ok);
  CHECK(r.events.size() == 3);
  CHECK(r.skipped == 0);

  std::istringstream mixed(
      "{\"ts\":1,\"relation\":\"read\",\"subject\":{\"pid\":1,\"name\":\"a\"},"
      "\"object\":{\"kind\":\"file\",\"file_name\":\"x\"}}\n"
      "this is not json\n"
      "{\"ts\":2,\"relation\":\"regwrite\",\"subject\":{\"pid\":1,\"name\":\"a\"},"
      "\"object\":{\"kind\":\"registry\",\"key_name\":\"hklm\\\\r\"}}\n");
  auto m = parse_events(mixed);
  CHECK(m.events.size() == 2);
  CHECK(m.skipped == 1);

  std::istringstream empty("");
  auto e = parse_events(empty);
  CHECK(e.events.empty());
  CHECK(e.skipped == 0);
}

TEST_CASE("relation/object kind mismatch is a malformed line") {
  std::istringstream bad(
      "{\"ts\":1,\"relation\":\"read\",\"subject\":{\"pid\":1,\"name\":\"a\"},"
      "\"object\":{\"kind\":\"registry\",\"key_name\":\"k\"}}\n");
  auto r = parse_events(bad);
  CHECK(r.events.empty());
  CHECK(r.skipped == 1);
}

TEST_CASE("build_graph entity identity and multi-edges") {
  std::istringstream in(kEvents);
  auto events = parse_events(in).events;
  Graph g = build_graph(events);
  // init, miner, minner.exe
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);

  // same process reading same file twice -> 2 parallel Read edges
  std::size_t reads = 0;
  for (const auto& e : g.edges())
    if (e.rel == Relation::Read) ++reads;
  CHECK(reads == 2);
}

TEST_CASE("build_graph is deterministic") {
  std::istringstream a(kEvents), b(kEvents);
  Graph g1 = build_graph(parse_events(a).events);
  Graph g2 = build_graph(parse_events(b).events);
  CHECK(graph_to_json(g1) == graph_to_json(g2));
}

TEST_CASE("mark_suspicious flags, records ids, and is idempotent") {
  std::istringstream in(kEvents);
  Graph g = build_graph(parse_events(in).events);

  auto rules = compile_rules({{"i1", "file_name", "minner\\.exe"}});
  CHECK(mark_suspicious(g, rules) == 1);
  const Node* hit = nullptr;
  for (const auto& n : g.nodes())
    if (n.suspicious) hit = &n;
  REQUIRE(hit != nullptr);
  CHECK(hit->kind == NodeKind::File);
  CHECK(hit->matched_iocs == std::set<std::string>{"i1"});

  // idempotent
  std::string before = graph_to_json(g);
  mark_suspicious(g, rules);
  CHECK(graph_to_json(g) == before);

  // no match
  Graph g2 = g;
  auto none = compile_rules({{"i9", "file_name", "absent\\.bin"}});
  Graph fresh = graph_from_json(graph_to_json(g2));
  CHECK(mark_suspicious(fresh, none) == 0);
}

TEST_CASE("node matching two rules is counted once with both ids") {
  Graph g;
  Node n;
  n.id = "f";
  n.kind = NodeKind::File;
  n.attrs = {{"file_name", "evil_payload.dll"}};
  g.add_node(n);
  auto rules = compile_rules(
      {{"a", "file_name", "evil"}, {"b", "file_name", "payload"}});
  CHECK(mark_suspicious(g, rules) == 1);
  CHECK(g.node("f").matched_iocs == std::set<std::string>{"a", "b"});
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(compile_rules({{"x", "bogus_attr", ".*"}}), GraphError);
  CHECK_THROWS_AS(compile_rules({{"x", "file_name", "("}}), GraphError);
}
