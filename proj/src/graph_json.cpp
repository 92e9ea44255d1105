#include <fstream>

#include "hunt/graph.hpp"
#include "json.hpp"

namespace hunt {

using ordered_json = nlohmann::ordered_json;

std::string graph_to_json(const Graph& g) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const auto& n : g.nodes()) {
    ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = to_string(n.kind);
    ordered_json attrs = ordered_json::object();
    for (const auto& [k, v] : n.attrs) {
      if (v)
        attrs[k] = *v;
      else
        attrs[k] = nullptr;
    }
    jn["attrs"] = attrs;
    if (n.suspicious) jn["suspicious"] = true;
    if (!n.matched_iocs.empty())
      jn["matched_iocs"] =
          std::vector<std::string>(n.matched_iocs.begin(), n.matched_iocs.end());
    doc["nodes"].push_back(jn);
  }
  doc["edges"] = ordered_json::array();
  for (const auto& e : g.edges()) {
    ordered_json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["rel"] = to_string(e.rel);
    if (e.ts) je["ts"] = *e.ts;
    doc["edges"].push_back(je);
  }
  return doc.dump(2) + "\n";
}

Graph graph_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw GraphError(std::string("graph JSON parse error: ") + e.what());
  }
  Graph g;
  for (const auto& jn : doc.at("nodes")) {
    Node n;
    n.id = jn.at("id").get<std::string>();
    n.kind = node_kind_from_string(jn.at("kind").get<std::string>());
    if (jn.contains("attrs"))
      for (const auto& [k, v] : jn.at("attrs").items()) {
        if (v.is_null())
          n.attrs[k] = std::nullopt;
        else
          n.attrs[k] = v.get<std::string>();
      }
    if (jn.contains("suspicious")) n.suspicious = jn.at("suspicious").get<bool>();
    if (jn.contains("matched_iocs"))
      for (const auto& s : jn.at("matched_iocs"))
        n.matched_iocs.insert(s.get<std::string>());
    g.add_node(std::move(n));
  }
  if (doc.contains("edges"))
    for (const auto& je : doc.at("edges")) {
      std::optional<std::int64_t> ts;
      if (je.contains("ts")) ts = je.at("ts").get<std::int64_t>();
      g.add_edge(je.at("src").get<std::string>(),
                 je.at("dst").get<std::string>(),
                 relation_from_string(je.at("rel").get<std::string>()), ts);
    }
  return g;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return graph_from_json(text);
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot write graph file: " + path);
  out << graph_to_json(g);
}

}  // namespace hunt
