#include "hunt/trainset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "hunt/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace hunt {

Graph extract_subgraph(const Graph& g, const std::string& start_process,
                       int max_len) {
  if (g.node(start_process).kind != NodeKind::Process)
    throw GraphError("extraction must start at a process node: " +
                     start_process);
  std::set<std::string> keep;
  for (const auto& path : g.paths_up_to(start_process, max_len))
    keep.insert(path.begin(), path.end());
  return g.induced(keep);
}

namespace {

std::string node_name(const Node& n) {
  std::string name = primary_name(n);
  return name.empty() ? n.id : name;
}

// Simple root-to-leaf paths as edge index sequences, capped to keep
// pathological graphs from exploding.
struct PathEnum {
  std::vector<std::vector<std::size_t>> paths;
  bool capped = false;
};

PathEnum enumerate_root_leaf_paths(const Graph& g) {
  constexpr std::size_t kCap = 100000;
  std::map<std::string, std::vector<std::size_t>> out_edges;
  std::map<std::string, std::size_t> in_deg;
  for (const auto& n : g.nodes()) {
    out_edges[n.id];
    in_deg[n.id] = 0;
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    out_edges[g.edges()[e].src].push_back(e);
    in_deg[g.edges()[e].dst]++;
  }
  PathEnum result;
  std::vector<std::size_t> cur;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> dfs = [&](const std::string& u) {
    if (result.capped) return;
    if (out_edges[u].empty()) {
      if (result.paths.size() >= kCap) {
        result.capped = true;
        return;
      }
      result.paths.push_back(cur);
      return;
    }
    bool extended = false;
    for (std::size_t e : out_edges[u]) {
      const auto& dst = g.edges()[e].dst;
      if (on_path.count(dst)) continue;
      extended = true;
      cur.push_back(e);
      on_path.insert(dst);
      dfs(dst);
      on_path.erase(dst);
      cur.pop_back();
    }
    if (!extended) {
      // every outgoing edge closes a cycle; treat as a leaf
      if (result.paths.size() >= kCap)
        result.capped = true;
      else
        result.paths.push_back(cur);
    }
  };
  for (const auto& n : g.nodes()) {
    if (in_deg[n.id] != 0) continue;
    on_path = {n.id};
    dfs(n.id);
  }
  return result;
}

}  // namespace

Graph summarize(const Graph& g) {
  // rule 1: merge same-name process nodes onto the smallest id
  std::map<std::string, std::string> rep;  // id -> representative id
  std::map<std::string, std::string> by_name;
  for (const auto& n : g.nodes()) {
    if (n.kind == NodeKind::Process) {
      std::string name = node_name(n);
      auto it = by_name.find(name);
      if (it == by_name.end()) {
        by_name[name] = n.id;
        rep[n.id] = n.id;
      } else {
        if (n.id < it->second) {
          rep[it->second] = n.id;
          // re-point earlier members of the group
          for (auto& [id, r] : rep)
            if (r == it->second) r = n.id;
          it->second = n.id;
          rep[n.id] = n.id;
        } else {
          rep[n.id] = it->second;
        }
      }
    } else {
      rep[n.id] = n.id;
    }
  }

  Graph merged;
  for (const auto& n : g.nodes())
    if (rep[n.id] == n.id) {
      Node copy = n;
      copy.id = n.id;
      merged.add_node(copy);
    }
  for (const auto& e : g.edges())
    merged.add_edge(rep[e.src], rep[e.dst], e.rel, e.ts);

  // rule 2: keep one path per node-name sequence
  auto en = enumerate_root_leaf_paths(merged);
  if (en.capped || en.paths.empty()) return merged;

  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < en.paths.size(); ++p) {
    const auto& path = en.paths[p];
    std::vector<std::string> names;
    if (path.empty()) continue;  // single isolated node, nothing to dedup
    names.push_back(node_name(merged.node(merged.edges()[path[0]].src)));
    for (std::size_t e : path)
      names.push_back(node_name(merged.node(merged.edges()[e].dst)));
    auto it = groups.find(names);
    if (it == groups.end() || en.paths[p] < en.paths[it->second[0]])
      groups[names] = {p};
  }
  std::set<std::size_t> retained_edges;
  for (const auto& [names, ps] : groups)
    for (std::size_t e : en.paths[ps[0]]) retained_edges.insert(e);
  std::set<std::size_t> on_some_path;
  for (const auto& path : en.paths)
    on_some_path.insert(path.begin(), path.end());

  Graph out;
  for (const auto& n : merged.nodes()) out.add_node(n);
  for (std::size_t e = 0; e < merged.edge_count(); ++e) {
    if (on_some_path.count(e) && !retained_edges.count(e)) continue;
    const auto& ed = merged.edges()[e];
    out.add_edge(ed.src, ed.dst, ed.rel, ed.ts);
  }
  return out;
}

Graph add_noise(const Graph& g, const NoiseConfig& cfg) {
  if (g.node_count() < 2) throw GraphError("add_noise needs >= 2 nodes");
  Rng rng(derive_seed(cfg.seed, "noise"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::set<std::string> dropped_nodes;
    for (const auto& n : g.nodes())
      if (n.kind != NodeKind::Process && unit(rng) < cfg.p_drop_object_node)
        dropped_nodes.insert(n.id);
    std::set<std::size_t> dropped_edges;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      if (unit(rng) < cfg.p_drop_edge) dropped_edges.insert(e);

    Graph out;
    bool has_process = false;
    for (const auto& n : g.nodes()) {
      if (dropped_nodes.count(n.id)) continue;
      Node copy = n;
      for (auto& [key, val] : copy.attrs)
        if (val && unit(rng) < cfg.p_drop_attr) val = std::nullopt;
      out.add_node(copy);
      if (n.kind == NodeKind::Process) has_process = true;
    }
    if (out.node_count() == 0 || !has_process) continue;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (dropped_edges.count(e)) continue;
      const auto& ed = g.edges()[e];
      if (dropped_nodes.count(ed.src) || dropped_nodes.count(ed.dst)) continue;
      out.add_edge(ed.src, ed.dst, ed.rel, ed.ts);
    }
    return out;
  }
  throw GraphError("add_noise: guard exhausted after 100 resamples");
}

namespace {

std::set<std::string> name_set(const Graph& g) {
  std::set<std::string> names;
  for (const auto& n : g.nodes()) names.insert(node_name(n));
  return names;
}

double name_overlap(const Graph& query, const Graph& prov) {
  auto qn = name_set(query);
  auto pn = name_set(prov);
  if (qn.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& n : qn)
    if (pn.count(n)) ++common;
  return static_cast<double>(common) / qn.size();
}

}  // namespace

std::vector<GraphPairSample> make_dataset(const std::vector<Graph>& prov_graphs,
                                          std::size_t n_pos, std::size_t n_neg,
                                          const NoiseConfig& noise,
                                          std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::string>> starts;
  for (std::size_t gi = 0; gi < prov_graphs.size(); ++gi)
    for (const auto& n : prov_graphs[gi].nodes())
      if (n.kind == NodeKind::Process) starts.emplace_back(gi, n.id);
  if (starts.empty()) throw GraphError("no process nodes to extract from");

  Rng rng(derive_seed(seed, "dataset"));
  std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);

  struct Extraction {
    Graph prov;
    Graph query;
  };
  std::vector<Extraction> extractions;
  std::size_t want = n_pos + (n_neg > 0 ? 2 : 0);
  std::size_t attempts = 0;
  while (extractions.size() < std::max(n_pos, want) &&
         attempts < 50 * (n_pos + n_neg + 2)) {
    ++attempts;
    auto [gi, start] = starts[pick(rng)];
    Graph sub = extract_subgraph(prov_graphs[gi], start, 3);
    if (sub.node_count() < 2) continue;
    NoiseConfig nc = noise;
    nc.seed = derive_seed(seed, "sample-" + std::to_string(extractions.size()));
    Graph q;
    try {
      q = add_noise(summarize(sub), nc);
    } catch (const GraphError&) {
      continue;
    }
    if (q.node_count() == 0) continue;
    extractions.push_back({std::move(sub), std::move(q)});
  }
  if (extractions.size() < n_pos)
    throw GraphError("could not extract enough positive samples");
  if (n_neg > 0 && extractions.size() < 2)
    throw GraphError("need >= 2 distinct extractions for negatives");

  std::vector<GraphPairSample> samples;
  for (std::size_t i = 0; i < n_pos; ++i) {
    GraphPairSample s;
    s.prov = extractions[i].prov;
    s.query = extractions[i].query;
    s.label = 1;
    s.note = "pos origin=" + std::to_string(i);
    samples.push_back(std::move(s));
  }
  std::uniform_int_distribution<std::size_t> pe(0, extractions.size() - 1);
  std::size_t made = 0, guard = 0;
  while (made < n_neg) {
    if (++guard > 200 * (n_neg + 1))
      throw GraphError("could not build enough dissimilar negative samples");
    std::size_t i = pe(rng), j = pe(rng);
    if (i == j) continue;
    if (name_overlap(extractions[j].query, extractions[i].prov) > 0.9) continue;
    GraphPairSample s;
    s.prov = extractions[i].prov;
    s.query = extractions[j].query;
    s.label = 0;
    s.note = "neg prov=" + std::to_string(i) + " query=" + std::to_string(j);
    samples.push_back(std::move(s));
    ++made;
  }
  std::shuffle(samples.begin(), samples.end(), rng);
  return samples;
}

std::string sample_to_json(const GraphPairSample& s) {
  nlohmann::ordered_json doc;
  doc["prov"] = nlohmann::ordered_json::parse(graph_to_json(s.prov));
  doc["query"] = nlohmann::ordered_json::parse(graph_to_json(s.query));
  doc["label"] = s.label;
  doc["note"] = s.note;
  return doc.dump(2) + "\n";
}

GraphPairSample sample_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  GraphPairSample s;
  s.prov = graph_from_json(doc.at("prov").dump());
  s.query = graph_from_json(doc.at("query").dump());
  s.label = doc.at("label").get<int>();
  s.note = doc.value("note", "");
  return s;
}

void save_dataset(const std::vector<GraphPairSample>& samples,
                  const std::string& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%05zu.json", i);
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw GraphError("cannot write sample file in " + dir);
    out << sample_to_json(samples[i]);
  }
}

std::vector<GraphPairSample> load_dataset(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json" &&
        entry.path().filename().string().rfind("sample_", 0) == 0)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<GraphPairSample> samples;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    samples.push_back(sample_from_json(text));
  }
  return samples;
}

}  // namespace hunt
