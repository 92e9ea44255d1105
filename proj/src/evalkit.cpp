#include "hunt/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <unordered_map>

namespace hunt {

Alignment align_nodes(const Graph& query, const Graph& prov) {
  Alignment a;
  for (const auto& q : query.nodes()) {
    auto& slot = a[q.id];
    for (const auto& p : prov.nodes()) {
      if (p.kind != q.kind) continue;
      bool ok = true;
      for (const auto& [key, val] : q.attrs) {
        if (!val) continue;  // null = wildcard
        auto it = p.attrs.find(key);
        if (it == p.attrs.end() || !it->second || *it->second != *val) {
          ok = false;
          break;
        }
      }
      if (ok) slot.insert(p.id);
    }
  }
  return a;
}

CountRatio missing_nodes(const Graph& query, const Alignment& alignment) {
  if (query.node_count() == 0) throw GraphError("empty query graph");
  CountRatio r;
  for (const auto& n : query.nodes()) {
    auto it = alignment.find(n.id);
    if (it == alignment.end() || it->second.empty()) ++r.count;
  }
  r.ratio = static_cast<double>(r.count) / query.node_count();
  return r;
}

namespace {

std::set<std::string> reachable_from(const Graph& g,
                                     const std::set<std::string>& sources) {
  std::set<std::string> seen = sources;
  std::deque<std::string> queue(sources.begin(), sources.end());
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (const auto& [nbr, rel] : g.neighbors(cur, Direction::Out)) {
      (void)rel;
      if (seen.insert(nbr).second) queue.push_back(nbr);
    }
  }
  return seen;
}

}  // namespace

CountRatio missing_paths(const Graph& query, const Graph& prov,
                         const Alignment& alignment) {
  CountRatio r;
  if (query.edge_count() == 0) return r;
  // cache closures per source set (keyed by query node)
  std::map<std::string, std::set<std::string>> closure;
  for (const auto& e : query.edges()) {
    auto si = alignment.find(e.src);
    auto di = alignment.find(e.dst);
    if (si == alignment.end() || si->second.empty() || di == alignment.end() ||
        di->second.empty()) {
      ++r.count;
      continue;
    }
    auto it = closure.find(e.src);
    if (it == closure.end())
      it = closure.emplace(e.src, reachable_from(prov, si->second)).first;
    bool found = false;
    for (const auto& t : di->second)
      if (it->second.count(t)) {
        found = true;
        break;
      }
    if (!found) ++r.count;
  }
  r.ratio = static_cast<double>(r.count) / query.edge_count();
  return r;
}

namespace {

std::string ged_label(const Node& n) {
  return std::string(to_string(n.kind)) + "|" + primary_name(n);
}

struct GedProblem {
  std::vector<std::string> qlabel, plabel;
  // relation multisets per ordered node pair, by index
  std::map<std::pair<int, int>, std::vector<int>> qedges, pedges;
  std::size_t q_edge_total = 0, p_edge_total = 0;
};

GedProblem ged_problem(const Graph& query, const Graph& prov) {
  GedProblem pr;
  std::unordered_map<std::string, int> qi, pi;
  for (const auto& n : query.nodes()) {
    qi[n.id] = static_cast<int>(pr.qlabel.size());
    pr.qlabel.push_back(ged_label(n));
  }
  for (const auto& n : prov.nodes()) {
    pi[n.id] = static_cast<int>(pr.plabel.size());
    pr.plabel.push_back(ged_label(n));
  }
  for (const auto& e : query.edges()) {
    pr.qedges[{qi[e.src], qi[e.dst]}].push_back(static_cast<int>(e.rel));
    ++pr.q_edge_total;
  }
  for (const auto& e : prov.edges()) {
    pr.pedges[{pi[e.src], pi[e.dst]}].push_back(static_cast<int>(e.rel));
    ++pr.p_edge_total;
  }
  for (auto& [k, v] : pr.qedges) std::sort(v.begin(), v.end());
  for (auto& [k, v] : pr.pedges) std::sort(v.begin(), v.end());
  return pr;
}

std::size_t multiset_diff(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return a.size() + b.size() - 2 * common.size();
}

// Full-mapping cost: mapping[q] = prov index or -1 for deletion.
double mapping_cost(const GedProblem& pr, const std::vector<int>& mapping) {
  double cost = 0.0;
  std::vector<bool> used(pr.plabel.size(), false);
  for (std::size_t q = 0; q < mapping.size(); ++q) {
    if (mapping[q] < 0)
      cost += 1.0;  // node deletion
    else {
      used[mapping[q]] = true;
      if (pr.qlabel[q] != pr.plabel[mapping[q]]) cost += 1.0;
    }
  }
  std::size_t unused = 0;
  for (std::size_t p = 0; p < used.size(); ++p)
    if (!used[p]) ++unused;
  cost += static_cast<double>(unused);  // node insertions

  static const std::vector<int> kEmpty;
  for (std::size_t q1 = 0; q1 < mapping.size(); ++q1)
    for (std::size_t q2 = 0; q2 < mapping.size(); ++q2) {
      auto it = pr.qedges.find({(int)q1, (int)q2});
      const auto& qe = it == pr.qedges.end() ? kEmpty : it->second;
      if (mapping[q1] < 0 || mapping[q2] < 0) {
        cost += static_cast<double>(qe.size());  // edges lose an endpoint
        continue;
      }
      auto jt = pr.pedges.find({mapping[q1], mapping[q2]});
      const auto& pe = jt == pr.pedges.end() ? kEmpty : jt->second;
      cost += static_cast<double>(multiset_diff(qe, pe));
    }
  // prov edges with at least one endpoint outside the image
  for (const auto& [key, rels] : pr.pedges)
    if (!used[key.first] || !used[key.second])
      cost += static_cast<double>(rels.size());
  return cost;
}

double ged_exact(const GedProblem& pr) {
  std::size_t nq = pr.qlabel.size(), np = pr.plabel.size();
  double best = static_cast<double>(nq + np + pr.q_edge_total +
                                    pr.p_edge_total);  // delete all, insert all
  std::vector<int> mapping(nq, -1);
  std::vector<bool> used(np, false);

  std::function<void(std::size_t, double)> dfs = [&](std::size_t q,
                                                     double partial_nodes) {
    // admissible bound: node edits already committed plus the unavoidable
    // insert/delete imbalance of the remaining nodes
    std::size_t remaining_q = nq - q;
    std::size_t unused_p = 0;
    for (bool u : used)
      if (!u) ++unused_p;
    double lb = partial_nodes + std::abs(static_cast<double>(remaining_q) -
                                         static_cast<double>(unused_p));
    if (lb >= best) return;
    if (q == nq) {
      double c = mapping_cost(pr, mapping);
      best = std::min(best, c);
      return;
    }
    for (std::size_t p = 0; p < np; ++p) {
      if (used[p]) continue;
      used[p] = true;
      mapping[q] = static_cast<int>(p);
      dfs(q + 1,
          partial_nodes + (pr.qlabel[q] == pr.plabel[p] ? 0.0 : 1.0));
      used[p] = false;
    }
    mapping[q] = -1;
    dfs(q + 1, partial_nodes + 1.0);
  };
  dfs(0, 0.0);
  return best;
}

double ged_greedy(const GedProblem& pr) {
  std::size_t nq = pr.qlabel.size(), np = pr.plabel.size();
  std::vector<int> mapping(nq, -1);
  std::vector<bool> used(np, false);
  for (std::size_t q = 0; q < nq; ++q) {
    int pick = -1;
    for (std::size_t p = 0; p < np; ++p)
      if (!used[p] && pr.plabel[p] == pr.qlabel[q]) {
        pick = static_cast<int>(p);
        break;
      }
    if (pick < 0)
      for (std::size_t p = 0; p < np; ++p)
        if (!used[p]) {
          pick = static_cast<int>(p);
          break;
        }
    if (pick >= 0) {
      mapping[q] = pick;
      used[pick] = true;
    }
  }
  return mapping_cost(pr, mapping);
}

}  // namespace

GedResult ged(const Graph& query, const Graph& prov, std::size_t max_nodes) {
  if (query.node_count() == 0 && prov.node_count() == 0)
    throw GraphError("ged of two empty graphs");
  GedProblem pr = ged_problem(query, prov);
  GedResult r;
  if (query.node_count() + prov.node_count() <= max_nodes) {
    r.raw = ged_exact(pr);
    r.exact = true;
  } else {
    r.raw = ged_greedy(pr);
    r.exact = false;
  }
  double denom =
      static_cast<double>(query.node_count() + query.edge_count() +
                          prov.node_count() + prov.edge_count());
  r.normalized = std::clamp(r.raw / denom, 0.0, 1.0);
  return r;
}

InconsistencyScore inconsistency(const Graph& query, const Graph& prov) {
  InconsistencyScore s;
  Alignment a = align_nodes(query, prov);
  s.missing_node = missing_nodes(query, a);
  s.missing_path = missing_paths(query, prov, a);
  s.ged = ged(query, prov);
  return s;
}

double wl_similarity(const Graph& g1, const Graph& g2, int iterations) {
  if (iterations < 1 || iterations > 10)
    throw GraphError("wl iterations must be in [1,10]");
  if (g1.node_count() == 0 || g2.node_count() == 0)
    throw GraphError("wl_similarity on empty graph");

  std::unordered_map<std::string, int> compress;
  auto compress_label = [&](const std::string& s) {
    auto [it, fresh] = compress.emplace(s, (int)compress.size());
    (void)fresh;
    return it->second;
  };

  auto features = [&](const Graph& g) {
    std::unordered_map<int, double> counts;
    std::unordered_map<std::string, int> label;
    for (const auto& n : g.nodes()) {
      int l = compress_label(std::string(to_string(n.kind)) + "|" +
                             primary_name(n));
      label[n.id] = l;
      counts[l] += 1.0;
    }
    for (int it = 0; it < iterations; ++it) {
      std::unordered_map<std::string, int> next;
      for (const auto& n : g.nodes()) {
        std::vector<std::string> nbrs;
        for (const auto& e : g.edges()) {
          if (e.src == n.id)
            nbrs.push_back(">" + std::string(to_string(e.rel)) + ":" +
                           std::to_string(label[e.dst]));
          if (e.dst == n.id)
            nbrs.push_back("<" + std::string(to_string(e.rel)) + ":" +
                           std::to_string(label[e.src]));
        }
        std::sort(nbrs.begin(), nbrs.end());
        std::string sig = std::to_string(label[n.id]);
        for (const auto& s : nbrs) sig += "," + s;
        int l = compress_label("it" + std::to_string(it) + "|" + sig);
        next[n.id] = l;
        counts[l] += 1.0;
      }
      label = std::move(next);
    }
    return counts;
  };

  auto f1 = features(g1);
  auto f2 = features(g2);
  auto dot = [](const std::unordered_map<int, double>& a,
                const std::unordered_map<int, double>& b) {
    double acc = 0.0;
    for (const auto& [k, v] : a) {
      auto it = b.find(k);
      if (it != b.end()) acc += v * it->second;
    }
    return acc;
  };
  double k12 = dot(f1, f2);
  double k11 = dot(f1, f1);
  double k22 = dot(f2, f2);
  if (k11 == 0.0 || k22 == 0.0) return 0.0;
  return k12 / std::sqrt(k11 * k22);
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw GraphError("auc: scores/labels size mismatch");
  double concordant = 0.0;
  std::size_t npos = 0, nneg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    labels[i] ? ++npos : ++nneg;
  if (npos == 0 || nneg == 0) throw GraphError("auc needs both classes");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j])
        concordant += 1.0;
      else if (scores[i] == scores[j])
        concordant += 0.5;
    }
  }
  return concordant / (static_cast<double>(npos) * nneg);
}

bool classify(double score) { return score > 0.5; }

}  // namespace hunt
