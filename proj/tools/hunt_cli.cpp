// Pipeline driver: ingest -> reduce -> embed -> gen-train -> train -> match /
// eval / inconsistency. Exit codes: 0 ok, 1 validation error, 2 runtime error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hunt/evalkit.hpp"
#include "hunt/gnn.hpp"
#include "hunt/ingest.hpp"
#include "hunt/reduce.hpp"
#include "hunt/trainset.hpp"
#include "hunt/util.hpp"
#include "json.hpp"

using namespace hunt;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  bool quiet = false;
};

json load_config(const GlobalOpts& g) {
  if (g.config_path.empty()) return json::object();
  std::ifstream in(g.config_path);
  if (!in) throw GraphError("cannot open config file: " + g.config_path);
  return json::parse(in);
}

ModelConfig model_config_from(const json& cfg) {
  ModelConfig mc;
  auto get = [&](const char* key, auto& field) {
    if (cfg.contains(key)) field = cfg.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("d_w", mc.d_w);
  get("d", mc.d);
  get("d_attr", mc.d_attr);
  get("d_attn", mc.d_attn);
  get("gcn_layers", mc.gcn_layers);
  get("prov_layers", mc.prov_layers);
  get("ntn_k", mc.ntn_k);
  get("head_hidden", mc.head_hidden);
  get("leaky_slope", mc.leaky_slope);
  return mc;
}

TrainConfig train_config_from(const json& cfg) {
  TrainConfig tc;
  if (cfg.contains("lr")) tc.lr = cfg.at("lr").get<double>();
  if (cfg.contains("batch_size"))
    tc.batch_size = cfg.at("batch_size").get<std::size_t>();
  if (cfg.contains("epochs")) tc.epochs = cfg.at("epochs").get<int>();
  if (cfg.contains("val_fraction"))
    tc.val_fraction = cfg.at("val_fraction").get<double>();
  return tc;
}

EmbeddingTable embedding_for_dataset(const std::vector<GraphPairSample>& ds,
                                     std::size_t dim, std::uint64_t seed) {
  std::vector<Sentence> corpus;
  for (const auto& s : ds) {
    auto sp = paths_to_sentences(s.prov, 3);
    corpus.insert(corpus.end(), sp.begin(), sp.end());
    auto sq = paths_to_sentences(s.query, 3);
    corpus.insert(corpus.end(), sq.begin(), sq.end());
  }
  SkipGramConfig sg;
  sg.dim = dim;
  sg.seed = derive_seed(seed, "embed");
  return train_skipgram(corpus, sg);
}

struct PreparedPairs {
  std::vector<GraphPairSample> samples;
  std::vector<GraphFeatures> fq, fp;
  std::vector<Pair> pairs;
};

PreparedPairs prepare_pairs(const std::vector<GraphPairSample>& ds,
                            const EmbeddingTable& table) {
  PreparedPairs p;
  p.samples = ds;
  p.fq.reserve(ds.size());
  p.fp.reserve(ds.size());
  for (const auto& s : p.samples) {
    p.fq.push_back(gather_features(s.query, table));
    p.fp.push_back(gather_features(s.prov, table));
  }
  for (std::size_t i = 0; i < p.samples.size(); ++i)
    p.pairs.push_back({&p.samples[i].query, &p.samples[i].prov, &p.fq[i],
                       &p.fp[i], double(p.samples[i].label)});
  return p;
}

int run(int argc, char** argv) {
  CLI::App app{"provenance-graph threat pattern matcher"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--seed", g.seed, "master seed; stages derive their own");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "events JSONL -> graph JSON");
  std::string ev_path, rules_path, out_path;
  ingest->add_option("--events", ev_path, "audit event JSONL")->required();
  ingest->add_option("--rules", rules_path, "IOC rule JSON (optional)");
  ingest->add_option("--out", out_path, "output graph JSON")->required();

  // reduce
  auto* reduce = app.add_subcommand("reduce", "extract suspicious subgraphs");
  std::string rg_path, rr_path, rout_dir;
  reduce->add_option("--graph", rg_path, "graph JSON")->required();
  reduce->add_option("--rules", rr_path, "IOC rule JSON")->required();
  reduce->add_option("--out-dir", rout_dir, "output directory")->required();

  // embed
  auto* embed = app.add_subcommand("embed", "train attribute embeddings");
  std::string eg_path, eout_path;
  std::size_t e_dim = 64, e_window = 5, e_epochs = 5, e_neg = 5;
  embed->add_option("--graph", eg_path, "graph JSON")->required();
  embed->add_option("--out", eout_path, "embedding JSON")->required();
  embed->add_option("--dim", e_dim, "embedding width");
  embed->add_option("--window", e_window, "context window");
  embed->add_option("--epochs", e_epochs, "training epochs");
  embed->add_option("--negatives", e_neg, "negative samples");

  // gen-train
  auto* gen = app.add_subcommand("gen-train", "generate labeled pairs");
  std::vector<std::string> gg_paths;
  std::size_t g_pos = 0, g_neg = 0;
  std::string g_noise_path, gout_dir;
  gen->add_option("--graph", gg_paths, "provenance graph JSON (repeatable)")
      ->required();
  gen->add_option("--pos", g_pos, "positive pairs")->required();
  gen->add_option("--neg", g_neg, "negative pairs")->required();
  gen->add_option("--noise", g_noise_path, "noise config JSON");
  gen->add_option("--out-dir", gout_dir, "dataset directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "train the matching model");
  std::string t_pairs_dir, t_out, t_emb;
  tr->add_option("--pairs", t_pairs_dir, "dataset directory")->required();
  tr->add_option("--out", t_out, "model checkpoint path")->required();
  tr->add_option("--emb", t_emb,
                 "embedding JSON (default: trained from the pairs)");

  // match
  auto* match = app.add_subcommand("match", "score one query/graph pair");
  std::string m_model, m_query, m_graph, m_emb;
  bool m_json = false;
  match->add_option("--model", m_model, "model checkpoint")->required();
  match->add_option("--query", m_query, "query graph JSON")->required();
  match->add_option("--graph", m_graph, "provenance graph JSON")->required();
  match->add_option("--emb", m_emb, "embedding JSON")->required();
  match->add_flag("--json", m_json, "machine-readable output");

  // eval
  auto* ev = app.add_subcommand("eval", "AUC report over a dataset");
  std::string v_model, v_pairs, v_emb, v_baseline;
  int v_wl_iters = 3;
  bool v_json = false;
  ev->add_option("--model", v_model, "model checkpoint")->required();
  ev->add_option("--pairs", v_pairs, "dataset directory")->required();
  ev->add_option("--emb", v_emb,
                 "embedding JSON (default: trained from the pairs)");
  ev->add_option("--baseline", v_baseline, "baseline name (wl)");
  ev->add_option("--wl-iters", v_wl_iters, "WL iterations 1..10");
  ev->add_flag("--json", v_json, "machine-readable output (always JSON)");

  // inconsistency
  auto* inc = app.add_subcommand("inconsistency", "alignment-based scores");
  std::string i_query, i_graph;
  bool i_json = false;
  inc->add_option("--query", i_query, "query graph JSON")->required();
  inc->add_option("--graph", i_graph, "provenance graph JSON")->required();
  inc->add_flag("--json", i_json, "machine-readable output (always JSON)");

  CLI11_PARSE(app, argc, argv);
  json cfg = load_config(g);

  if (*ingest) {
    auto parsed = parse_events_file(ev_path);
    Graph graph = build_graph(parsed.events);
    std::size_t flagged = 0;
    if (!rules_path.empty())
      flagged = mark_suspicious(graph, compile_rules(load_rules(rules_path)));
    save_graph(graph, out_path);
    if (!g.quiet)
      std::fprintf(stderr,
                   "ingest: %zu events (%zu skipped), %zu nodes, %zu edges, "
                   "%zu flagged\n",
                   parsed.events.size(), parsed.skipped, graph.node_count(),
                   graph.edges().size(), flagged);
    return 0;
  }

  if (*reduce) {
    Graph graph = load_graph(rg_path);
    mark_suspicious(graph, compile_rules(load_rules(rr_path)));
    auto input = reduction_input(graph, {});
    auto out = expand_search(input);
    std::filesystem::create_directories(rout_dir);
    ordered_json report;
    report["subgraphs"] = json::array();
    for (std::size_t i = 0; i < out.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "susp_%02zu.json", i);
      save_graph(out[i].subgraph,
                 (std::filesystem::path(rout_dir) / name).string());
      ordered_json entry;
      entry["file"] = name;
      entry["nodes"] = out[i].subgraph.node_count();
      entry["edges"] = out[i].subgraph.edges().size();
      entry["covered_iocs"] = out[i].covered_iocs;
      entry["uncovered_iocs"] = out[i].uncovered_iocs;
      entry["seed_trace"] = out[i].seed_trace;
      report["subgraphs"].push_back(entry);
    }
    std::ofstream rep(std::filesystem::path(rout_dir) / "coverage.json");
    rep << report.dump(2) << "\n";
    if (!g.quiet)
      std::fprintf(stderr, "reduce: %zu subgraph(s) written to %s\n",
                   out.size(), rout_dir.c_str());
    return 0;
  }

  if (*embed) {
    Graph graph = load_graph(eg_path);
    SkipGramConfig sg;
    sg.dim = e_dim;
    sg.window = static_cast<int>(e_window);
    sg.epochs = static_cast<int>(e_epochs);
    sg.negatives = static_cast<int>(e_neg);
    sg.seed = derive_seed(g.seed, "embed");
    auto table = train_skipgram(paths_to_sentences(graph, 3), sg);
    save_embedding(table, eout_path);
    if (!g.quiet)
      std::fprintf(stderr, "embed: %zu tokens, dim %zu -> %s\n",
                   table.tokens.size(), table.dim, eout_path.c_str());
    return 0;
  }

  if (*gen) {
    std::vector<Graph> provs;
    for (const auto& path : gg_paths) provs.push_back(load_graph(path));
    NoiseConfig noise;
    if (!g_noise_path.empty()) {
      std::ifstream in(g_noise_path);
      if (!in) throw GraphError("cannot open noise config: " + g_noise_path);
      json nj = json::parse(in);
      if (nj.contains("p_drop_edge"))
        noise.p_drop_edge = nj.at("p_drop_edge").get<double>();
      if (nj.contains("p_drop_object_node"))
        noise.p_drop_object_node = nj.at("p_drop_object_node").get<double>();
      if (nj.contains("p_drop_attr"))
        noise.p_drop_attr = nj.at("p_drop_attr").get<double>();
    }
    noise.seed = derive_seed(g.seed, "noise");
    auto ds = make_dataset(provs, g_pos, g_neg, noise,
                           derive_seed(g.seed, "dataset"));
    save_dataset(ds, gout_dir);
    if (!g.quiet)
      std::fprintf(stderr, "gen-train: %zu samples -> %s\n", ds.size(),
                   gout_dir.c_str());
    return 0;
  }

  if (*tr) {
    auto ds = load_dataset(t_pairs_dir);
    ModelConfig mc = model_config_from(cfg);
    TrainConfig tc = train_config_from(cfg);
    tc.verbose = !g.quiet;
    EmbeddingTable table =
        t_emb.empty() ? embedding_for_dataset(ds, mc.d_w, g.seed)
                      : load_embedding(t_emb);
    if (table.dim != mc.d_w)
      throw GraphError("embedding dim does not match model d_w");
    auto prep = prepare_pairs(ds, table);
    auto result = train(prep.pairs, mc, tc, derive_seed(g.seed, "train-run"));
    save_model(result.model, t_out);
    if (!g.quiet && !result.history.empty())
      std::fprintf(stderr, "train: final loss %.6f, val acc %.3f -> %s\n",
                   result.history.back().train_loss,
                   result.history.back().val_accuracy, t_out.c_str());
    return 0;
  }

  if (*match) {
    auto model = load_model(m_model);
    Graph q = load_graph(m_query);
    Graph p = load_graph(m_graph);
    auto table = load_embedding(m_emb);
    if (table.dim != model.cfg.d_w)
      throw GraphError("embedding dim does not match model d_w");
    double score = forward(q, p, gather_features(q, table),
                           gather_features(p, table), model);
    bool verdict = classify(score);
    if (m_json) {
      ordered_json out;
      out["score"] = score;
      out["verdict"] = verdict ? "match" : "no-match";
      std::cout << out.dump() << "\n";
    } else {
      std::printf("score=%.17g verdict=%s\n", score,
                  verdict ? "match" : "no-match");
    }
    return 0;
  }

  if (*ev) {
    if (!v_baseline.empty() && v_baseline != "wl")
      throw GraphError("unknown baseline: " + v_baseline);
    auto model = load_model(v_model);
    auto ds = load_dataset(v_pairs);
    EmbeddingTable table =
        v_emb.empty() ? embedding_for_dataset(ds, model.cfg.d_w, g.seed)
                      : load_embedding(v_emb);
    auto prep = prepare_pairs(ds, table);

    std::vector<double> scores;
    std::vector<int> labels;
    ordered_json per_pair = json::array();
    for (std::size_t i = 0; i < prep.pairs.size(); ++i) {
      const auto& s = prep.samples[i];
      double sc = forward(s.query, s.prov, prep.fq[i], prep.fp[i], model);
      scores.push_back(sc);
      labels.push_back(s.label);
      ordered_json row;
      row["index"] = i;
      row["label"] = s.label;
      row["score"] = sc;
      if (v_baseline == "wl")
        row["wl"] = wl_similarity(s.query, s.prov, v_wl_iters);
      per_pair.push_back(row);
    }
    ordered_json report;
    report["model_auc"] = auc(scores, labels);
    if (v_baseline == "wl") {
      double best = 0.0;
      int best_iter = 1;
      for (int it = 1; it <= 10; ++it) {
        std::vector<double> wl;
        for (const auto& s : prep.samples)
          wl.push_back(wl_similarity(s.query, s.prov, it));
        double a = auc(wl, labels);
        if (a > best) {
          best = a;
          best_iter = it;
        }
      }
      report["wl_auc_best"] = best;
      report["wl_best_iters"] = best_iter;
    }
    report["per_pair"] = per_pair;
    std::cout << report.dump(2) << "\n";
    return 0;
  }

  if (*inc) {
    Graph q = load_graph(i_query);
    Graph p = load_graph(i_graph);
    auto s = inconsistency(q, p);
    ordered_json out;
    out["missing_node"] = {{"count", s.missing_node.count},
                           {"ratio", s.missing_node.ratio}};
    out["missing_path"] = {{"count", s.missing_path.count},
                           {"ratio", s.missing_path.ratio}};
    out["ged"] = {{"raw", s.ged.raw},
                  {"normalized", s.ged.normalized},
                  {"exact", s.ged.exact}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const GraphError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}
