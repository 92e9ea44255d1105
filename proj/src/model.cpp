#include "hunt/model.hpp"

#include <cmath>
#include <fstream>

#include "hunt/graph.hpp"
#include "hunt/util.hpp"
#include "json.hpp"

namespace hunt {

namespace {

void visit_impl(ModelParams& m,
                const std::function<void(const std::string&, Mat&)>& fn) {
  fn("attr.W_a", m.attr.W_a);
  fn("attr.a", m.attr.a);
  for (std::size_t l = 0; l < m.query.gcn.size(); ++l)
    fn("query.gcn." + std::to_string(l), m.query.gcn[l]);
  fn("query.W_pool", m.query.W_pool);
  for (std::size_t k = 0; k < m.prov.layers.size(); ++k) {
    auto& L = m.prov.layers[k];
    std::string p = "prov." + std::to_string(k) + ".";
    fn(p + "eps", L.eps);
    fn(p + "W_n", L.W_n);
    fn(p + "a_n", L.a_n);
    fn(p + "mlp.W1", L.mlp.W1);
    fn(p + "mlp.b1", L.mlp.b1);
    fn(p + "mlp.W2", L.mlp.W2);
    fn(p + "mlp.b2", L.mlp.b2);
  }
  fn("prov.concat.W1", m.prov.concat_mlp.W1);
  fn("prov.concat.b1", m.prov.concat_mlp.b1);
  fn("prov.concat.W2", m.prov.concat_mlp.W2);
  fn("prov.concat.b2", m.prov.concat_mlp.b2);
  fn("prov.W_pool", m.prov.W_pool);
  for (std::size_t k = 0; k < m.ntn.W.size(); ++k)
    fn("ntn.W." + std::to_string(k), m.ntn.W[k]);
  fn("ntn.V", m.ntn.V);
  fn("ntn.b", m.ntn.b);
  fn("head.W1", m.head.W1);
  fn("head.b1", m.head.b1);
  fn("head.W2", m.head.W2);
  fn("head.b2", m.head.b2);
}

}  // namespace

void ModelParams::visit(
    const std::function<void(const std::string&, Mat&)>& fn) {
  visit_impl(*this, fn);
}

void ModelParams::visit(
    const std::function<void(const std::string&, const Mat&)>& fn) const {
  visit_impl(const_cast<ModelParams&>(*this),
             [&](const std::string& n, Mat& m) { fn(n, m); });
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Mat& m) { n += m.size(); });
  return n;
}

bool ModelParams::finite() const {
  bool ok = true;
  visit([&](const std::string&, const Mat& m) { ok = ok && m.finite(); });
  return ok;
}

ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParams m;
  m.cfg = cfg;
  std::size_t d = cfg.d;

  auto shape = [&](Mat& t, std::size_t r, std::size_t c) { t = Mat(r, c); };

  shape(m.attr.W_a, cfg.d_w, cfg.d_attr);
  shape(m.attr.a, 1, cfg.d_attr);

  m.query.gcn.resize(cfg.gcn_layers);
  for (std::size_t l = 0; l < cfg.gcn_layers; ++l)
    shape(m.query.gcn[l], l == 0 ? cfg.d_w : d, d);
  shape(m.query.W_pool, d, d);

  m.prov.layers.resize(cfg.prov_layers);
  for (std::size_t k = 0; k < cfg.prov_layers; ++k) {
    auto& L = m.prov.layers[k];
    std::size_t in = k == 0 ? cfg.d_w : d;
    shape(L.eps, 1, 1);
    shape(L.W_n, in, cfg.d_attn);
    shape(L.a_n, 1, 2 * cfg.d_attn);
    shape(L.mlp.W1, in, d);
    shape(L.mlp.b1, 1, d);
    shape(L.mlp.W2, d, d);
    shape(L.mlp.b2, 1, d);
  }
  std::size_t concat_in = cfg.d_w + cfg.prov_layers * d;
  shape(m.prov.concat_mlp.W1, concat_in, d);
  shape(m.prov.concat_mlp.b1, 1, d);
  shape(m.prov.concat_mlp.W2, d, d);
  shape(m.prov.concat_mlp.b2, 1, d);
  shape(m.prov.W_pool, d, d);

  m.ntn.W.resize(cfg.ntn_k);
  for (auto& w : m.ntn.W) shape(w, d, d);
  shape(m.ntn.V, cfg.ntn_k, 2 * d);
  shape(m.ntn.b, 1, cfg.ntn_k);

  shape(m.head.W1, cfg.ntn_k, cfg.head_hidden);
  shape(m.head.b1, 1, cfg.head_hidden);
  shape(m.head.W2, cfg.head_hidden, 1);
  shape(m.head.b2, 1, 1);

  Rng rng(derive_seed(seed, "model-init"));
  m.visit([&](const std::string& name, Mat& t) {
    if (name.find(".eps") != std::string::npos) {
      t.data[0] = 1.0;
      return;
    }
    // Biases start at zero so early activations are data-driven; weights get
    // Glorot-uniform bounds so activation scale survives the layer stack.
    if (name.find(".b") != std::string::npos) {
      std::fill(t.data.begin(), t.data.end(), 0.0);
      return;
    }
    double fan_in = static_cast<double>(t.rows == 1 ? t.cols : t.rows);
    double fan_out = static_cast<double>(t.rows == 1 ? 1 : t.cols);
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& x : t.data) x = dist(rng);
    // start the relation layer's linear bypass small so early training is
    // driven by the bilinear interaction of the two graph embeddings
    if (name == "ntn.V")
      for (double& x : t.data) x *= 0.2;
  });
  return m;
}

ModelParams zero_like(const ModelParams& m) {
  ModelParams z = m;
  z.visit([](const std::string&, Mat& t) {
    std::fill(t.data.begin(), t.data.end(), 0.0);
  });
  return z;
}

void axpy_params(double alpha, const ModelParams& x, ModelParams& y) {
  std::vector<const Mat*> xs;
  x.visit([&](const std::string&, const Mat& t) { xs.push_back(&t); });
  std::size_t i = 0;
  y.visit([&](const std::string&, Mat& t) {
    axpy(alpha, *xs[i], t);
    ++i;
  });
}

std::string model_to_json(const ModelParams& m) {
  nlohmann::ordered_json doc;
  doc["config"] = {{"d_w", m.cfg.d_w},
                   {"d", m.cfg.d},
                   {"d_attr", m.cfg.d_attr},
                   {"d_attn", m.cfg.d_attn},
                   {"gcn_layers", m.cfg.gcn_layers},
                   {"prov_layers", m.cfg.prov_layers},
                   {"ntn_k", m.cfg.ntn_k},
                   {"head_hidden", m.cfg.head_hidden},
                   {"leaky_slope", m.cfg.leaky_slope}};
  doc["tensors"] = nlohmann::ordered_json::array();
  m.visit([&](const std::string& name, const Mat& t) {
    nlohmann::ordered_json jt;
    jt["name"] = name;
    jt["shape"] = {t.rows, t.cols};
    jt["data"] = t.data;
    doc["tensors"].push_back(jt);
  });
  return doc.dump() + "\n";
}

ModelParams model_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  const auto& jc = doc.at("config");
  ModelConfig cfg;
  cfg.d_w = jc.at("d_w").get<std::size_t>();
  cfg.d = jc.at("d").get<std::size_t>();
  cfg.d_attr = jc.at("d_attr").get<std::size_t>();
  cfg.d_attn = jc.at("d_attn").get<std::size_t>();
  cfg.gcn_layers = jc.at("gcn_layers").get<std::size_t>();
  cfg.prov_layers = jc.at("prov_layers").get<std::size_t>();
  cfg.ntn_k = jc.at("ntn_k").get<std::size_t>();
  cfg.head_hidden = jc.at("head_hidden").get<std::size_t>();
  cfg.leaky_slope = jc.at("leaky_slope").get<double>();
  ModelParams m = init_model(cfg, 0);
  std::unordered_map<std::string, const nlohmann::json*> by_name;
  for (const auto& jt : doc.at("tensors"))
    by_name[jt.at("name").get<std::string>()] = &jt;
  m.visit([&](const std::string& name, Mat& t) {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw GraphError("checkpoint missing tensor: " + name);
    const auto& jt = *it->second;
    auto shp = jt.at("shape").get<std::vector<std::size_t>>();
    if (shp.size() != 2 || shp[0] != t.rows || shp[1] != t.cols)
      throw GraphError("checkpoint shape mismatch for tensor: " + name);
    t.data = jt.at("data").get<std::vector<double>>();
    if (t.data.size() != t.rows * t.cols)
      throw GraphError("checkpoint data length mismatch for tensor: " + name);
  });
  return m;
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

void save_model(const ModelParams& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot write model file: " + path);
  out << model_to_json(m);
}

}  // namespace hunt
