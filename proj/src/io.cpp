#include "lady/io.hpp"

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lady {

namespace {

using nlohmann::json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
}

json json_vec3(const Eigen::Vector3d& v) { return json{v[0], v[1], v[2]}; }

json json_mat3(const Eigen::Matrix3d& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  return out;
}

Eigen::Vector3d vec3_from(const json& j) {
  return Eigen::Vector3d(j.at(0).get<double>(), j.at(1).get<double>(),
                         j.at(2).get<double>());
}

Eigen::Matrix3d mat3_from(const json& j) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j.at(3 * r + c).get<double>();
  return m;
}

json summary_to_json(const BlockSummary& s) {
  return json{{"mean", json_vec3(s.mean)}, {"cov", json_mat3(s.cov)}};
}

BlockSummary summary_from_json(const json& j) {
  BlockSummary s;
  s.mean = vec3_from(j.at("mean"));
  s.cov = mat3_from(j.at("cov"));
  return s;
}

json config_to_json(const ModelConfig& c) {
  return json{{"H", c.H},
              {"kappa", c.kappa},
              {"n_iter", c.n_iter},
              {"burn_in", c.burn_in},
              {"thin", c.thin},
              {"seed", c.seed},
              {"prior",
               {{"a_mu", c.prior.a_mu},
                {"b_mu", c.prior.b_mu},
                {"a_z", c.prior.a_z},
                {"b_z", c.prior.b_z},
                {"a_x", c.prior.a_x},
                {"b_x", c.prior.b_x},
                {"a_m", c.prior.a_m},
                {"b_m", c.prior.b_m}}}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.H = j.at("H").get<int>();
  c.kappa = j.at("kappa").get<double>();
  c.n_iter = j.at("n_iter").get<int>();
  c.burn_in = j.at("burn_in").get<int>();
  c.thin = j.at("thin").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const json& p = j.at("prior");
  c.prior.a_mu = p.at("a_mu").get<double>();
  c.prior.b_mu = p.at("b_mu").get<double>();
  c.prior.a_z = p.at("a_z").get<double>();
  c.prior.b_z = p.at("b_z").get<double>();
  c.prior.a_x = p.at("a_x").get<double>();
  c.prior.b_x = p.at("b_x").get<double>();
  c.prior.a_m = p.at("a_m").get<double>();
  c.prior.b_m = p.at("b_m").get<double>();
  return c;
}

json variances_to_json(const VarianceParams& v) {
  std::vector<std::vector<double>> sx(v.sigma2_x.rows()), sm(v.sigma2_m.rows());
  for (int r = 0; r < v.sigma2_x.rows(); ++r) {
    sx[r].assign(v.sigma2_x.row(r).begin(), v.sigma2_x.row(r).end());
    sm[r].assign(v.sigma2_m.row(r).begin(), v.sigma2_m.row(r).end());
  }
  return json{{"sigma2_mu", v.sigma2_mu},
              {"sigma2_z", v.sigma2_z},
              {"sigma2_x", sx},
              {"sigma2_m", sm}};
}

VarianceParams variances_from_json(const json& j) {
  auto sx = j.at("sigma2_x").get<std::vector<std::vector<double>>>();
  auto sm = j.at("sigma2_m").get<std::vector<std::vector<double>>>();
  int V = static_cast<int>(sx.size());
  int H = V > 0 ? static_cast<int>(sx[0].size()) : 0;
  VarianceParams v(std::max(V, 1), std::max(H, 1));
  v.sigma2_mu = j.at("sigma2_mu").get<double>();
  v.sigma2_z = j.at("sigma2_z").get<double>();
  for (int r = 0; r < V; ++r)
    for (int c = 0; c < H; ++c) {
      v.sigma2_x(r, c) = sx[r][c];
      v.sigma2_m(r, c) = sm[r][c];
    }
  return v;
}

}  // namespace

void write_tensor(const std::string& path, const std::vector<double>& data,
                  const std::vector<std::size_t>& shape,
                  const std::string& order) {
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  if (total != data.size())
    throw config_error("write_tensor: shape does not match data size");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("write_tensor: cannot open " + path);
  json hdr{{"dtype", "float64"}, {"shape", shape}, {"order", order}};
  f << hdr.dump() << '\n';
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
}

Tensor read_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("read_tensor: cannot open " + path);
  std::string line;
  std::getline(f, line);
  json hdr = json::parse(line);
  Tensor t;
  t.shape = hdr.at("shape").get<std::vector<std::size_t>>();
  t.order = hdr.value("order", "");
  std::size_t total = 1;
  for (auto s : t.shape) total *= s;
  t.data.resize(total);
  f.read(reinterpret_cast<char*>(t.data.data()),
         static_cast<std::streamsize>(total * sizeof(double)));
  if (static_cast<std::size_t>(f.gcount()) != total * sizeof(double))
    throw data_error("read_tensor: truncated file " + path);
  return t;
}

// ---------------------------------------------------------------------------
// SHA-1 (for git-style blob hashes of run inputs)

namespace {

struct Sha1 {
  std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu,
                                 0x10325476u, 0xC3D2E1F0u};
  std::array<std::uint8_t, 64> buf{};
  std::size_t buf_len = 0;
  std::uint64_t total = 0;

  static std::uint32_t rol(std::uint32_t x, int s) {
    return (x << s) | (x >> (32 - s));
  }

  void block(const std::uint8_t* p) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (p[4 * i] << 24) | (p[4 * i + 1] << 16) | (p[4 * i + 2] << 8) |
             p[4 * i + 3];
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    auto a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    total += len;
    while (len > 0) {
      std::size_t take = std::min(len, buf.size() - buf_len);
      std::memcpy(buf.data() + buf_len, p, take);
      buf_len += take;
      p += take;
      len -= take;
      if (buf_len == buf.size()) {
        block(buf.data());
        buf_len = 0;
      }
    }
  }

  std::string hex() {
    std::uint64_t bits = total * 8;
    std::uint8_t pad = 0x80;
    update(&pad, 1);
    std::uint8_t zero = 0;
    while (buf_len != 56) update(&zero, 1);
    std::uint8_t lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = (bits >> (56 - 8 * i)) & 0xFF;
    update(lenb, 8);
    char out[41];
    for (int i = 0; i < 5; ++i)
      std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 40);
  }
};

}  // namespace

std::string sha1_hex(const void* data, std::size_t len) {
  Sha1 s;
  s.update(data, len);
  return s.hex();
}

std::string blob_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("blob_hash: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::string content = ss.str();
  std::string header = "blob " + std::to_string(content.size());
  Sha1 s;
  s.update(header.data(), header.size() + 1);  // includes the trailing NUL
  s.update(content.data(), content.size());
  return s.hex();
}

// ---------------------------------------------------------------------------

void save_fit(const PosteriorStore& store, const std::string& dir) {
  ensure_dir(dir);
  {
    json cfg = config_to_json(store.config);
    cfg["V"] = store.V;
    cfg["times"] = store.grid.times();
    std::ofstream f(dir + "/config.json");
    f << cfg.dump(2) << '\n';
  }
  if (store.has_pi_draws) {
    write_tensor(dir + "/posterior_pi.bin", store.pi,
                 {static_cast<std::size_t>(store.n_draws),
                  static_cast<std::size_t>(store.n_dyads()),
                  static_cast<std::size_t>(store.n_times())},
                 "draw,dyad,time");
  }
  {
    // per-draw terminal latent states, enough to forecast
    int nd = store.n_draws;
    int W = static_cast<int>(store.terminal.x.cols());
    std::vector<double> flat(static_cast<std::size_t>(nd) * (2 + 2 * W));
    for (int r = 0; r < nd; ++r) {
      double* p = flat.data() + static_cast<std::size_t>(r) * (2 + 2 * W);
      p[0] = store.terminal.mu(r, 0);
      p[1] = store.terminal.mu(r, 1);
      for (int c = 0; c < W; ++c) {
        p[2 + c] = store.terminal.x(r, c);
        p[2 + W + c] = store.terminal.xd(r, c);
      }
    }
    write_tensor(dir + "/terminal_draws.bin", flat,
                 {static_cast<std::size_t>(nd),
                  static_cast<std::size_t>(2 + 2 * W)},
                 "draw,(mu,mu',x...,xd...)");
  }
  {
    json ts;
    ts["V"] = store.V;
    ts["H"] = store.H;
    ts["n_draws"] = store.n_draws;
    ts["baseline"] = json::array();
    for (const auto& s : store.baseline_summary)
      ts["baseline"].push_back(summary_to_json(s));
    ts["coords"] = json::array();
    for (const auto& s : store.coord_summary)
      ts["coords"].push_back(summary_to_json(s));
    std::ofstream f(dir + "/terminal_state.json");
    f << ts.dump() << '\n';
  }
  {
    std::ofstream f(dir + "/variances.json");
    f << variances_to_json(store.var_post_mean).dump(2) << '\n';
  }
  {
    std::ofstream f(dir + "/trace_summaries.csv");
    f << "draw,sigma2_mu,sigma2_z,mean_pi\n";
    for (std::size_t i = 0; i < store.trace_sigma2_mu.size(); ++i)
      f << i << ',' << store.trace_sigma2_mu[i] << ',' << store.trace_sigma2_z[i]
        << ',' << store.trace_pi_mean[i] << '\n';
  }
}

PosteriorStore load_fit(const std::string& dir) {
  std::ifstream cf(dir + "/config.json");
  if (!cf) throw data_error("load_fit: missing " + dir + "/config.json");
  json cfg = json::parse(cf);
  TimeGrid grid(cfg.at("times").get<std::vector<double>>());
  PosteriorStore store(grid);
  store.config = config_from_json(cfg);
  store.V = cfg.at("V").get<int>();
  store.H = store.config.H;

  std::ifstream tf(dir + "/terminal_state.json");
  if (!tf) throw data_error("load_fit: missing terminal_state.json");
  json ts = json::parse(tf);
  store.n_draws = ts.at("n_draws").get<int>();
  for (const auto& j : ts.at("baseline"))
    store.baseline_summary.push_back(summary_from_json(j));
  for (const auto& j : ts.at("coords"))
    store.coord_summary.push_back(summary_from_json(j));

  std::ifstream vf(dir + "/variances.json");
  if (!vf) throw data_error("load_fit: missing variances.json");
  store.var_post_mean = variances_from_json(json::parse(vf));

  int D = store.n_dyads(), n = store.n_times();
  if (std::filesystem::exists(dir + "/posterior_pi.bin")) {
    Tensor t = read_tensor(dir + "/posterior_pi.bin");
    if (t.shape.size() != 3 || t.shape[0] != static_cast<std::size_t>(store.n_draws) ||
        t.shape[1] != static_cast<std::size_t>(D) ||
        t.shape[2] != static_cast<std::size_t>(n))
      throw data_error("load_fit: posterior_pi.bin shape mismatch");
    store.pi = std::move(t.data);
    store.has_pi_draws = true;
    store.pi_mean.assign(static_cast<std::size_t>(D) * n, 0.0);
    for (int r = 0; r < store.n_draws; ++r)
      for (std::size_t kn = 0; kn < store.pi_mean.size(); ++kn)
        store.pi_mean[kn] += store.pi[static_cast<std::size_t>(r) * D * n + kn];
    for (auto& p : store.pi_mean) p /= store.n_draws;
  } else {
    store.has_pi_draws = false;
  }

  Tensor td = read_tensor(dir + "/terminal_draws.bin");
  int W = static_cast<int>((td.shape[1] - 2) / 2);
  store.terminal.V = store.V;
  store.terminal.H = store.H;
  store.terminal.mu.resize(store.n_draws, 2);
  store.terminal.x.resize(store.n_draws, W);
  store.terminal.xd.resize(store.n_draws, W);
  for (int r = 0; r < store.n_draws; ++r) {
    const double* p = td.data.data() + static_cast<std::size_t>(r) * (2 + 2 * W);
    store.terminal.mu(r, 0) = p[0];
    store.terminal.mu(r, 1) = p[1];
    for (int c = 0; c < W; ++c) {
      store.terminal.x(r, c) = p[2 + c];
      store.terminal.xd(r, c) = p[2 + W + c];
    }
  }
  return store;
}

void save_online_state(const OnlineState& state, const std::string& path) {
  json j;
  j["V"] = state.V;
  j["H"] = state.H;
  j["kappa"] = state.kappa;
  j["prior"] = {{"a_mu", state.prior.a_mu}, {"b_mu", state.prior.b_mu},
                {"a_z", state.prior.a_z},   {"b_z", state.prior.b_z},
                {"a_x", state.prior.a_x},   {"b_x", state.prior.b_x},
                {"a_m", state.prior.a_m},   {"b_m", state.prior.b_m}};
  j["frontier_index"] = state.frontier_index;
  j["diffuse_start"] = state.diffuse_start;
  j["checkpoint_time"] = state.checkpoint_time;
  j["baseline"] = summary_to_json(state.baseline);
  j["coords"] = json::array();
  for (const auto& s : state.coords) j["coords"].push_back(summary_to_json(s));
  j["variances"] = variances_to_json(state.variances);
  j["buffer_times"] = state.buffer_times;
  json nets = json::array();
  for (const auto& A : state.buffer) {
    json edges = json::array();
    for (int v = 1; v < A.actors(); ++v)
      for (int u = 0; u < v; ++u)
        if (A(v, u)) edges.push_back(json{u, v});
    nets.push_back(edges);
  }
  j["buffer_edges"] = nets;
  std::ofstream f(path);
  if (!f) throw data_error("save_online_state: cannot write " + path);
  f << j.dump() << '\n';
}

OnlineState load_online_state(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("load_online_state: cannot open " + path);
  json j = json::parse(f);
  OnlineState st;
  st.V = j.at("V").get<int>();
  st.H = j.at("H").get<int>();
  st.kappa = j.at("kappa").get<double>();
  const json& p = j.at("prior");
  st.prior.a_mu = p.at("a_mu").get<double>();
  st.prior.b_mu = p.at("b_mu").get<double>();
  st.prior.a_z = p.at("a_z").get<double>();
  st.prior.b_z = p.at("b_z").get<double>();
  st.prior.a_x = p.at("a_x").get<double>();
  st.prior.b_x = p.at("b_x").get<double>();
  st.prior.a_m = p.at("a_m").get<double>();
  st.prior.b_m = p.at("b_m").get<double>();
  st.frontier_index = j.at("frontier_index").get<int>();
  st.diffuse_start = j.at("diffuse_start").get<bool>();
  st.checkpoint_time = j.at("checkpoint_time").get<double>();
  st.baseline = summary_from_json(j.at("baseline"));
  for (const auto& s : j.at("coords")) st.coords.push_back(summary_from_json(s));
  st.variances = variances_from_json(j.at("variances"));
  st.buffer_times = j.at("buffer_times").get<std::vector<double>>();
  for (const auto& edges : j.at("buffer_edges")) {
    AdjacencyMatrix A(st.V);
    for (const auto& e : edges)
      A.set(e.at(1).get<int>(), e.at(0).get<int>(), true);
    st.buffer.push_back(std::move(A));
  }
  return st;
}

void write_forecast_csv(const ForecastResult& fc, int V,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw data_error("write_forecast_csv: cannot write " + path);
  f << "v,u,mean,q025,q975\n";
  for (int v = 1; v < V; ++v)
    for (int u = 0; u < v; ++u) {
      int k = dyad_index(v, u);
      f << v << ',' << u << ',' << fc.mean[k] << ',' << fc.q025[k] << ','
        << fc.q975[k] << '\n';
    }
}

void write_predict_auc_csv(const std::vector<std::optional<double>>& aucs,
                           const std::string& path) {
  std::ofstream f(path);
  if (!f) throw data_error("write_predict_auc_csv: cannot write " + path);
  f << "time_index,auc\n";
  for (std::size_t i = 0; i < aucs.size(); ++i) {
    f << i << ',';
    if (aucs[i])
      f << *aucs[i];
    else
      f << "NA";
    f << '\n';
  }
}

void write_check_csv(const CheckReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw data_error("write_check_csv: cannot write " + path);
  f << "time_index,statistic,observed,mean,q025,q975\n";
  for (std::size_t i = 0; i < rep.density.size(); ++i) {
    const Band& b = rep.density[i];
    f << i << ",density," << b.observed << ',' << b.mean << ',' << b.lo << ','
      << b.hi << '\n';
  }
  for (const auto& [name, bands] : rep.assort) {
    for (std::size_t i = 0; i < bands.size(); ++i) {
      const Band& b = bands[i];
      f << i << ",assortativity:" << name << ',';
      if (b.observed_defined)
        f << b.observed;
      else
        f << "NA";
      f << ',' << b.mean << ',' << b.lo << ',' << b.hi << '\n';
    }
  }
  for (std::size_t i = 0; i < rep.degree.size(); ++i)
    for (std::size_t v = 0; v < rep.degree[i].size(); ++v) {
      const Band& b = rep.degree[i][v];
      f << i << ",degree:" << v << ',' << b.observed << ',' << b.mean << ','
        << b.lo << ',' << b.hi << '\n';
    }
}

}  // namespace lady
