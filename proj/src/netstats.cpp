#include "lady/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lady {

double density(const AdjacencyMatrix& A) {
  int V = A.actors();
  if (V < 2) return 0.0;
  return static_cast<double>(A.edge_count()) / dyad_count(V);
}

int degree(const AdjacencyMatrix& A, int v) { return A.degree(v); }

std::optional<double> assortativity(const AdjacencyMatrix& A,
                                    const std::vector<int>& labels) {
  int V = A.actors();
  int K = 0;
  for (int v = 0; v < V; ++v) K = std::max(K, labels[v] + 1);
  if (K < 1) return std::nullopt;

  // mixing matrix: each undirected edge contributes 1/(2E) to e_kl and e_lk
  std::vector<double> e(static_cast<std::size_t>(K) * K, 0.0);
  int E = A.edge_count();
  if (E == 0) return std::nullopt;
  double w = 0.5 / E;
  for (int v = 1; v < V; ++v)
    for (int u = 0; u < v; ++u)
      if (A(v, u)) {
        e[labels[v] * K + labels[u]] += w;
        e[labels[u] * K + labels[v]] += w;
      }

  double trace = 0.0, a2 = 0.0;
  int classes_seen = 0;
  for (int k = 0; k < K; ++k) {
    double ak = 0.0;
    for (int l = 0; l < K; ++l) ak += e[k * K + l];
    if (ak > 0) ++classes_seen;
    trace += e[k * K + k];
    a2 += ak * ak;
  }
  if (classes_seen < 2) return std::nullopt;
  double denom = 1.0 - a2;
  if (denom <= 0) return std::nullopt;
  return (trace - a2) / denom;
}

std::optional<double> auc(std::span<const double> scores,
                          std::span<const int> labels) {
  std::size_t N = scores.size();
  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double npos = 0, nneg = 0;
  for (int l : labels) (l ? npos : nneg) += 1;
  if (npos == 0 || nneg == 0) return std::nullopt;

  // walk groups of tied scores; positives beat all negatives seen so far,
  // ties within a group count half
  double wins = 0.0, neg_below = 0.0;
  std::size_t i = 0;
  while (i < N) {
    std::size_t j = i;
    double gp = 0, gq = 0;
    while (j < N && scores[idx[j]] == scores[idx[i]]) {
      (labels[idx[j]] ? gp : gq) += 1;
      ++j;
    }
    wins += gp * neg_below + 0.5 * gp * gq;
    neg_below += gq;
    i = j;
  }
  return wins / (npos * nneg);
}

std::optional<double> psrf(const std::vector<std::vector<double>>& subchains) {
  int m = static_cast<int>(subchains.size());
  if (m < 2) return std::nullopt;
  std::size_t L = subchains[0].size();
  for (const auto& c : subchains)
    if (c.size() != L || L < 2) return std::nullopt;

  std::vector<double> means(m);
  double W = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto& c = subchains[j];
    double mu = std::accumulate(c.begin(), c.end(), 0.0) / L;
    means[j] = mu;
    double ss = 0.0;
    for (double x : c) ss += (x - mu) * (x - mu);
    W += ss / (L - 1);
  }
  W /= m;
  if (W <= 0.0) return std::nullopt;

  double gm = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double B = 0.0;
  for (double mu : means) B += (mu - gm) * (mu - gm);
  B *= static_cast<double>(L) / (m - 1);

  double Ln = static_cast<double>(L);
  double var_plus = (Ln - 1.0) / Ln * W + B / Ln;
  return std::sqrt(var_plus / W);
}

std::optional<double> split_psrf(std::span<const double> chain, int m) {
  if (m < 2 || chain.size() < static_cast<std::size_t>(2 * m)) return std::nullopt;
  std::size_t L = chain.size() / m;
  std::vector<std::vector<double>> subs(m);
  for (int j = 0; j < m; ++j)
    subs[j].assign(chain.begin() + j * L, chain.begin() + (j + 1) * L);
  return psrf(subs);
}

AdjacencyMatrix sample_bernoulli_network(std::span<const double> pi_dyads,
                                         int V, std::mt19937_64& rng) {
  AdjacencyMatrix A(V);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < dyad_count(V); ++k)
    if (unif(rng) < pi_dyads[k]) A.dyads()[k] = 1;
  return A;
}

ExpectedAssortativity expected_assortativity_mc(
    const std::vector<std::vector<double>>& pi_draws, int V,
    const std::vector<int>& labels, int n_sim, std::mt19937_64& rng) {
  ExpectedAssortativity out;
  out.draws.reserve(pi_draws.size());
  for (const auto& pi : pi_draws) {
    double sum = 0.0;
    int used = 0;
    for (int s = 0; s < n_sim; ++s) {
      AdjacencyMatrix A = sample_bernoulli_network(pi, V, rng);
      if (auto r = assortativity(A, labels)) {
        sum += *r;
        ++used;
      } else {
        ++out.undefined_dropped;
      }
    }
    out.draws.push_back(used > 0 ? sum / used
                                 : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<int> encode_labels(const std::vector<std::string>& values) {
  std::vector<int> out(values.size());
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto it = std::find(seen.begin(), seen.end(), values[i]);
    if (it == seen.end()) {
      out[i] = static_cast<int>(seen.size());
      seen.push_back(values[i]);
    } else {
      out[i] = static_cast<int>(it - seen.begin());
    }
  }
  return out;
}

namespace {

Band band_from(std::vector<double> sims, double observed, double level,
               bool obs_defined = true) {
  Band b;
  b.observed = observed;
  b.observed_defined = obs_defined;
  if (sims.empty()) return b;
  double s = 0;
  for (double x : sims) s += x;
  b.mean = s / sims.size();
  std::sort(sims.begin(), sims.end());
  double tail = 0.5 * (1.0 - level);
  auto q = [&](double p) {
    double pos = p * (sims.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sims.size()) return sims.back();
    double fr = pos - lo;
    return sims[lo] * (1 - fr) + sims[lo + 1] * fr;
  };
  b.lo = q(tail);
  b.hi = q(1.0 - tail);
  return b;
}

}  // namespace

CheckReport posterior_predictive_check(const PosteriorStore& store,
                                       const NetworkSeries& observed,
                                       std::mt19937_64& rng, double level) {
  if (!store.has_pi_draws)
    throw config_error("posterior_predictive_check: fit stored no pi draws");
  if (observed.V != store.V || observed.n_times() != store.n_times())
    throw data_error("posterior_predictive_check: series does not match fit");
  int n = store.n_times(), V = store.V, D = store.n_dyads();
  int nd = store.n_draws;

  std::map<std::string, std::vector<int>> attrs;
  for (const auto& [name, vals] : observed.labels)
    attrs[name] = encode_labels(vals);

  CheckReport rep;
  rep.density.reserve(n);
  rep.degree.assign(n, {});
  std::vector<double> sim_density(nd);
  std::vector<std::vector<double>> sim_degree(V, std::vector<double>(nd));
  std::map<std::string, std::vector<double>> sim_assort;
  std::vector<double> pi_draw(D);

  int dens_in = 0, deg_in = 0, deg_tot = 0;
  for (int i = 0; i < n; ++i) {
    for (auto& [name, vals] : attrs) sim_assort[name].clear();
    for (int r = 0; r < nd; ++r) {
      for (int k = 0; k < D; ++k) pi_draw[k] = store.pi_at(r, k, i);
      AdjacencyMatrix A = sample_bernoulli_network(pi_draw, V, rng);
      sim_density[r] = density(A);
      for (int v = 0; v < V; ++v) sim_degree[v][r] = A.degree(v);
      for (auto& [name, lab] : attrs)
        if (auto a = assortativity(A, lab)) sim_assort[name].push_back(*a);
    }
    Band bd = band_from(sim_density, density(observed.snapshots[i]), level);
    if (bd.observed >= bd.lo && bd.observed <= bd.hi) ++dens_in;
    rep.density.push_back(bd);

    rep.degree[i].reserve(V);
    for (int v = 0; v < V; ++v) {
      Band bv = band_from(sim_degree[v],
                          static_cast<double>(observed.snapshots[i].degree(v)),
                          level);
      if (bv.observed >= bv.lo && bv.observed <= bv.hi) ++deg_in;
      ++deg_tot;
      rep.degree[i].push_back(bv);
    }
    for (auto& [name, lab] : attrs) {
      auto obs = assortativity(observed.snapshots[i], lab);
      Band ba = band_from(sim_assort[name], obs.value_or(0.0), level,
                          obs.has_value());
      rep.assort[name].push_back(ba);
    }
  }
  rep.density_coverage = static_cast<double>(dens_in) / n;
  rep.degree_coverage = deg_tot ? static_cast<double>(deg_in) / deg_tot : 0.0;
  return rep;
}

}  // namespace lady
