#include "lady/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lady/netstats.hpp"
#include "lady/pg.hpp"

namespace lady {

namespace {

constexpr double kSimClamp = 700.0;

double inv_gamma_draw(double shape, double rate, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  double x = g(rng);
  while (!(x > 0)) x = g(rng);  // guard against underflow to 0
  return 1.0 / x;
}

}  // namespace

void ModelConfig::validate() const {
  if (H < 0) throw config_error("ModelConfig: H must be >= 0");
  if (n_iter <= burn_in || burn_in < 0)
    throw config_error("ModelConfig: need n_iter > burn_in >= 0");
  if (thin < 1) throw config_error("ModelConfig: thin must be >= 1");
  if (!(kappa > 0)) throw config_error("ModelConfig: kappa must be > 0");
  for (double v : {prior.a_mu, prior.b_mu, prior.a_z, prior.b_z, prior.a_x,
                   prior.b_x, prior.a_m, prior.b_m})
    if (!(v > 0)) throw config_error("ModelConfig: hyperparameters must be > 0");
}

double similarity_to_prob(double s) {
  s = std::clamp(s, -kSimClamp, kSimClamp);
  double p = 1.0 / (1.0 + std::exp(-s));
  return std::clamp(p, 1e-15, 1.0 - 1e-15);
}

double edge_probability(double mu_t, const Eigen::Ref<const Eigen::VectorXd>& xv,
                        const Eigen::Ref<const Eigen::VectorXd>& xu) {
  if (!std::isfinite(mu_t)) throw numerical_error("edge_probability: non-finite input");
  return similarity_to_prob(mu_t + xv.dot(xu));
}

GibbsSampler::GibbsSampler(const NetworkSeries& series, int H,
                           const Hyperparams& prior, double kappa,
                           std::uint64_t seed)
    : series_(&series),
      V_(series.V),
      H_(H),
      n_(series.n_times()),
      D_(dyad_count(series.V)),
      prior_(prior),
      kappa_(kappa),
      var_(series.V, std::max(H, 1)),
      rng_(seed) {
  if (V_ < 2) throw config_error("GibbsSampler: need at least 2 actors");
  if (H_ < 0) throw config_error("GibbsSampler: H must be >= 0");

  state_.mu = Eigen::VectorXd::Zero(n_);
  state_.mu_deriv = Eigen::VectorXd::Zero(n_);
  state_.z_mean = Eigen::VectorXd::Zero(n_);
  state_.x.assign(V_, Eigen::MatrixXd::Zero(std::max(H_, 1), n_));
  state_.x_deriv = state_.x;
  state_.x_mean = state_.x;
  state_.omega = Eigen::MatrixXd::Constant(D_, n_, 0.25);
  pi_ = Eigen::MatrixXd::Constant(D_, n_, 0.5);
  dots_ = Eigen::MatrixXd::Zero(D_, n_);

  std::vector<double> deltas(n_ - 1);
  for (int i = 0; i + 1 < n_; ++i) deltas[i] = series.grid.delta(i);

  base_prob_ = make_ssm_problem(deltas, {{1.0, 1.0}}, kappa_);
  for (int i = 0; i < n_; ++i) {
    base_prob_.Z[i] = Eigen::MatrixXd::Zero(1, 3);
    base_prob_.Z[i](0, 0) = 1.0;
    base_prob_.y[i] = Eigen::VectorXd::Zero(1);
    base_prob_.obs_var[i] = Eigen::VectorXd::Ones(1);
  }

  if (H_ > 0) {
    actor_prob_ = make_ssm_problem(
        deltas, std::vector<std::array<double, 2>>(H_, {1.0, 1.0}), kappa_);
    for (int i = 0; i < n_; ++i) {
      actor_prob_.Z[i] = Eigen::MatrixXd::Zero(V_ - 1, 3 * H_);
      actor_prob_.y[i] = Eigen::VectorXd::Zero(V_ - 1);
      actor_prob_.obs_var[i] = Eigen::VectorXd::Ones(V_ - 1);
    }
  }
}

void GibbsSampler::fix_variances(const VarianceParams& v) {
  var_ = v;
  variances_fixed_ = true;
}

void GibbsSampler::set_initial_distributions(GaussianState baseline,
                                             std::vector<GaussianState> coords) {
  if (baseline.mean.size() != 3)
    throw config_error("set_initial_distributions: baseline must be 3-dim");
  if (static_cast<int>(coords.size()) != V_ * H_)
    throw config_error("set_initial_distributions: need V*H coordinate blocks");
  baseline_init_ = std::move(baseline);
  coord_init_ = std::move(coords);
  has_init_ = true;
}

void GibbsSampler::step1_pg() {
  for (int i = 0; i < n_; ++i) {
    for (int v = 1; v < V_; ++v) {
      const auto xv = state_.x[v].col(i);
      for (int u = 0; u < v; ++u) {
        int k = dyad_index(v, u);
        double dot = H_ > 0 ? xv.dot(state_.x[u].col(i)) : 0.0;
        dots_(k, i) = dot;
        double s = std::clamp(state_.mu[i] + dot, -kSimClamp, kSimClamp);
        state_.omega(k, i) = sample_pg1(s, rng_);
      }
    }
  }
}

void GibbsSampler::build_baseline_problem() {
  const auto& Y = series_->snapshots;
  for (int i = 0; i < n_; ++i) {
    double sum_w = 0.0, sum_r = 0.0;
    for (int k = 0; k < D_; ++k) {
      double w = state_.omega(k, i);
      sum_w += w;
      sum_r += (Y[i].dyads()[k] - 0.5) - w * dots_(k, i);
    }
    if (!(sum_w > 0))
      throw numerical_error("step2: nonpositive omega total at time " +
                            std::to_string(i));
    base_prob_.y[i][0] = sum_r / sum_w;
    base_prob_.obs_var[i][0] = 1.0 / sum_w;
  }
  base_prob_.block_vars[0] = {var_.sigma2_mu, var_.sigma2_z};
  if (has_init_) {
    base_prob_.init_mean = baseline_init_.mean;
    base_prob_.init_cov = baseline_init_.cov;
  }
}

void GibbsSampler::step2_baseline() {
  // refresh the dot cache in case coordinates changed since step 1
  for (int i = 0; i < n_; ++i)
    for (int v = 1; v < V_; ++v)
      for (int u = 0; u < v; ++u)
        dots_(dyad_index(v, u), i) =
            H_ > 0 ? state_.x[v].col(i).dot(state_.x[u].col(i)) : 0.0;
  build_baseline_problem();
  auto draw = simulation_smoother(base_prob_, rng_);
  for (int i = 0; i < n_; ++i) {
    state_.mu[i] = draw[i][0];
    state_.mu_deriv[i] = draw[i][1];
    state_.z_mean[i] = draw[i][2];
  }
}

void GibbsSampler::build_actor_problem(int v) {
  const auto& Y = series_->snapshots;
  for (int h = 0; h < H_; ++h)
    actor_prob_.block_vars[h] = {var_.sigma2_x(v, h), var_.sigma2_m(v, h)};
  for (int i = 0; i < n_; ++i) {
    auto& Z = actor_prob_.Z[i];
    auto& y = actor_prob_.y[i];
    auto& hv = actor_prob_.obs_var[i];
    int row = 0;
    for (int u = 0; u < V_; ++u) {
      if (u == v) continue;
      int k = u > v ? dyad_index(u, v) : dyad_index(v, u);
      double w = state_.omega(k, i);
      for (int h = 0; h < H_; ++h) Z(row, 3 * h) = state_.x[u](h, i);
      y[row] = (Y[i].dyads()[k] - 0.5) / w - state_.mu[i];
      hv[row] = 1.0 / w;
      ++row;
    }
  }
  if (has_init_) {
    int d = 3 * H_;
    actor_prob_.init_mean = Eigen::VectorXd::Zero(d);
    actor_prob_.init_cov = Eigen::MatrixXd::Zero(d, d);
    for (int h = 0; h < H_; ++h) {
      const auto& g = coord_init_[v * H_ + h];
      actor_prob_.init_mean.segment<3>(3 * h) = g.mean;
      actor_prob_.init_cov.block<3, 3>(3 * h, 3 * h) = g.cov;
    }
  }
}

void GibbsSampler::step3_actor(int v) {
  if (H_ == 0) return;
  build_actor_problem(v);
  auto draw = simulation_smoother(actor_prob_, rng_);
  for (int i = 0; i < n_; ++i)
    for (int h = 0; h < H_; ++h) {
      state_.x[v](h, i) = draw[i][3 * h];
      state_.x_deriv[v](h, i) = draw[i][3 * h + 1];
      state_.x_mean[v](h, i) = draw[i][3 * h + 2];
    }
}

void GibbsSampler::step45_variances() {
  const auto& g = series_->grid;
  double shape = 0.5 * (n_ - 1);

  double s_mu = 0.0, s_z = 0.0;
  for (int i = 0; i + 1 < n_; ++i) {
    double dl = g.delta(i);
    double rmu = state_.mu_deriv[i + 1] - state_.mu_deriv[i] -
                 state_.z_mean[i] * dl;
    double rz = state_.z_mean[i + 1] - state_.z_mean[i];
    s_mu += rmu * rmu / dl;
    s_z += rz * rz / dl;
  }
  var_.sigma2_mu = inv_gamma_draw(prior_.a_mu + shape, prior_.b_mu + 0.5 * s_mu, rng_);
  var_.sigma2_z = inv_gamma_draw(prior_.a_z + shape, prior_.b_z + 0.5 * s_z, rng_);

  for (int v = 0; v < V_; ++v)
    for (int h = 0; h < H_; ++h) {
      double s_x = 0.0, s_m = 0.0;
      for (int i = 0; i + 1 < n_; ++i) {
        double dl = g.delta(i);
        double rx = state_.x_deriv[v](h, i + 1) - state_.x_deriv[v](h, i) -
                    state_.x_mean[v](h, i) * dl;
        double rm = state_.x_mean[v](h, i + 1) - state_.x_mean[v](h, i);
        s_x += rx * rx / dl;
        s_m += rm * rm / dl;
      }
      var_.sigma2_x(v, h) =
          inv_gamma_draw(prior_.a_x + shape, prior_.b_x + 0.5 * s_x, rng_);
      var_.sigma2_m(v, h) =
          inv_gamma_draw(prior_.a_m + shape, prior_.b_m + 0.5 * s_m, rng_);
    }
}

void GibbsSampler::step6_probs() {
  for (int i = 0; i < n_; ++i)
    for (int v = 1; v < V_; ++v) {
      const auto xv = state_.x[v].col(i);
      for (int u = 0; u < v; ++u) {
        double dot = H_ > 0 ? xv.dot(state_.x[u].col(i)) : 0.0;
        pi_(dyad_index(v, u), i) = similarity_to_prob(state_.mu[i] + dot);
      }
    }
}

void GibbsSampler::sweep() {
  step1_pg();
  step2_baseline();
  for (int v = 0; v < V_; ++v) step3_actor(v);
  if (!variances_fixed_) step45_variances();
  step6_probs();
}

void GibbsSampler::init_from_prior() {
  std::normal_distribution<double> norm(0.0, 1.0);
  var_.sigma2_mu = inv_gamma_draw(prior_.a_mu, prior_.b_mu, rng_);
  var_.sigma2_z = inv_gamma_draw(prior_.a_z, prior_.b_z, rng_);
  for (int v = 0; v < V_; ++v)
    for (int h = 0; h < H_; ++h) {
      var_.sigma2_x(v, h) = inv_gamma_draw(prior_.a_x, prior_.b_x, rng_);
      var_.sigma2_m(v, h) = inv_gamma_draw(prior_.a_m, prior_.b_m, rng_);
    }

  double sk = std::sqrt(kappa_);
  auto sim_block = [&](double var_level, double var_mean, double* lvl,
                       double* der, double* mean, int stride) {
    double a = sk * norm(rng_), b = sk * norm(rng_), c = sk * norm(rng_);
    for (int i = 0; i < n_; ++i) {
      lvl[i * stride] = a;
      der[i * stride] = b;
      mean[i * stride] = c;
      if (i + 1 < n_) {
        double dl = series_->grid.delta(i);
        a += dl * b;
        b += dl * c + std::sqrt(var_level * dl) * norm(rng_);
        c += std::sqrt(var_mean * dl) * norm(rng_);
      }
    }
  };
  sim_block(var_.sigma2_mu, var_.sigma2_z, state_.mu.data(),
            state_.mu_deriv.data(), state_.z_mean.data(), 1);
  for (int v = 0; v < V_; ++v)
    for (int h = 0; h < H_; ++h) {
      int H = std::max(H_, 1);
      sim_block(var_.sigma2_x(v, h), var_.sigma2_m(v, h),
                state_.x[v].data() + h, state_.x_deriv[v].data() + h,
                state_.x_mean[v].data() + h, H);
    }
  step6_probs();
}

PosteriorStore run_gibbs(const ModelConfig& config, const NetworkSeries& series) {
  config.validate();
  if (series.n_times() < 2)
    throw data_error("run_gibbs: need at least 2 time points");
  if (!validate(series).ok())
    throw data_error("run_gibbs: series fails validation");

  int V = series.V, H = config.H, n = series.n_times();
  int D = dyad_count(V);
  int n_draws = (config.n_iter - config.burn_in + config.thin - 1) / config.thin;

  PosteriorStore store(series.grid);
  store.V = V;
  store.H = H;
  store.config = config;
  store.n_draws = n_draws;
  if (store.has_pi_draws)
    store.pi.assign(static_cast<std::size_t>(n_draws) * D * n, 0.0);
  store.pi_mean.assign(static_cast<std::size_t>(D) * n, 0.0);
  store.terminal.V = V;
  store.terminal.H = H;
  store.terminal.mu.resize(n_draws, 2);
  store.terminal.x.resize(n_draws, V * std::max(H, 1));
  store.terminal.xd.resize(n_draws, V * std::max(H, 1));
  store.baseline_summary.assign(n, BlockSummary{});
  store.coord_summary.assign(static_cast<std::size_t>(V) * std::max(H, 1) * n,
                             BlockSummary{});
  store.var_post_mean = VarianceParams(V, std::max(H, 1));
  store.var_post_mean.sigma2_mu = 0;
  store.var_post_mean.sigma2_z = 0;
  store.var_post_mean.sigma2_x.setZero();
  store.var_post_mean.sigma2_m.setZero();

  GibbsSampler sampler(series, H, config.prior, config.kappa, config.seed);

  // accumulators for block summaries (sum and sum of outer products)
  std::vector<Eigen::Vector3d> s1_base(n, Eigen::Vector3d::Zero());
  std::vector<Eigen::Matrix3d> s2_base(n, Eigen::Matrix3d::Zero());
  std::size_t n_coord = store.coord_summary.size();
  std::vector<Eigen::Vector3d> s1_coord(n_coord, Eigen::Vector3d::Zero());
  std::vector<Eigen::Matrix3d> s2_coord(n_coord, Eigen::Matrix3d::Zero());

  int kept = 0;
  for (int it = 0; it < config.n_iter; ++it) {
    sampler.sweep();
    if (it < config.burn_in) continue;
    if ((it - config.burn_in) % config.thin != 0) continue;

    const auto& st = sampler.state();
    const auto& pi = sampler.pi();

    if (store.has_pi_draws) {
      double* dst = store.pi.data() + static_cast<std::size_t>(kept) * D * n;
      for (int k = 0; k < D; ++k)
        for (int i = 0; i < n; ++i) *dst++ = pi(k, i);
    }
    double pi_sum = 0.0;
    {
      double* pm = store.pi_mean.data();
      for (int k = 0; k < D; ++k)
        for (int i = 0; i < n; ++i) {
          pm[static_cast<std::size_t>(k) * n + i] += pi(k, i);
          pi_sum += pi(k, i);
        }
    }

    for (int i = 0; i < n; ++i) {
      Eigen::Vector3d b(st.mu[i], st.mu_deriv[i], st.z_mean[i]);
      s1_base[i] += b;
      s2_base[i] += b * b.transpose();
    }
    for (int v = 0; v < V; ++v)
      for (int h = 0; h < H; ++h)
        for (int i = 0; i < n; ++i) {
          Eigen::Vector3d b(st.x[v](h, i), st.x_deriv[v](h, i),
                            st.x_mean[v](h, i));
          std::size_t idx = (static_cast<std::size_t>(v) * H + h) * n + i;
          s1_coord[idx] += b;
          s2_coord[idx] += b * b.transpose();
        }

    store.terminal.mu(kept, 0) = st.mu[n - 1];
    store.terminal.mu(kept, 1) = st.mu_deriv[n - 1];
    for (int v = 0; v < V; ++v)
      for (int h = 0; h < H; ++h) {
        store.terminal.x(kept, v * H + h) = st.x[v](h, n - 1);
        store.terminal.xd(kept, v * H + h) = st.x_deriv[v](h, n - 1);
      }

    const auto& vr = sampler.variances();
    store.var_post_mean.sigma2_mu += vr.sigma2_mu;
    store.var_post_mean.sigma2_z += vr.sigma2_z;
    store.var_post_mean.sigma2_x += vr.sigma2_x;
    store.var_post_mean.sigma2_m += vr.sigma2_m;
    store.trace_sigma2_mu.push_back(vr.sigma2_mu);
    store.trace_sigma2_z.push_back(vr.sigma2_z);
    store.trace_pi_mean.push_back(pi_sum / (static_cast<double>(D) * n));

    ++kept;
  }

  double inv = 1.0 / kept;
  for (auto& p : store.pi_mean) p *= inv;
  for (int i = 0; i < n; ++i) {
    store.baseline_summary[i].mean = s1_base[i] * inv;
    Eigen::Matrix3d c =
        s2_base[i] * inv -
        store.baseline_summary[i].mean * store.baseline_summary[i].mean.transpose();
    store.baseline_summary[i].cov = 0.5 * (c + c.transpose());
  }
  for (std::size_t idx = 0; idx < n_coord; ++idx) {
    store.coord_summary[idx].mean = s1_coord[idx] * inv;
    Eigen::Matrix3d c =
        s2_coord[idx] * inv -
        store.coord_summary[idx].mean * store.coord_summary[idx].mean.transpose();
    store.coord_summary[idx].cov = 0.5 * (c + c.transpose());
  }
  store.var_post_mean.sigma2_mu *= inv;
  store.var_post_mean.sigma2_z *= inv;
  store.var_post_mean.sigma2_x *= inv;
  store.var_post_mean.sigma2_m *= inv;
  return store;
}

double in_sample_auc(const PosteriorStore& store, const NetworkSeries& series) {
  int D = store.n_dyads(), n = store.n_times();
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(static_cast<std::size_t>(D) * n);
  labels.reserve(scores.capacity());
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < n; ++i) {
      scores.push_back(store.pi_mean_at(k, i));
      labels.push_back(series.snapshots[i].dyads()[k]);
    }
  auto a = auc(scores, labels);
  if (!a) throw data_error("in_sample_auc: series has a single edge class");
  return *a;
}

HSelection select_H(const NetworkSeries& series, const ModelConfig& config,
                    double threshold, int max_H) {
  HSelection sel;
  std::unique_ptr<PosteriorStore> prev;
  for (int H = 0; H <= max_H; ++H) {
    ModelConfig c = config;
    c.H = H;
    c.seed = config.seed ^ (0x9e3779b97f4a7c15ULL * (H + 1));
    auto store = std::make_unique<PosteriorStore>(run_gibbs(c, series));
    sel.auc.push_back(in_sample_auc(*store, series));
    if (H > 0 && sel.auc[H] - sel.auc[H - 1] < threshold) {
      sel.H_star = H - 1;
      sel.store = std::move(prev);
      return sel;
    }
    prev = std::move(store);
  }
  sel.H_star = max_H;
  sel.store = std::move(prev);
  return sel;
}

}  // namespace lady
