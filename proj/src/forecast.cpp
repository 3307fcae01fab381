#include "lady/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lady/netstats.hpp"

namespace lady {

namespace {

double draw_quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double pos = p * (v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  double frac = pos - lo;
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

}  // namespace

ForecastResult forecast_one_step(const TerminalDraws& terminal, double delta) {
  int nd = static_cast<int>(terminal.mu.rows());
  int V = terminal.V, H = terminal.H;
  int D = dyad_count(V);
  ForecastResult out;
  out.pi_draws.resize(nd, D);

  Eigen::MatrixXd xf(V, std::max(H, 1));
  for (int r = 0; r < nd; ++r) {
    double muf = terminal.mu(r, 0) + delta * terminal.mu(r, 1);
    for (int v = 0; v < V; ++v)
      for (int h = 0; h < H; ++h)
        xf(v, h) = terminal.x(r, v * H + h) + delta * terminal.xd(r, v * H + h);
    for (int v = 1; v < V; ++v)
      for (int u = 0; u < v; ++u) {
        double dot = 0.0;
        for (int h = 0; h < H; ++h) dot += xf(v, h) * xf(u, h);
        out.pi_draws(r, dyad_index(v, u)) = similarity_to_prob(muf + dot);
      }
  }

  out.mean = out.pi_draws.colwise().mean();
  out.q025.resize(D);
  out.q975.resize(D);
  std::vector<double> col(nd);
  for (int k = 0; k < D; ++k) {
    for (int r = 0; r < nd; ++r) col[r] = out.pi_draws(r, k);
    out.q025[k] = draw_quantile(col, 0.025);
    out.q975[k] = draw_quantile(col, 0.975);
  }
  return out;
}

ForecastResult forecast_one_step(const PosteriorStore& store, double delta) {
  return forecast_one_step(store.terminal, delta);
}

PredictResult predict_replicate(const PosteriorStore& store,
                                const NetworkSeries& test) {
  if (test.V != store.V)
    throw data_error("predict_replicate: actor count differs from fit");
  int nt = test.n_times();
  if (nt > store.n_times())
    throw data_error("predict_replicate: test grid longer than training grid");
  for (int i = 0; i < nt; ++i) {
    double a = test.grid.time(i), b = store.grid.time(i);
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)))
      throw data_error("predict_replicate: test grid is not a prefix of the "
                       "training grid at index " + std::to_string(i));
  }
  int D = store.n_dyads();
  PredictResult out;
  out.scores.resize(D, nt);
  out.auc_per_time.resize(nt);
  std::vector<double> scores(D);
  std::vector<int> labels(D);
  for (int i = 0; i < nt; ++i) {
    for (int k = 0; k < D; ++k) {
      scores[k] = store.pi_mean_at(k, i);
      out.scores(k, i) = scores[k];
      labels[k] = test.snapshots[i].dyads()[k];
    }
    out.auc_per_time[i] = auc(scores, labels);
  }
  return out;
}

double OnlineUpdateResult::pi_mean_at(int dyad, int w) const {
  double s = 0.0;
  for (int r = 0; r < n_draws; ++r) s += pi_at(r, dyad, w);
  return s / n_draws;
}

OnlineState make_online_state(const PosteriorStore& store,
                              const NetworkSeries& training, int lookback) {
  if (training.V != store.V || training.n_times() != store.n_times())
    throw data_error("make_online_state: training series does not match fit");
  int n = store.n_times();
  int j = lookback;
  if (j < 0) throw config_error("make_online_state: lookback must be >= 0");
  if (j > n - 1) j = n - 1;  // clamp; window cannot reach before t_1

  OnlineState st;
  st.V = store.V;
  st.H = store.H;
  st.kappa = store.config.kappa;
  st.prior = store.config.prior;
  st.frontier_index = n - 1;
  st.variances = store.var_post_mean;

  int buffered = (j == 0) ? 0 : j + 1;
  int checkpoint = n - 1 - buffered;  // index of the summary time, -1 = none
  st.diffuse_start = checkpoint < 0;
  if (!st.diffuse_start) {
    st.checkpoint_time = store.grid.time(checkpoint);
    st.baseline = store.baseline_summary[checkpoint];
    st.coords.resize(static_cast<std::size_t>(st.V) * st.H);
    for (int v = 0; v < st.V; ++v)
      for (int h = 0; h < st.H; ++h)
        st.coords[v * st.H + h] = store.coord_summary_at(v, h, checkpoint);
  }
  for (int i = checkpoint + 1; i < n; ++i) {
    st.buffer_times.push_back(store.grid.time(i));
    st.buffer.push_back(training.snapshots[i]);
  }
  return st;
}

OnlineUpdateResult online_update(const OnlineState& state,
                                 const NetworkSeries& segment, int lookback,
                                 const OnlineSettings& settings) {
  OnlineUpdateResult out;
  out.V = state.V;
  out.next = state;
  int nbar = segment.n_times();
  if (nbar == 0) return out;
  if (segment.V != state.V)
    throw data_error("online_update: actor count differs from state");
  if (settings.n_iter <= settings.burn_in)
    throw config_error("online_update: need n_iter > burn_in");

  double last_time = state.buffer_times.empty()
                         ? state.checkpoint_time
                         : state.buffer_times.back();
  if (segment.grid.time(0) <= last_time)
    throw data_error("online_update: segment must start after processed times");

  // assemble the update window: buffered history + new segment
  std::vector<double> wt = state.buffer_times;
  for (double t : segment.grid.times()) wt.push_back(t);
  int wn = static_cast<int>(wt.size());
  NetworkSeries window((TimeGrid(wt)), state.V);
  for (std::size_t b = 0; b < state.buffer.size(); ++b)
    window.snapshots[b] = state.buffer[b];
  for (int i = 0; i < nbar; ++i)
    window.snapshots[state.buffer.size() + i] = segment.snapshots[i];

  GibbsSampler sampler(window, state.H, state.prior, state.kappa,
                       settings.seed);
  sampler.fix_variances(state.variances);
  if (!state.diffuse_start) {
    // one-step predictive initialization at the window start
    double dl = wt[0] - state.checkpoint_time;
    if (!(dl > 0))
      throw data_error("online_update: checkpoint is not before the window");
    GaussianState base{state.baseline.mean, state.baseline.cov};
    GaussianState base_pred = predictive_state(
        base, {NGPTransition{dl, state.variances.sigma2_mu,
                             state.variances.sigma2_z}});
    std::vector<GaussianState> coord_pred(
        static_cast<std::size_t>(state.V) * state.H);
    for (int v = 0; v < state.V; ++v)
      for (int h = 0; h < state.H; ++h) {
        const auto& s = state.coords[v * state.H + h];
        coord_pred[v * state.H + h] = predictive_state(
            GaussianState{s.mean, s.cov},
            {NGPTransition{dl, state.variances.sigma2_x(v, h),
                           state.variances.sigma2_m(v, h)}});
      }
    sampler.set_initial_distributions(std::move(base_pred),
                                      std::move(coord_pred));
  }

  int D = dyad_count(state.V);
  int n_draws =
      (settings.n_iter - settings.burn_in + settings.thin - 1) / settings.thin;
  out.window_times = wt;
  out.first_new = static_cast<int>(state.buffer.size());
  out.n_draws = n_draws;
  out.pi.assign(static_cast<std::size_t>(n_draws) * D * wn, 0.0);
  out.terminal.V = state.V;
  out.terminal.H = state.H;
  out.terminal.mu.resize(n_draws, 2);
  out.terminal.x.resize(n_draws, state.V * std::max(state.H, 1));
  out.terminal.xd.resize(n_draws, state.V * std::max(state.H, 1));

  // summaries for the next checkpoint
  int j_next = lookback;
  if (j_next < 0) throw config_error("online_update: lookback must be >= 0");
  int want_buffer = (j_next == 0) ? 0 : j_next + 1;
  if (want_buffer > wn) {
    out.warnings.push_back("lookback clamped to available window (" +
                           std::to_string(wn - 1) + ")");
    want_buffer = wn;  // keep whole window; checkpoint falls back to old one
  }
  int ckpt_pos = wn - 1 - want_buffer;  // window position of next checkpoint

  Eigen::Vector3d s1_base = Eigen::Vector3d::Zero();
  Eigen::Matrix3d s2_base = Eigen::Matrix3d::Zero();
  std::vector<Eigen::Vector3d> s1_coord(
      static_cast<std::size_t>(state.V) * state.H, Eigen::Vector3d::Zero());
  std::vector<Eigen::Matrix3d> s2_coord(s1_coord.size(),
                                        Eigen::Matrix3d::Zero());

  int kept = 0;
  for (int it = 0; it < settings.n_iter; ++it) {
    sampler.sweep();
    if (it < settings.burn_in) continue;
    if ((it - settings.burn_in) % settings.thin != 0) continue;

    const auto& pi = sampler.pi();
    double* dst = out.pi.data() + static_cast<std::size_t>(kept) * D * wn;
    for (int k = 0; k < D; ++k)
      for (int i = 0; i < wn; ++i) *dst++ = pi(k, i);

    const auto& st = sampler.state();
    out.terminal.mu(kept, 0) = st.mu[wn - 1];
    out.terminal.mu(kept, 1) = st.mu_deriv[wn - 1];
    for (int v = 0; v < state.V; ++v)
      for (int h = 0; h < state.H; ++h) {
        out.terminal.x(kept, v * state.H + h) = st.x[v](h, wn - 1);
        out.terminal.xd(kept, v * state.H + h) = st.x_deriv[v](h, wn - 1);
      }

    if (ckpt_pos >= 0) {
      Eigen::Vector3d b(st.mu[ckpt_pos], st.mu_deriv[ckpt_pos],
                        st.z_mean[ckpt_pos]);
      s1_base += b;
      s2_base += b * b.transpose();
      for (int v = 0; v < state.V; ++v)
        for (int h = 0; h < state.H; ++h) {
          Eigen::Vector3d c(st.x[v](h, ckpt_pos), st.x_deriv[v](h, ckpt_pos),
                            st.x_mean[v](h, ckpt_pos));
          s1_coord[v * state.H + h] += c;
          s2_coord[v * state.H + h] += c * c.transpose();
        }
    }
    ++kept;
  }

  // carry-over state
  OnlineState next;
  next.V = state.V;
  next.H = state.H;
  next.kappa = state.kappa;
  next.prior = state.prior;
  next.frontier_index = state.frontier_index + nbar;
  next.variances = state.variances;
  if (ckpt_pos >= 0) {
    double inv = 1.0 / kept;
    next.diffuse_start = false;
    next.checkpoint_time = wt[ckpt_pos];
    next.baseline.mean = s1_base * inv;
    Eigen::Matrix3d c =
        s2_base * inv - next.baseline.mean * next.baseline.mean.transpose();
    next.baseline.cov = 0.5 * (c + c.transpose());
    next.coords.resize(s1_coord.size());
    for (std::size_t idx = 0; idx < s1_coord.size(); ++idx) {
      next.coords[idx].mean = s1_coord[idx] * inv;
      Eigen::Matrix3d cc = s2_coord[idx] * inv -
                           next.coords[idx].mean * next.coords[idx].mean.transpose();
      next.coords[idx].cov = 0.5 * (cc + cc.transpose());
    }
    for (int i = ckpt_pos + 1; i < wn; ++i) {
      next.buffer_times.push_back(wt[i]);
      next.buffer.push_back(window.snapshots[i]);
    }
  } else {
    // whole window kept: reuse the previous checkpoint (or stay diffuse)
    next.diffuse_start = state.diffuse_start;
    next.checkpoint_time = state.checkpoint_time;
    next.baseline = state.baseline;
    next.coords = state.coords;
    next.buffer_times = wt;
    next.buffer.assign(window.snapshots.begin(), window.snapshots.end());
  }
  out.next = std::move(next);
  return out;
}

std::vector<std::optional<double>> forecast_protocol(
    const NetworkSeries& series, int first_target, int last_target,
    int lookback, const ModelConfig& fit_config,
    const OnlineSettings& online_settings) {
  int n = series.n_times();
  if (first_target < 2 || last_target >= n || first_target > last_target)
    throw config_error("forecast_protocol: bad target range");

  int prefix_len = first_target - 1;  // fit through the time before the first update
  PosteriorStore fit = run_gibbs(fit_config, series.prefix(prefix_len));
  OnlineState state = make_online_state(fit, series.prefix(prefix_len), lookback);

  std::vector<std::optional<double>> aucs;
  int D = dyad_count(series.V);
  std::vector<double> scores(D);
  std::vector<int> labels(D);
  for (int k = first_target; k <= last_target; ++k) {
    OnlineSettings os = online_settings;
    os.seed = online_settings.seed + static_cast<std::uint64_t>(k);
    OnlineUpdateResult res =
        online_update(state, series.slice(k - 1, 1), lookback, os);
    double delta = series.grid.time(k) - series.grid.time(k - 1);
    ForecastResult fc = forecast_one_step(res.terminal, delta);
    for (int d = 0; d < D; ++d) {
      scores[d] = fc.mean[d];
      labels[d] = series.snapshots[k].dyads()[d];
    }
    aucs.push_back(auc(scores, labels));
    state = std::move(res.next);
  }
  return aucs;
}

}  // namespace lady
