#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lady/gibbs.hpp"
#include "lady/netseries.hpp"

namespace lady {

struct ForecastResult {
  Eigen::MatrixXd pi_draws;          // draws x dyads
  Eigen::VectorXd mean, q025, q975;  // per dyad
};

// One-step-ahead edge probabilities: each retained draw of the terminal
// latent states is extrapolated deterministically,
//   mu -> mu + delta mu',  x_v -> x_v + delta x_v',
// and pushed through the logistic link. Forecast mean = average over draws.
ForecastResult forecast_one_step(const TerminalDraws& terminal, double delta);
ForecastResult forecast_one_step(const PosteriorStore& store, double delta);

struct PredictResult {
  std::vector<std::optional<double>> auc_per_time;
  Eigen::MatrixXd scores;  // dyads x test times, posterior-mean pi
};

// Score a held-out replicate series on (a prefix of) the training grid by the
// posterior mean of the edge-probability trajectories.
PredictResult predict_replicate(const PosteriorStore& store,
                                const NetworkSeries& test);

// Carry-over state for streaming updates: block summaries at a checkpoint
// time, the past networks re-consumed by the next update, and the noise
// variances frozen at their posterior means.
struct OnlineState {
  int V = 0, H = 0;
  double kappa = 100.0;
  Hyperparams prior;                  // carried for sampler construction
  int frontier_index = 0;             // global index of last processed time
  bool diffuse_start = false;         // window starts from N(0, kappa I)
  double checkpoint_time = 0;         // valid when !diffuse_start
  BlockSummary baseline;              // summaries at the checkpoint
  std::vector<BlockSummary> coords;   // V*H
  VarianceParams variances;
  std::vector<double> buffer_times;   // window history after the checkpoint
  std::vector<AdjacencyMatrix> buffer;
};

// Build the streaming state from a finished fit. With lookback j >= 1 the
// next update re-consumes the last j+1 fitted networks (window starts at
// t_{n-j}); j = 0 streams pure new data initialized from t_n. When the
// window reaches t_1 the initialization degenerates to the diffuse prior.
OnlineState make_online_state(const PosteriorStore& store,
                              const NetworkSeries& training, int lookback);

struct OnlineSettings {
  int n_iter = 5000;
  int burn_in = 500;
  int thin = 1;
  std::uint64_t seed = 1;
};

struct OnlineUpdateResult {
  std::vector<double> window_times;
  int first_new = 0;  // position of the first new time within the window
  int n_draws = 0;
  int V = 0;
  std::vector<double> pi;  // draw-major [draw][dyad][window time]
  TerminalDraws terminal;  // at the window end
  OnlineState next;
  std::vector<std::string> warnings;

  int n_window() const { return static_cast<int>(window_times.size()); }
  double pi_at(int draw, int dyad, int w) const {
    return pi[(static_cast<std::size_t>(draw) * dyad_count(V) + dyad) *
                  n_window() + w];
  }
  double pi_mean_at(int dyad, int w) const;
};

// Gibbs steps [1]-[3] and [6] over (buffered history + new segment), noise
// variances held fixed, smoother initialized from the checkpoint's one-step
// predictive distribution. `lookback` shapes the carried-over state for the
// next update (clamped to the available window, with a warning).
OnlineUpdateResult online_update(const OnlineState& state,
                                 const NetworkSeries& segment, int lookback,
                                 const OnlineSettings& settings);

// Streaming evaluation loop: fit the series up to two steps before the first
// target, then for every target time update online with the preceding
// network and score the one-step forecast against the realized edges.
// Target indices are 0-based and inclusive.
std::vector<std::optional<double>> forecast_protocol(
    const NetworkSeries& series, int first_target, int last_target,
    int lookback, const ModelConfig& fit_config,
    const OnlineSettings& online_settings);

}  // namespace lady
