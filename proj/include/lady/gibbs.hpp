#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lady/netseries.hpp"
#include "lady/ssm.hpp"

namespace lady {

struct Hyperparams {
  double a_mu = 0.01, b_mu = 0.01;
  double a_z = 0.01, b_z = 0.01;
  double a_x = 0.01, b_x = 0.01;
  double a_m = 0.01, b_m = 0.01;
};

struct ModelConfig {
  int H = 2;               // latent space dimension, 0 = baseline-only
  Hyperparams prior;
  double kappa = 100.0;    // diffuse initial state variance
  int n_iter = 5000;
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct VarianceParams {
  double sigma2_mu = 1.0, sigma2_z = 1.0;
  Eigen::MatrixXd sigma2_x, sigma2_m;  // V x H

  VarianceParams() = default;
  VarianceParams(int V, int H)
      : sigma2_x(Eigen::MatrixXd::Ones(V, H)),
        sigma2_m(Eigen::MatrixXd::Ones(V, H)) {}
};

// Full Gibbs state: baseline triple, per-actor coordinate triples, PG field.
struct LatentState {
  Eigen::VectorXd mu, mu_deriv, z_mean;            // n each
  std::vector<Eigen::MatrixXd> x, x_deriv, x_mean; // per actor, H x n
  Eigen::MatrixXd omega;                           // dyads x n, all > 0
};

/// pi_vu(t) = [1 + exp(-mu - x_v.x_u)]^{-1}, clamped away from {0,1}.
double edge_probability(double mu_t, const Eigen::Ref<const Eigen::VectorXd>& xv,
                        const Eigen::Ref<const Eigen::VectorXd>& xu);

/// Logistic of a similarity value with the same clamping.
double similarity_to_prob(double s);

struct BlockSummary {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

// Per-retained-draw latent quantities at the final fitted time, enough to
// extrapolate edge probabilities one step ahead.
struct TerminalDraws {
  int V = 0, H = 0;
  Eigen::MatrixXd mu;  // draws x 2 : (mu, mu')
  Eigen::MatrixXd x;   // draws x V*H : x_vh, index v*H+h
  Eigen::MatrixXd xd;  // draws x V*H : x'_vh
};

// Retained MCMC output. pi draws are draw-major: [draw][dyad][time].
struct PosteriorStore {
  TimeGrid grid;
  int V = 0, H = 0;
  ModelConfig config;
  int n_draws = 0;
  bool has_pi_draws = true;

  std::vector<double> pi;       // n_draws * D * n (empty if !has_pi_draws)
  std::vector<double> pi_mean;  // D * n, [dyad][time]

  TerminalDraws terminal;
  std::vector<BlockSummary> baseline_summary;  // per time
  std::vector<BlockSummary> coord_summary;     // [(v*H+h)*n + i]
  VarianceParams var_post_mean;

  // per-retained-draw scalar traces
  std::vector<double> trace_sigma2_mu, trace_sigma2_z, trace_pi_mean;

  explicit PosteriorStore(TimeGrid g) : grid(std::move(g)) {}

  int n_times() const { return grid.size(); }
  int n_dyads() const { return dyad_count(V); }
  double pi_at(int draw, int dyad, int t) const {
    return pi[(static_cast<std::size_t>(draw) * n_dyads() + dyad) * n_times() + t];
  }
  double pi_mean_at(int dyad, int t) const {
    return pi_mean[static_cast<std::size_t>(dyad) * n_times() + t];
  }
  const BlockSummary& coord_summary_at(int v, int h, int t) const {
    return coord_summary[(static_cast<std::size_t>(v) * H + h) * n_times() + t];
  }
};

// One Gibbs chain over a series. The sampler keeps a reference to the series
// and reads it lazily at every step, so prior-simulation tests may rewrite
// snapshot contents between sweeps.
class GibbsSampler {
 public:
  GibbsSampler(const NetworkSeries& series, int H, const Hyperparams& prior,
               double kappa, std::uint64_t seed);

  // freeze steps [4]-[5] at the given values (online updating)
  void fix_variances(const VarianceParams& v);

  // initial state distribution at the first time of the window, one Gaussian
  // for the baseline triple and one per (v,h) coordinate triple; defaults to
  // the diffuse N(0, kappa I)
  void set_initial_distributions(GaussianState baseline,
                                 std::vector<GaussianState> coords);

  void step1_pg();
  void step2_baseline();
  void step3_actor(int v);
  void step45_variances();
  void step6_probs();
  void sweep();

  // draw variances from their priors and latent trajectories from the state
  // equations (prior simulation for getting-it-right checks)
  void init_from_prior();

  const LatentState& state() const { return state_; }
  LatentState& state() { return state_; }
  const VarianceParams& variances() const { return var_; }
  VarianceParams& variances() { return var_; }
  const Eigen::MatrixXd& pi() const { return pi_; }  // dyads x n
  std::mt19937_64& rng() { return rng_; }
  int V() const { return V_; }
  int H() const { return H_; }
  int n_times() const { return n_; }

 private:
  void build_baseline_problem();
  void build_actor_problem(int v);

  const NetworkSeries* series_;
  int V_, H_, n_, D_;
  Hyperparams prior_;
  double kappa_;
  bool variances_fixed_ = false;
  bool has_init_ = false;
  GaussianState baseline_init_;
  std::vector<GaussianState> coord_init_;  // V*H entries

  LatentState state_;
  VarianceParams var_;
  Eigen::MatrixXd pi_;    // dyads x n
  Eigen::MatrixXd dots_;  // dyads x n, x_v . x_u cache
  std::mt19937_64 rng_;

  SSMProblem base_prob_, actor_prob_;  // reused buffers
};

PosteriorStore run_gibbs(const ModelConfig& config, const NetworkSeries& series);

// Pooled over all dyad-times, scoring edges by the posterior-mean pi.
double in_sample_auc(const PosteriorStore& store, const NetworkSeries& series);

struct HSelection {
  int H_star = 0;
  std::vector<double> auc;  // AUC for H = 0, 1, ..., last fitted
  std::unique_ptr<PosteriorStore> store;  // the fit at H_star
};

// Fit H = 0, 1, 2, ... and return the smallest H whose successor improves
// pooled in-sample AUC by less than `threshold`.
HSelection select_H(const NetworkSeries& series, const ModelConfig& config,
                    double threshold = 0.01, int max_H = 8);

}  // namespace lady
