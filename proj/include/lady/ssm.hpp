#pragma once

#include <array>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lady/errors.hpp"

namespace lady {

// One nGP block step: state (level, derivative, instantaneous mean) evolves by
//   s_{i+1} = T s_i + R eta,  eta ~ N(0, Q),
// T = [[1,d,0],[0,1,d],[0,0,1]], R = [[0,0],[1,0],[0,1]],
// Q = diag(var_level * d, var_mean * d).
struct NGPTransition {
  double delta = 0;
  double var_level = 0;
  double var_mean = 0;

  Eigen::Matrix3d T() const;
  Eigen::Matrix<double, 3, 2> R() const;
  Eigen::Matrix2d Q() const;
};

NGPTransition build_ngp_transition(double delta, double var_level,
                                   double var_mean);

// Linear-Gaussian state-space instance over nGP blocks. The state stacks
// n_blocks triples (level, derivative, mean); observation rows may load only
// on the level positions 0, 3, 6, ...
struct SSMProblem {
  std::vector<double> deltas;                     // n-1 gaps t_{i+1}-t_i
  std::vector<std::array<double, 2>> block_vars;  // per block (level, mean)
  std::vector<Eigen::MatrixXd> Z;                 // n observation maps p_i x d
  std::vector<Eigen::VectorXd> y;                 // n observation vectors
  std::vector<Eigen::VectorXd> obs_var;           // n diag noise variances > 0
  Eigen::VectorXd init_mean;                      // d
  Eigen::MatrixXd init_cov;                       // d x d

  int n_times() const { return static_cast<int>(Z.size()); }
  int n_blocks() const { return static_cast<int>(block_vars.size()); }
  int dim() const { return 3 * n_blocks(); }

  Eigen::MatrixXd transition(int i) const;     // dense block-diagonal T_i
  Eigen::MatrixXd process_noise(int i) const;  // dense R Q_i R^T

  void validate() const;  // throws config_error on inconsistent shapes
};

// Convenience constructor: empty observations, zero mean, kappa * I prior.
SSMProblem make_ssm_problem(const std::vector<double>& deltas,
                            std::vector<std::array<double, 2>> block_vars,
                            double kappa);

struct KalmanResult {
  double loglik = 0;
  std::vector<Eigen::VectorXd> pred_mean, filt_mean;
  std::vector<Eigen::MatrixXd> pred_cov, filt_cov;
};

struct SmootherResult {
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;
};

struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Forward pass with sequential (univariate) processing of the diagonal
// observation noise; O(n) in time points. Throws numerical_error naming the
// time index if an innovation variance fails to be positive.
KalmanResult kalman_filter(const SSMProblem& prob);

// Fixed-interval smoother (means and covariances).
SmootherResult smoother(const SSMProblem& prob);

// One joint draw of all states given all observations via the mean-correction
// simulation smoother: smooth(y) + (states+ - smooth(y+)) with (states+, y+)
// simulated from the model.
std::vector<Eigen::VectorXd> simulation_smoother(const SSMProblem& prob,
                                                 std::mt19937_64& rng);

// One-step-ahead state distribution: mean = T m, cov = T G T^T + R Q R^T,
// with one NGPTransition per 3-block.
GaussianState predictive_state(const GaussianState& at_end,
                               const std::vector<NGPTransition>& blocks);

}  // namespace lady
