#pragma once

// Brute-force reference for the state-space machinery: materializes the full
// joint Gaussian of all stacked states, conditions on (a prefix of) the
// stacked observations by dense solves. Independent of the Kalman code path.

#include <vector>

#include <Eigen/Dense>

#include "lady/ssm.hpp"

namespace oracle {

struct DenseResult {
  Eigen::VectorXd mean;  // n*d stacked conditional mean
  Eigen::MatrixXd cov;   // n*d x n*d conditional covariance
  double loglik = 0;     // marginal log-density of the used observations
};

// Condition the joint prior on observations of times [0, upto) (upto = n for
// all observations).
inline DenseResult dense_condition(const lady::SSMProblem& prob, int upto) {
  int n = prob.n_times();
  int d = prob.dim();
  int nd = n * d;

  // joint prior moments by forward propagation
  Eigen::VectorXd m = Eigen::VectorXd::Zero(nd);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nd, nd);
  m.segment(0, d) = prob.init_mean;
  S.block(0, 0, d, d) = prob.init_cov;
  for (int i = 0; i + 1 < n; ++i) {
    Eigen::MatrixXd T = prob.transition(i);
    m.segment((i + 1) * d, d) = T * m.segment(i * d, d);
    for (int j = 0; j <= i; ++j) {
      S.block((i + 1) * d, j * d, d, d) = T * S.block(i * d, j * d, d, d);
      S.block(j * d, (i + 1) * d, d, d) =
          S.block((i + 1) * d, j * d, d, d).transpose();
    }
    S.block((i + 1) * d, (i + 1) * d, d, d) =
        T * S.block(i * d, i * d, d, d) * T.transpose() + prob.process_noise(i);
  }

  // stack the observation rows of times [0, upto)
  int P = 0;
  for (int i = 0; i < upto; ++i) P += static_cast<int>(prob.y[i].size());
  DenseResult out;
  if (P == 0) {
    out.mean = m;
    out.cov = S;
    return out;
  }
  Eigen::MatrixXd Zf = Eigen::MatrixXd::Zero(P, nd);
  Eigen::VectorXd yf(P), hf(P);
  int r = 0;
  for (int i = 0; i < upto; ++i)
    for (int j = 0; j < prob.y[i].size(); ++j) {
      Zf.block(r, i * d, 1, d) = prob.Z[i].row(j);
      yf[r] = prob.y[i][j];
      hf[r] = prob.obs_var[i][j];
      ++r;
    }

  Eigen::MatrixXd SZt = S * Zf.transpose();
  Eigen::MatrixXd F = Zf * SZt;
  F.diagonal() += hf;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(F);
  Eigen::VectorXd resid = yf - Zf * m;
  out.mean = m + SZt * ldlt.solve(resid);
  out.cov = S - SZt * ldlt.solve(SZt.transpose());

  double logdet = 0;
  for (int i = 0; i < P; ++i) logdet += std::log(ldlt.vectorD()[i]);
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  out.loglik = -0.5 * (P * kLog2Pi + logdet + resid.dot(ldlt.solve(resid)));
  return out;
}

inline DenseResult dense_condition_all(const lady::SSMProblem& prob) {
  return dense_condition(prob, prob.n_times());
}

}  // namespace oracle
