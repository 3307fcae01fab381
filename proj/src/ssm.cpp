#include "lady/ssm.hpp"

#include <cmath>
#include <string>

namespace lady {

Eigen::Matrix3d NGPTransition::T() const {
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 1) = delta;
  t(1, 2) = delta;
  return t;
}

Eigen::Matrix<double, 3, 2> NGPTransition::R() const {
  Eigen::Matrix<double, 3, 2> r = Eigen::Matrix<double, 3, 2>::Zero();
  r(1, 0) = 1.0;
  r(2, 1) = 1.0;
  return r;
}

Eigen::Matrix2d NGPTransition::Q() const {
  Eigen::Matrix2d q = Eigen::Matrix2d::Zero();
  q(0, 0) = var_level * delta;
  q(1, 1) = var_mean * delta;
  return q;
}

NGPTransition build_ngp_transition(double delta, double var_level,
                                   double var_mean) {
  if (!(delta > 0)) throw config_error("build_ngp_transition: delta must be > 0");
  if (!(var_level > 0) || !(var_mean > 0))
    throw config_error("build_ngp_transition: variances must be > 0");
  return NGPTransition{delta, var_level, var_mean};
}

Eigen::MatrixXd SSMProblem::transition(int i) const {
  int d = dim();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(d, d);
  for (int b = 0; b < n_blocks(); ++b) {
    T(3 * b, 3 * b + 1) = deltas[i];
    T(3 * b + 1, 3 * b + 2) = deltas[i];
  }
  return T;
}

Eigen::MatrixXd SSMProblem::process_noise(int i) const {
  int d = dim();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d);
  for (int b = 0; b < n_blocks(); ++b) {
    W(3 * b + 1, 3 * b + 1) = block_vars[b][0] * deltas[i];
    W(3 * b + 2, 3 * b + 2) = block_vars[b][1] * deltas[i];
  }
  return W;
}

void SSMProblem::validate() const {
  int n = n_times();
  int d = dim();
  if (n < 1) throw config_error("SSMProblem: no time points");
  if (n_blocks() < 1) throw config_error("SSMProblem: no state blocks");
  if (static_cast<int>(deltas.size()) != n - 1)
    throw config_error("SSMProblem: need n-1 deltas");
  for (double dl : deltas)
    if (!(dl > 0)) throw config_error("SSMProblem: deltas must be > 0");
  for (const auto& bv : block_vars)
    if (!(bv[0] > 0) || !(bv[1] > 0))
      throw config_error("SSMProblem: block variances must be > 0");
  if (static_cast<int>(y.size()) != n || static_cast<int>(obs_var.size()) != n)
    throw config_error("SSMProblem: observation arrays must have n entries");
  for (int i = 0; i < n; ++i) {
    int p = static_cast<int>(y[i].size());
    if (Z[i].rows() != p || Z[i].cols() != d)
      throw config_error("SSMProblem: Z shape mismatch at time " +
                         std::to_string(i));
    if (obs_var[i].size() != p)
      throw config_error("SSMProblem: obs_var length mismatch at time " +
                         std::to_string(i));
    for (int j = 0; j < p; ++j)
      if (!(obs_var[i][j] > 0))
        throw config_error("SSMProblem: observation variances must be > 0");
  }
  if (init_mean.size() != d || init_cov.rows() != d || init_cov.cols() != d)
    throw config_error("SSMProblem: init shape mismatch");
}

SSMProblem make_ssm_problem(const std::vector<double>& deltas,
                            std::vector<std::array<double, 2>> block_vars,
                            double kappa) {
  SSMProblem p;
  p.deltas = deltas;
  p.block_vars = std::move(block_vars);
  int n = static_cast<int>(deltas.size()) + 1;
  int d = 3 * static_cast<int>(p.block_vars.size());
  p.Z.assign(n, Eigen::MatrixXd::Zero(0, d));
  p.y.assign(n, Eigen::VectorXd::Zero(0));
  p.obs_var.assign(n, Eigen::VectorXd::Zero(0));
  p.init_mean = Eigen::VectorXd::Zero(d);
  p.init_cov = kappa * Eigen::MatrixXd::Identity(d, d);
  return p;
}

namespace {

// a <- T a for the block-bidiagonal nGP transition (top-down within block)
void apply_T(Eigen::VectorXd& a, double delta, int nb) {
  double* p = a.data();
  for (int b = 0; b < nb; ++b) {
    p[3 * b] += delta * p[3 * b + 1];
    p[3 * b + 1] += delta * p[3 * b + 2];
  }
}

// r <- T^T r (bottom-up within block)
void apply_Tt(Eigen::VectorXd& r, double delta, int nb) {
  double* p = r.data();
  for (int b = 0; b < nb; ++b) {
    p[3 * b + 2] += delta * p[3 * b + 1];
    p[3 * b + 1] += delta * p[3 * b];
  }
}

// P <- T P T^T + R Q R^T
void propagate_cov(Eigen::MatrixXd& P, double delta,
                   const std::vector<std::array<double, 2>>& bv) {
  int nb = static_cast<int>(bv.size());
  for (int b = 0; b < nb; ++b) {
    P.row(3 * b) += delta * P.row(3 * b + 1);
    P.row(3 * b + 1) += delta * P.row(3 * b + 2);
  }
  for (int b = 0; b < nb; ++b) {
    P.col(3 * b) += delta * P.col(3 * b + 1);
    P.col(3 * b + 1) += delta * P.col(3 * b + 2);
  }
  for (int b = 0; b < nb; ++b) {
    P(3 * b + 1, 3 * b + 1) += bv[b][0] * delta;
    P(3 * b + 2, 3 * b + 2) += bv[b][1] * delta;
  }
  P = 0.5 * (P + P.transpose()).eval();
}

// N <- T^T N T
void propagate_N(Eigen::MatrixXd& N, double delta, int nb) {
  for (int b = 0; b < nb; ++b) {
    N.row(3 * b + 2) += delta * N.row(3 * b + 1);
    N.row(3 * b + 1) += delta * N.row(3 * b);
  }
  for (int b = 0; b < nb; ++b) {
    N.col(3 * b + 2) += delta * N.col(3 * b + 1);
    N.col(3 * b + 1) += delta * N.col(3 * b);
  }
  N = 0.5 * (N + N.transpose()).eval();
}

// One scalar observation update of the covariance. Joseph form arranged as
// the exactly-symmetric P - K w^T - w K^T + f K K^T with w = P z^T, K = w/f.
// Returns f; fills w and K.
double scalar_cov_update(Eigen::MatrixXd& P, const Eigen::RowVectorXd& z,
                         double h, Eigen::VectorXd& w, Eigen::VectorXd& K) {
  int d = static_cast<int>(P.rows());
  w.noalias() = P * z.transpose();
  double f = z.dot(w) + h;
  if (!(f > 0) || !std::isfinite(f)) return f;
  K = w / f;
  double* Pd = P.data();
  const double* Kd = K.data();
  const double* wd = w.data();
  for (int j = 0; j < d; ++j) {
    double Kj = Kd[j], wj = wd[j];
    double* col = Pd + static_cast<std::ptrdiff_t>(j) * d;
    for (int i = j; i < d; ++i) {
      double upd = Kd[i] * wj + wd[i] * Kj - f * Kd[i] * Kj;
      col[i] -= upd;
    }
  }
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < j; ++i) P(i, j) = P(j, i);
  return f;
}

struct CovPass {
  std::vector<Eigen::MatrixXd> pred_cov, filt_cov;
  std::vector<double> f;              // per scalar observation, scan order
  std::vector<Eigen::VectorXd> gain;  // K per scalar observation
};

CovPass run_cov_pass(const SSMProblem& prob) {
  int n = prob.n_times();
  int d = prob.dim();
  CovPass cp;
  cp.pred_cov.reserve(n);
  cp.filt_cov.reserve(n);
  Eigen::MatrixXd P = prob.init_cov;
  Eigen::VectorXd w(d), K(d);
  for (int i = 0; i < n; ++i) {
    cp.pred_cov.push_back(P);
    int p = static_cast<int>(prob.y[i].size());
    for (int j = 0; j < p; ++j) {
      double f = scalar_cov_update(P, prob.Z[i].row(j), prob.obs_var[i][j], w, K);
      if (!(f > 0) || !std::isfinite(f))
        throw numerical_error(
            "kalman_filter: non-positive innovation variance at time " +
            std::to_string(i));
      cp.f.push_back(f);
      cp.gain.push_back(K);
    }
    cp.filt_cov.push_back(P);
    if (i < n - 1) propagate_cov(P, prob.deltas[i], prob.block_vars);
  }
  return cp;
}

struct MeanPass {
  double loglik = 0;
  std::vector<Eigen::VectorXd> pred_mean, filt_mean;
  std::vector<double> v;  // innovations, scan order
};

MeanPass run_mean_pass(const SSMProblem& prob, const CovPass& cp,
                       const std::vector<Eigen::VectorXd>& obs) {
  int n = prob.n_times();
  int nb = prob.n_blocks();
  MeanPass mp;
  mp.pred_mean.reserve(n);
  mp.filt_mean.reserve(n);
  Eigen::VectorXd a = prob.init_mean;
  std::size_t obs_idx = 0;
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  for (int i = 0; i < n; ++i) {
    mp.pred_mean.push_back(a);
    int p = static_cast<int>(obs[i].size());
    for (int j = 0; j < p; ++j) {
      double v = obs[i][j] - prob.Z[i].row(j).dot(a);
      double f = cp.f[obs_idx];
      a += cp.gain[obs_idx] * v;
      mp.loglik -= 0.5 * (kLog2Pi + std::log(f) + v * v / f);
      mp.v.push_back(v);
      ++obs_idx;
    }
    mp.filt_mean.push_back(a);
    if (i < n - 1) apply_T(a, prob.deltas[i], nb);
  }
  return mp;
}

std::vector<Eigen::VectorXd> backward_means(const SSMProblem& prob,
                                            const CovPass& cp,
                                            const MeanPass& mp) {
  int n = prob.n_times();
  int d = prob.dim();
  int nb = prob.n_blocks();
  std::vector<Eigen::VectorXd> out(n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(d);
  std::size_t obs_idx = cp.f.size();
  for (int i = n - 1; i >= 0; --i) {
    int p = static_cast<int>(prob.y[i].size());
    for (int j = p - 1; j >= 0; --j) {
      --obs_idx;
      const Eigen::VectorXd& K = cp.gain[obs_idx];
      double coef = mp.v[obs_idx] / cp.f[obs_idx] - K.dot(r);
      r += coef * prob.Z[i].row(j).transpose();
    }
    out[i] = mp.pred_mean[i] + cp.pred_cov[i] * r;
    if (i > 0) apply_Tt(r, prob.deltas[i - 1], nb);
  }
  return out;
}

// forward simulation of one state trajectory and matching observations
void simulate_model(const SSMProblem& prob, std::mt19937_64& rng,
                    std::vector<Eigen::VectorXd>& alpha,
                    std::vector<Eigen::VectorXd>& yobs) {
  int n = prob.n_times();
  int d = prob.dim();
  int nb = prob.n_blocks();
  std::normal_distribution<double> norm(0.0, 1.0);

  Eigen::LLT<Eigen::MatrixXd> llt(prob.init_cov);
  Eigen::MatrixXd L;
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    // PSD-degenerate prior: retry with a small diagonal jitter
    double jitter = 1e-12 * (prob.init_cov.trace() / d + 1.0);
    Eigen::MatrixXd C = prob.init_cov;
    for (int tries = 0; tries < 8; ++tries) {
      C.diagonal().array() += jitter;
      llt.compute(C);
      if (llt.info() == Eigen::Success) break;
      jitter *= 10;
    }
    if (llt.info() != Eigen::Success)
      throw numerical_error("simulation_smoother: initial covariance not PSD");
    L = llt.matrixL();
  }

  Eigen::VectorXd eps(d);
  for (int k = 0; k < d; ++k) eps[k] = norm(rng);
  Eigen::VectorXd a = prob.init_mean + L * eps;

  alpha.resize(n);
  yobs.resize(n);
  for (int i = 0; i < n; ++i) {
    alpha[i] = a;
    int p = static_cast<int>(prob.y[i].size());
    Eigen::VectorXd yo(p);
    for (int j = 0; j < p; ++j)
      yo[j] = prob.Z[i].row(j).dot(a) +
              std::sqrt(prob.obs_var[i][j]) * norm(rng);
    yobs[i] = std::move(yo);
    if (i < n - 1) {
      apply_T(a, prob.deltas[i], nb);
      double dl = prob.deltas[i];
      for (int b = 0; b < nb; ++b) {
        a[3 * b + 1] += std::sqrt(prob.block_vars[b][0] * dl) * norm(rng);
        a[3 * b + 2] += std::sqrt(prob.block_vars[b][1] * dl) * norm(rng);
      }
    }
  }
}

}  // namespace

KalmanResult kalman_filter(const SSMProblem& prob) {
  prob.validate();
  CovPass cp = run_cov_pass(prob);
  MeanPass mp = run_mean_pass(prob, cp, prob.y);
  KalmanResult out;
  out.loglik = mp.loglik;
  out.pred_mean = std::move(mp.pred_mean);
  out.filt_mean = std::move(mp.filt_mean);
  out.pred_cov = std::move(cp.pred_cov);
  out.filt_cov = std::move(cp.filt_cov);
  return out;
}

SmootherResult smoother(const SSMProblem& prob) {
  prob.validate();
  int n = prob.n_times();
  int d = prob.dim();
  int nb = prob.n_blocks();
  CovPass cp = run_cov_pass(prob);
  MeanPass mp = run_mean_pass(prob, cp, prob.y);

  SmootherResult out;
  out.mean = backward_means(prob, cp, mp);
  out.cov.resize(n);

  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd g(d);
  std::size_t obs_idx = cp.f.size();
  for (int i = n - 1; i >= 0; --i) {
    int p = static_cast<int>(prob.y[i].size());
    for (int j = p - 1; j >= 0; --j) {
      --obs_idx;
      const Eigen::VectorXd& K = cp.gain[obs_idx];
      Eigen::VectorXd zc = prob.Z[i].row(j).transpose();
      g.noalias() = N * K;
      double c = g.dot(K) + 1.0 / cp.f[obs_idx];
      N.noalias() -= zc * g.transpose();
      N.noalias() -= g * zc.transpose();
      N.noalias() += c * zc * zc.transpose();
    }
    const Eigen::MatrixXd& Pp = cp.pred_cov[i];
    out.cov[i] = Pp - Pp * N * Pp;
    out.cov[i] = 0.5 * (out.cov[i] + out.cov[i].transpose()).eval();
    if (i > 0) propagate_N(N, prob.deltas[i - 1], nb);
  }
  return out;
}

std::vector<Eigen::VectorXd> simulation_smoother(const SSMProblem& prob,
                                                 std::mt19937_64& rng) {
  prob.validate();
  CovPass cp = run_cov_pass(prob);
  MeanPass mp_y = run_mean_pass(prob, cp, prob.y);
  std::vector<Eigen::VectorXd> sm_y = backward_means(prob, cp, mp_y);

  std::vector<Eigen::VectorXd> alpha_plus, y_plus;
  simulate_model(prob, rng, alpha_plus, y_plus);
  MeanPass mp_p = run_mean_pass(prob, cp, y_plus);
  std::vector<Eigen::VectorXd> sm_p = backward_means(prob, cp, mp_p);

  int n = prob.n_times();
  std::vector<Eigen::VectorXd> draw(n);
  for (int i = 0; i < n; ++i) draw[i] = sm_y[i] + alpha_plus[i] - sm_p[i];
  return draw;
}

GaussianState predictive_state(const GaussianState& at_end,
                               const std::vector<NGPTransition>& blocks) {
  int nb = static_cast<int>(blocks.size());
  int d = 3 * nb;
  if (at_end.mean.size() != d || at_end.cov.rows() != d)
    throw config_error("predictive_state: dimension mismatch");
  GaussianState out;
  out.mean = at_end.mean;
  out.cov = at_end.cov;
  for (int b = 0; b < nb; ++b) {
    double dl = blocks[b].delta;
    out.mean[3 * b] += dl * out.mean[3 * b + 1];
    out.mean[3 * b + 1] += dl * out.mean[3 * b + 2];
    out.cov.row(3 * b) += dl * out.cov.row(3 * b + 1);
    out.cov.row(3 * b + 1) += dl * out.cov.row(3 * b + 2);
  }
  for (int b = 0; b < nb; ++b) {
    double dl = blocks[b].delta;
    out.cov.col(3 * b) += dl * out.cov.col(3 * b + 1);
    out.cov.col(3 * b + 1) += dl * out.cov.col(3 * b + 2);
    out.cov(3 * b + 1, 3 * b + 1) += blocks[b].var_level * dl;
    out.cov(3 * b + 2, 3 * b + 2) += blocks[b].var_mean * dl;
  }
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace lady
