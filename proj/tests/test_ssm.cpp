#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <random>

#include "dense_oracle.hpp"
#include "lady/ssm.hpp"
#include "test_util.hpp"

using namespace lady;

namespace {

// small asymmetric toy: n=3, one block, scalar observations on the level
SSMProblem toy3() {
  SSMProblem p = make_ssm_problem({0.5, 1.2}, {{{0.7, 1.3}}}, 100.0);
  double ys[3] = {0.3, -0.8, 1.1};
  double hs[3] = {0.5, 2.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    p.Z[i] = Eigen::MatrixXd::Zero(1, 3);
    p.Z[i](0, 0) = 1.0;
    p.y[i] = Eigen::VectorXd::Constant(1, ys[i]);
    p.obs_var[i] = Eigen::VectorXd::Constant(1, hs[i]);
  }
  return p;
}

SSMProblem random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(1, 5), bd(1, 2), pd(0, 4);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  std::normal_distribution<double> norm(0.0, 1.0);
  int n = nd(rng), nb = bd(rng);
  std::vector<double> deltas(n - 1);
  for (auto& d : deltas) d = unif(rng);
  std::vector<std::array<double, 2>> bv(nb);
  for (auto& b : bv) b = {unif(rng), unif(rng)};
  SSMProblem p = make_ssm_problem(deltas, bv, 5.0 * unif(rng));
  int d = p.dim();
  for (int i = 0; i < n; ++i) {
    int pi = pd(rng);
    p.Z[i] = Eigen::MatrixXd::Zero(pi, d);
    p.y[i].resize(pi);
    p.obs_var[i].resize(pi);
    for (int j = 0; j < pi; ++j) {
      for (int b = 0; b < nb; ++b) p.Z[i](j, 3 * b) = norm(rng);  // level loads
      p.y[i][j] = 2.0 * norm(rng);
      p.obs_var[i][j] = unif(rng);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("nGP transition matrices match the state equations") {
  NGPTransition t = build_ngp_transition(1.0, 1.0, 1.0);
  Eigen::Matrix3d expect;
  expect << 1, 1, 0, 0, 1, 1, 0, 0, 1;
  CHECK((t.T() - expect).norm() == doctest::Approx(0.0));
  CHECK(t.R()(1, 0) == 1.0);
  CHECK(t.R()(2, 1) == 1.0);
  CHECK(t.R()(0, 0) == 0.0);

  // delta = 15/49 from the equally spaced benchmark grid
  NGPTransition g = build_ngp_transition(15.0 / 49.0, 1.0, 1.0);
  CHECK(g.Q()(0, 0) == doctest::Approx(15.0 / 49.0).epsilon(1e-15));
  CHECK(g.Q()(1, 1) == doctest::Approx(15.0 / 49.0).epsilon(1e-15));

  // delta -> 0 limit: T -> I, Q -> 0
  NGPTransition s = build_ngp_transition(1e-12, 1.0, 1.0);
  CHECK((s.T() - Eigen::Matrix3d::Identity()).norm() < 1e-11);
  CHECK(s.Q().norm() < 1e-11);

  CHECK_THROWS_AS(build_ngp_transition(0.0, 1.0, 1.0), config_error);
  CHECK_THROWS_AS(build_ngp_transition(1.0, -1.0, 1.0), config_error);
  CHECK_THROWS_AS(build_ngp_transition(1.0, 1.0, 0.0), config_error);
}

TEST_CASE("filter matches the dense conditional oracle on the toy") {
  SSMProblem p = toy3();
  KalmanResult kr = kalman_filter(p);
  for (int i = 0; i < 3; ++i) {
    auto ref = oracle::dense_condition(p, i + 1);
    double err = (kr.filt_mean[i] - ref.mean.segment(3 * i, 3)).cwiseAbs().maxCoeff();
    CHECK(err < 1e-8);
    double cerr = (kr.filt_cov[i] - ref.cov.block(3 * i, 3 * i, 3, 3))
                      .cwiseAbs()
                      .maxCoeff();
    CHECK(cerr < 1e-8);
  }
}

TEST_CASE("no observations: filtered mean stays at prior zero") {
  SSMProblem p = make_ssm_problem({1.0, 1.0, 1.0}, {{{0.5, 0.5}}}, 100.0);
  KalmanResult kr = kalman_filter(p);
  for (int i = 0; i < 4; ++i) {
    CHECK(kr.filt_mean[i].cwiseAbs().maxCoeff() == 0.0);
    CHECK(kr.pred_mean[i].cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(kr.loglik == 0.0);
}

TEST_CASE("filter is a pure function of its input") {
  SSMProblem p = toy3();
  KalmanResult a = kalman_filter(p);
  KalmanResult b = kalman_filter(p);
  CHECK(a.loglik == b.loglik);
  for (int i = 0; i < 3; ++i)
    CHECK((a.filt_mean[i] - b.filt_mean[i]).norm() == 0.0);
}

TEST_CASE("smoother matches the dense oracle; n=1 equals the filter") {
  SSMProblem p = toy3();
  SmootherResult sm = smoother(p);
  auto ref = oracle::dense_condition_all(p);
  for (int i = 0; i < 3; ++i) {
    CHECK((sm.mean[i] - ref.mean.segment(3 * i, 3)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((sm.cov[i] - ref.cov.block(3 * i, 3 * i, 3, 3)).cwiseAbs().maxCoeff() <
          1e-8);
  }

  SSMProblem p1 = make_ssm_problem({}, {{{1.0, 1.0}}}, 100.0);
  p1.Z[0] = Eigen::MatrixXd::Zero(1, 3);
  p1.Z[0](0, 0) = 1.0;
  p1.y[0] = Eigen::VectorXd::Constant(1, 0.7);
  p1.obs_var[0] = Eigen::VectorXd::Constant(1, 0.3);
  SmootherResult s1 = smoother(p1);
  KalmanResult k1 = kalman_filter(p1);
  CHECK((s1.mean[0] - k1.filt_mean[0]).norm() < 1e-14);
  CHECK((s1.cov[0] - k1.filt_cov[0]).norm() < 1e-12);
}

TEST_CASE("huge observation noise pulls the smoother to the prior mean") {
  SSMProblem p = toy3();
  for (int i = 0; i < 3; ++i)
    p.obs_var[i] = Eigen::VectorXd::Constant(1, 1e12);
  SmootherResult sm = smoother(p);
  for (int i = 0; i < 3; ++i)
    CHECK(sm.mean[i].cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("simulation smoother reproduces the smoothing distribution") {
  SSMProblem p = toy3();
  SmootherResult sm = smoother(p);
  std::mt19937_64 rng(2024);
  const int N = 100'000;
  // accumulate first and second moments of the stacked draw
  int d = 3, n = 3;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(n * d);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n * d, n * d);
  Eigen::VectorXd stacked(n * d);
  for (int r = 0; r < N; ++r) {
    auto draw = simulation_smoother(p, rng);
    for (int i = 0; i < n; ++i) stacked.segment(i * d, d) = draw[i];
    s1 += stacked;
    s2 += stacked * stacked.transpose();
  }
  s1 /= N;
  Eigen::MatrixXd cov = s2 / N - s1 * s1.transpose();

  auto ref = oracle::dense_condition_all(p);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      double sd = std::sqrt(ref.cov(i * d + k, i * d + k) / N);
      CHECK(std::abs(s1[i * d + k] - ref.mean[i * d + k]) < 4 * sd);
    }
    // entrywise covariance against the oracle within 4 MC SE
    for (int a = 0; a < d; ++a)
      for (int b = 0; b <= a; ++b) {
        double caa = ref.cov(i * d + a, i * d + a);
        double cbb = ref.cov(i * d + b, i * d + b);
        double cab = ref.cov(i * d + a, i * d + b);
        double se = std::sqrt((caa * cbb + cab * cab) / N);
        CHECK(std::abs(cov(i * d + a, i * d + b) - cab) < 4 * se);
      }
  }
}

TEST_CASE("simulation smoother is seed-deterministic") {
  SSMProblem p = toy3();
  std::mt19937_64 r1(5), r2(5);
  auto a = simulation_smoother(p, r1);
  auto b = simulation_smoother(p, r2);
  for (int i = 0; i < 3; ++i) CHECK((a[i] - b[i]).norm() == 0.0);
}

TEST_CASE("predictive state: identity at delta=0 and hand case at delta=1") {
  GaussianState g;
  g.mean = Eigen::Vector3d(1.0, 2.0, 3.0);
  g.cov = Eigen::Matrix3d::Identity() * 0.5;

  GaussianState same = predictive_state(g, {NGPTransition{0.0, 0.0, 0.0}});
  CHECK((same.mean - g.mean).norm() == 0.0);
  CHECK((same.cov - g.cov).norm() == 0.0);

  GaussianState next = predictive_state(g, {NGPTransition{1.0, 0.3, 0.4}});
  CHECK(next.mean[0] == doctest::Approx(3.0));
  CHECK(next.mean[1] == doctest::Approx(5.0));
  CHECK(next.mean[2] == doctest::Approx(3.0));
}

TEST_CASE("predictive state matches the oracle marginal one step ahead") {
  SSMProblem p = toy3();
  KalmanResult kr = kalman_filter(p);
  double dn = 0.8;
  GaussianState at_end{kr.filt_mean[2], kr.filt_cov[2]};
  GaussianState pred = predictive_state(at_end, {NGPTransition{dn, 0.7, 1.3}});

  // oracle route: append an unobserved time and condition on everything
  SSMProblem ext = p;
  ext.deltas.push_back(dn);
  ext.Z.push_back(Eigen::MatrixXd::Zero(0, 3));
  ext.y.push_back(Eigen::VectorXd::Zero(0));
  ext.obs_var.push_back(Eigen::VectorXd::Zero(0));
  auto ref = oracle::dense_condition_all(ext);
  CHECK((pred.mean - ref.mean.segment(9, 3)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((pred.cov - ref.cov.block(9, 9, 3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("property: filter/smoother/loglik agree with the oracle on random "
          "instances") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    SSMProblem p = random_instance(rng);
    int n = p.n_times(), d = p.dim();
    CAPTURE(trial);

    KalmanResult kr = kalman_filter(p);
    SmootherResult sm = smoother(p);
    auto full = oracle::dense_condition_all(p);

    CHECK(std::abs(kr.loglik - full.loglik) < 1e-7);
    for (int i = 0; i < n; ++i) {
      auto pref = oracle::dense_condition(p, i + 1);
      CHECK((kr.filt_mean[i] - pref.mean.segment(i * d, d)).cwiseAbs().maxCoeff() <
            1e-7);
      CHECK((kr.filt_cov[i] - pref.cov.block(i * d, i * d, d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-7);
      CHECK((sm.mean[i] - full.mean.segment(i * d, d)).cwiseAbs().maxCoeff() <
            1e-7);
      CHECK((sm.cov[i] - full.cov.block(i * d, i * d, d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-7);
      // smoothed covariances stay symmetric PSD
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sm.cov[i]);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("runtime scales linearly in the number of time points") {
  auto build = [](int n) {
    std::vector<double> deltas(n - 1, 0.1);
    SSMProblem p = make_ssm_problem(deltas, {{{0.5, 0.8}}}, 100.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> norm(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      p.Z[i] = Eigen::MatrixXd::Zero(1, 3);
      p.Z[i](0, 0) = 1.0;
      p.y[i] = Eigen::VectorXd::Constant(1, norm(rng));
      p.obs_var[i] = Eigen::VectorXd::Constant(1, 0.5);
    }
    return p;
  };
  auto time_solve = [](const SSMProblem& p) {
    double best = 1e100;
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      SmootherResult sm = smoother(p);
      auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
      (void)sm;
    }
    return best;
  };
  SSMProblem small = build(4000), big = build(8000);
  time_solve(small);  // warm up allocator
  double ts = time_solve(small), tb = time_solve(big);
  CHECK(tb / ts < 2.3);
}

TEST_CASE("invalid problems are rejected") {
  SSMProblem p = toy3();
  p.obs_var[1][0] = 0.0;
  CHECK_THROWS_AS(kalman_filter(p), config_error);
  SSMProblem q = toy3();
  q.deltas[0] = -1.0;
  CHECK_THROWS_AS(kalman_filter(q), config_error);
}
