#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lady/netstats.hpp"
#include "lady/simgen.hpp"
#include "test_util.hpp"

using namespace lady;

TEST_CASE("default regimes realize the block structures") {
  RegimeSpec spec = default_regimes(0.8, 0.4, 0.05);
  REQUIRE(spec.prob.size() == 5);

  // regime 1: within-class 0.8, cross-class 0.05
  const auto& r1 = spec.prob[0];
  CHECK(r1(0, 1) == doctest::Approx(0.8));
  CHECK(r1(12, 17) == doctest::Approx(0.8));
  CHECK(r1(0, 12) == doctest::Approx(0.05));
  for (int v = 0; v < 30; ++v) CHECK(r1(v, v) == 0.0);

  // regime 2: same-gender p_high regardless of class
  const auto& r2 = spec.prob[1];
  CHECK(spec.gender_of[0] == spec.gender_of[16]);  // both male, across classes
  CHECK(r2(0, 16) == doctest::Approx(0.8));
  CHECK(spec.gender_of[0] != spec.gender_of[5]);
  CHECK(r2(0, 5) == doctest::Approx(0.05));

  // regime 3: classes 1-2 share a room at p_med
  const auto& r3 = spec.prob[2];
  CHECK(r3(0, 12) == doctest::Approx(0.4));
  CHECK(r3(0, 22) == doctest::Approx(0.05));
  CHECK(r3(3, 7) == doctest::Approx(0.8));

  // regime 4: class 2 split between the two lunch blocks, absentees zeroed
  const auto& r4 = spec.prob[3];
  CHECK(r4(0, 12) > 0.4);    // first half of class 2 joins class 1
  CHECK(r4(17, 25) > 0.4);   // second half joins class 3
  CHECK(r4(12, 17) < 0.05);  // across the two blocks
  for (int a : {2, 7, 23, 29}) {
    for (int u = 0; u < 30; ++u) CHECK(r4(a, u) == 0.0);
  }

  // all regimes symmetric with probabilities in [0,1]
  for (const auto& P : spec.prob) {
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(P.minCoeff() >= 0.0);
    CHECK(P.maxCoeff() <= 1.0);
  }

  CHECK_THROWS_AS(default_regimes(0.2, 0.4, 0.05), config_error);
}

TEST_CASE("default schedule: grid, length, departures") {
  auto [sched, grid] = default_schedule();
  CHECK(grid.size() == 50);
  CHECK(grid.time(0) == 0.0);
  CHECK(grid.time(49) == doctest::Approx(15.0));
  CHECK(grid.delta(0) == doctest::Approx(15.0 / 49.0));
  CHECK(sched.regime.size() == 50);
  for (int k : sched.regime) {
    CHECK(k >= 1);
    CHECK(k <= 5);
  }
  REQUIRE(sched.departures.size() == 2);
  CHECK(sched.departures[0].time_index == 41);  // t_42, 1-based
  CHECK(sched.departures[1].time_index == 45);  // t_46
}

TEST_CASE("departures zero the listed actors from their time on") {
  RegimeSpec spec = default_regimes();
  auto [sched, grid] = default_schedule();
  for (int i : {41, 45, 49}) {
    Eigen::MatrixXd P = true_pi_at(sched, spec, i);
    for (int a : {0, 3, 9, 11})
      for (int u = 0; u < 30; ++u) CHECK(P(a, u) == 0.0);
  }
  Eigen::MatrixXd before = true_pi_at(sched, spec, 40);
  CHECK(before.row(0).maxCoeff() > 0.0);
  Eigen::MatrixXd after46 = true_pi_at(sched, spec, 45);
  for (int a : {15, 19, 25, 27})
    for (int u = 0; u < 30; ++u) CHECK(after46(a, u) == 0.0);
}

TEST_CASE("simulate: validity, determinism, truth passthrough") {
  RegimeSpec spec = default_regimes();
  auto [sched, grid] = default_schedule();
  SimOutput a = simulate(sched, spec, grid, 7);
  SimOutput b = simulate(sched, spec, grid, 7);
  SimOutput c = simulate(sched, spec, grid, 8);

  CHECK(validate(a.series).ok());
  CHECK(a.series.V == 30);
  CHECK(a.series.n_times() == 50);
  bool identical = true, differs = false;
  for (int i = 0; i < 50; ++i) {
    identical &= a.series.snapshots[i].dyads() == b.series.snapshots[i].dyads();
    differs |= a.series.snapshots[i].dyads() != c.series.snapshots[i].dyads();
  }
  CHECK(identical);
  CHECK(differs);

  // ground-truth pi equals the scheduled matrices with departures applied
  for (int i : {0, 20, 41, 45, 49}) {
    Eigen::MatrixXd expect = true_pi_at(sched, spec, i);
    CHECK((a.true_pi[i] - expect).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(a.series.labels.count("class") == 1);
  CHECK(a.series.labels.count("gender") == 1);
}

TEST_CASE("edge cases: all-zero and all-one probability schedules") {
  RegimeSpec spec = default_regimes();
  spec.prob[0].setZero();
  spec.prob[1].setOnes();
  spec.prob[1].diagonal().setZero();
  Schedule sched;
  sched.regime = {1, 2};
  TimeGrid grid({0.0, 1.0});
  SimOutput out = simulate(sched, spec, grid, 3);
  CHECK(out.series.snapshots[0].edge_count() == 0);
  CHECK(out.series.snapshots[1].edge_count() == dyad_count(30));
}

TEST_CASE("within-class edge frequency matches p_high over replicates") {
  RegimeSpec spec = default_regimes(0.8, 0.4, 0.05);
  Schedule sched;
  sched.regime = {1, 1};
  TimeGrid grid({0.0, 1.0});
  long hits = 0, total = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    SimOutput out = simulate(sched, spec, grid, 1000 + rep);
    const auto& A = out.series.snapshots[0];
    for (int v = 1; v < 30; ++v)
      for (int u = 0; u < v; ++u)
        if (spec.class_of[v] == spec.class_of[u]) {
          hits += A(v, u);
          ++total;
        }
  }
  double p = static_cast<double>(hits) / total;
  double se = std::sqrt(0.8 * 0.2 / total);
  CHECK(std::abs(p - 0.8) < 4 * se);
}
