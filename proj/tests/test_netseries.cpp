#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "lady/netseries.hpp"

using namespace lady;

TEST_CASE("dyad indexing round-trips") {
  for (int V : {2, 3, 7, 30}) {
    int k = 0;
    for (int v = 1; v < V; ++v)
      for (int u = 0; u < v; ++u) {
        CHECK(dyad_index(v, u) == k);
        auto [vv, uu] = dyad_actors(k);
        CHECK(vv == v);
        CHECK(uu == u);
        ++k;
      }
    CHECK(k == dyad_count(V));
  }
}

TEST_CASE("time grid rejects non-increasing or non-finite times") {
  CHECK_THROWS_AS(TimeGrid({1.0, 1.0}), data_error);
  CHECK_THROWS_AS(TimeGrid({2.0, 1.0}), data_error);
  CHECK_THROWS_AS(TimeGrid({0.0, std::nan("")}), data_error);
  TimeGrid g({0.0, 0.5, 2.0});
  CHECK(g.delta(0) == 0.5);
  CHECK(g.delta(1) == 1.5);
}

TEST_CASE("load_contacts: parse, remap, errors") {
  {
    std::istringstream in("0,1,2\n0,2,3\n");
    ContactData d = load_contacts(in);
    CHECK(d.events.size() == 2);
    CHECK(d.V == 3);
    CHECK(d.id_map == std::vector<long long>{1, 2, 3});
  }
  {
    std::istringstream in("");
    ContactData d = load_contacts(in);
    CHECK(d.events.empty());
    CHECK(d.V == 0);
  }
  {
    std::istringstream in("0,5,5\n");
    CHECK_THROWS_AS(load_contacts(in), data_error);
  }
  {
    std::istringstream in("timestamp,u,v\n0,7,9\nbroken line\n");
    CHECK_THROWS_AS(load_contacts(in), data_error);
  }
  {
    // header tolerated
    std::istringstream in("timestamp,u,v\n0,7,9\n20,9,11\n");
    ContactData d = load_contacts(in);
    CHECK(d.events.size() == 2);
    CHECK(d.V == 3);
  }
}

TEST_CASE("aggregate_windows: binary collapse, midpoints, empty windows") {
  std::vector<ContactEvent> ev{{1.0, 0, 1}, {2.0, 0, 1}, {25.0, 1, 2}};
  NetworkSeries s = aggregate_windows(ev, 3, 10.0, 0.0, 30.0);
  CHECK(s.n_times() == 3);
  CHECK(s.grid.time(0) == doctest::Approx(5.0));
  CHECK(s.grid.time(1) == doctest::Approx(15.0));
  // two contacts in one window collapse to a single binary edge
  CHECK(s.snapshots[0](0, 1) == 1);
  CHECK(s.snapshots[0].edge_count() == 1);
  // middle window has no events
  CHECK(s.snapshots[1].edge_count() == 0);
  CHECK(s.snapshots[2](1, 2) == 1);

  // 51 ten-minute windows over a 510-minute school day
  std::vector<ContactEvent> one{{0.0, 0, 1}};
  NetworkSeries day = aggregate_windows(one, 2, 600.0, 0.0, 510.0 * 60.0);
  CHECK(day.n_times() == 51);

  // event outside the span is an error naming the timestamp
  std::vector<ContactEvent> bad{{31.0, 0, 1}};
  CHECK_THROWS_WITH_AS(aggregate_windows(bad, 2, 10.0, 0.0, 30.0),
                       doctest::Contains("31"), data_error);
}

TEST_CASE("aggregation is idempotent at window granularity") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0, 1);
  std::vector<ContactEvent> ev;
  for (int w = 0; w < 6; ++w)
    for (int v = 1; v < 5; ++v)
      for (int u = 0; u < v; ++u)
        if (unif(rng) < 0.4) ev.push_back({w * 10.0 + 10 * unif(rng), u, v});
  NetworkSeries s = aggregate_windows(ev, 5, 10.0, 0.0, 60.0);
  CHECK(validate(s).ok());

  // rebuild the edge list from the series at the grid times, re-aggregate
  std::vector<ContactEvent> back;
  for (int i = 0; i < s.n_times(); ++i)
    for (int v = 1; v < 5; ++v)
      for (int u = 0; u < v; ++u)
        if (s.snapshots[i](v, u)) back.push_back({s.grid.time(i), u, v});
  NetworkSeries s2 = aggregate_windows(back, 5, 10.0, 0.0, 60.0);
  REQUIRE(s2.n_times() == s.n_times());
  for (int i = 0; i < s.n_times(); ++i)
    CHECK(s2.snapshots[i].dyads() == s.snapshots[i].dyads());
}

TEST_CASE("subset_actors: identity, singleton, relabeling composition") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0, 1);
  NetworkSeries s((TimeGrid({0.0, 1.0, 2.0})), 6);
  for (int i = 0; i < 3; ++i)
    for (int v = 1; v < 6; ++v)
      for (int u = 0; u < v; ++u)
        if (unif(rng) < 0.5) s.snapshots[i].set(v, u, true);
  s.labels["class"] = {"a", "a", "b", "b", "c", "c"};

  std::vector<int> all{0, 1, 2, 3, 4, 5};
  NetworkSeries same = subset_actors(s, all);
  for (int i = 0; i < 3; ++i)
    CHECK(same.snapshots[i].dyads() == s.snapshots[i].dyads());

  NetworkSeries one = subset_actors(s, {0});
  CHECK(one.V == 1);
  for (int i = 0; i < 3; ++i) CHECK(one.snapshots[i].edge_count() == 0);

  CHECK_THROWS_AS(subset_actors(s, {0, 9}), data_error);

  // subset(series, A n B) == subset(subset(series, A), positions of B in A)
  std::vector<int> A{0, 2, 3, 5}, B{2, 5, 0};
  std::vector<int> AnB;
  for (int a : A)
    if (std::find(B.begin(), B.end(), a) != B.end()) AnB.push_back(a);
  NetworkSeries lhs = subset_actors(s, AnB);
  std::vector<int> pos;
  for (std::size_t idx = 0; idx < A.size(); ++idx)
    if (std::find(B.begin(), B.end(), A[idx]) != B.end())
      pos.push_back(static_cast<int>(idx));
  NetworkSeries rhs = subset_actors(subset_actors(s, A), pos);
  for (int i = 0; i < 3; ++i)
    CHECK(lhs.snapshots[i].dyads() == rhs.snapshots[i].dyads());
  CHECK(lhs.labels.at("class") == rhs.labels.at("class"));
}

TEST_CASE("dense-matrix validation catches symmetry/diagonal/binary issues") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
  M(1, 2) = 1.0;  // asymmetric: M(2,1) stays 0
  auto rep1 = validate_dense(M);
  REQUIRE(rep1.issues.size() == 1);
  CHECK(rep1.issues[0].what == "asymmetric");

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(4, 4);
  D(3, 3) = 1.0;
  auto rep2 = validate_dense(D);
  REQUIRE(rep2.issues.size() == 1);
  CHECK(rep2.issues[0].what == "diagonal");

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
  B(2, 0) = B(0, 2) = 2.0;
  auto rep3 = validate_dense(B);
  CHECK(!rep3.ok());

  Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(3, 3);
  ok(0, 1) = ok(1, 0) = 1.0;
  CHECK(validate_dense(ok).ok());
}

TEST_CASE("series survives a disk round trip") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> unif(0, 1);
  NetworkSeries s((TimeGrid({0.25, 1.5, 2.75, 4.0})), 5);
  for (int i = 0; i < 4; ++i)
    for (int v = 1; v < 5; ++v)
      for (int u = 0; u < v; ++u)
        if (unif(rng) < 0.45) s.snapshots[i].set(v, u, true);
  s.labels["gender"] = {"M", "F", "F", "M", "F"};

  auto base = std::filesystem::temp_directory_path() / "lady_series_rt";
  save_series(s, base.string());
  NetworkSeries r = load_series(base.string());
  CHECK(r.V == s.V);
  REQUIRE(r.n_times() == s.n_times());
  for (int i = 0; i < 4; ++i) {
    CHECK(r.grid.time(i) == doctest::Approx(s.grid.time(i)));
    CHECK(r.snapshots[i].dyads() == s.snapshots[i].dyads());
  }
  CHECK(r.labels.at("gender") == s.labels.at("gender"));
}
