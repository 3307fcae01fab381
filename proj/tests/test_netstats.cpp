#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lady/netstats.hpp"
#include "test_util.hpp"

using namespace lady;

namespace {

AdjacencyMatrix from_edges(int V, std::initializer_list<std::pair<int, int>> es) {
  AdjacencyMatrix A(V);
  for (auto [u, v] : es) A.set(v, u, true);
  return A;
}

}  // namespace

TEST_CASE("density: empty, complete, half") {
  AdjacencyMatrix empty(4);
  CHECK(density(empty) == 0.0);

  AdjacencyMatrix full(4);
  for (int v = 1; v < 4; ++v)
    for (int u = 0; u < v; ++u) full.set(v, u, true);
  CHECK(density(full) == 1.0);

  AdjacencyMatrix half = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(density(half) == doctest::Approx(0.5));
}

TEST_CASE("degree in a star of five") {
  AdjacencyMatrix star = from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(degree(star, 0) == 4);
  CHECK(degree(star, 1) == 1);
  AdjacencyMatrix iso(3);
  CHECK(degree(iso, 1) == 0);
}

TEST_CASE("assortativity hand cases") {
  // two same-label cliques -> 1
  AdjacencyMatrix cliques =
      from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
  std::vector<int> lab{0, 0, 0, 1, 1, 1};
  CHECK(assortativity(cliques, lab).value() == doctest::Approx(1.0));

  // complete bipartite across labels -> -1
  AdjacencyMatrix bip(4);
  for (int a : {0, 1})
    for (int b : {2, 3}) bip.set(b, a, true);
  std::vector<int> lb{0, 0, 1, 1};
  CHECK(assortativity(bip, lb).value() == doctest::Approx(-1.0));

  // path A-A-B-B: r = (2/3 - 1/2) / (1 - 1/2) = 1/3
  AdjacencyMatrix path = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(assortativity(path, lb).value() == doctest::Approx(1.0 / 3.0));

  // undefined: no edges, or one label class
  AdjacencyMatrix none(4);
  CHECK(!assortativity(none, lb).has_value());
  std::vector<int> mono{0, 0, 0, 0};
  CHECK(!assortativity(path, mono).has_value());
}

TEST_CASE("assortativity is invariant under consistent label permutation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0, 1);
  AdjacencyMatrix A(8);
  for (int v = 1; v < 8; ++v)
    for (int u = 0; u < v; ++u)
      if (unif(rng) < 0.4) A.set(v, u, true);
  std::vector<int> lab{0, 1, 0, 2, 1, 2, 0, 1};
  // permute actors
  std::vector<int> perm{3, 0, 6, 1, 7, 2, 5, 4};
  AdjacencyMatrix B(8);
  std::vector<int> plab(8);
  for (int v = 0; v < 8; ++v) {
    plab[perm[v]] = lab[v];
    for (int u = 0; u < v; ++u)
      if (A(v, u)) B.set(perm[v], perm[u], true);
  }
  CHECK(assortativity(A, lab).value() ==
        doctest::Approx(assortativity(B, plab).value()).epsilon(1e-12));
}

TEST_CASE("auc hand cases") {
  std::vector<double> s1{1.0, 2.0, 3.0, 4.0};
  std::vector<int> l1{0, 0, 1, 1};
  CHECK(auc(s1, l1).value() == doctest::Approx(1.0));

  std::vector<double> s2{0.5, 0.5, 0.5, 0.5};
  CHECK(auc(s2, l1).value() == doctest::Approx(0.5));

  // brute force over 4 pos-neg pairs: 3 wins, 1 loss
  std::vector<double> s3{0.1, 0.4, 0.35, 0.8};
  CHECK(auc(s3, l1).value() == doctest::Approx(0.75));

  std::vector<int> single{1, 1, 1, 1};
  CHECK(!auc(s3, single).has_value());
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0, 1);
  std::vector<double> s(200);
  std::vector<int> l(200);
  for (int i = 0; i < 200; ++i) {
    s[i] = unif(rng);
    l[i] = unif(rng) < 0.3 ? 1 : 0;
  }
  l[0] = 1;
  l[1] = 0;
  auto base = auc(s, l).value();
  std::vector<double> t(200);
  for (int i = 0; i < 200; ++i) t[i] = std::exp(3.0 * s[i]) - 5.0;
  CHECK(auc(t, l).value() == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("psrf: undefined for constant chains, ~1 for iid, large for split") {
  std::vector<std::vector<double>> constant(4, std::vector<double>(100, 2.0));
  CHECK(!psrf(constant).has_value());

  std::mt19937_64 rng(17);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<std::vector<double>> iid(4, std::vector<double>(1000));
  for (auto& c : iid)
    for (auto& x : c) x = norm(rng);
  double r = psrf(iid).value();
  CHECK(r > 0.97);
  CHECK(r < 1.05);

  std::vector<std::vector<double>> apart(2, std::vector<double>(1000));
  for (auto& x : apart[0]) x = -10.0 + norm(rng);
  for (auto& x : apart[1]) x = 10.0 + norm(rng);
  CHECK(psrf(apart).value() > 3.0);
}

TEST_CASE("split_psrf splits one chain into four consecutive sub-chains") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> chain(4000);
  for (auto& x : chain) x = norm(rng);
  double r = split_psrf(chain, 4).value();
  CHECK(r > 0.97);
  CHECK(r < 1.05);
}

TEST_CASE("posterior predictive edge frequency converges to pi") {
  std::mt19937_64 rng(5);
  int V = 6;
  int D = dyad_count(V);
  std::vector<double> pi(D);
  for (int k = 0; k < D; ++k) pi[k] = 0.05 + 0.9 * k / (D - 1);
  const int N = 10'000;
  std::vector<double> freq(D, 0.0);
  for (int r = 0; r < N; ++r) {
    AdjacencyMatrix A = sample_bernoulli_network(pi, V, rng);
    for (int k = 0; k < D; ++k) freq[k] += A.dyads()[k];
  }
  for (int k = 0; k < D; ++k) {
    double p = freq[k] / N;
    double se = std::sqrt(pi[k] * (1 - pi[k]) / N);
    CHECK(std::abs(p - pi[k]) < 4 * se + 1e-12);
  }

  // draw count in == draw count out for the zero matrix
  std::vector<double> zero(D, 0.0);
  AdjacencyMatrix A = sample_bernoulli_network(zero, V, rng);
  CHECK(A.edge_count() == 0);
}

TEST_CASE("expected assortativity: block-perfect pi gives 1, flat pi gives "
          "the finite-graph null") {
  std::mt19937_64 rng(9);
  int V = 10;
  std::vector<int> lab(V);
  for (int v = 0; v < V; ++v) lab[v] = v < 5 ? 0 : 1;
  int D = dyad_count(V);

  std::vector<double> block(D, 0.0);
  for (int v = 1; v < V; ++v)
    for (int u = 0; u < v; ++u)
      if (lab[v] == lab[u]) block[dyad_index(v, u)] = 1.0;
  auto r1 = expected_assortativity_mc({block}, V, lab, 50, rng);
  CHECK(r1.draws[0] == doctest::Approx(1.0));

  // label-independent edges carry no homophily; on a finite graph Newman's r
  // then sits at a small negative baseline of order -1/(V-1), vanishing as V
  // grows
  std::vector<double> flat(D, 0.5);
  std::vector<std::vector<double>> draws(40, flat);
  auto r0 = expected_assortativity_mc(draws, V, lab, 100, rng);
  double m = testutil::mean(r0.draws);
  CHECK(m < 0.0);
  CHECK(m > -0.2);

  int W = 100;
  std::vector<int> wlab(W);
  for (int v = 0; v < W; ++v) wlab[v] = v < 50 ? 0 : 1;
  std::vector<double> wflat(dyad_count(W), 0.5);
  std::vector<std::vector<double>> wdraws(20, wflat);
  auto rw = expected_assortativity_mc(wdraws, W, wlab, 50, rng);
  CHECK(std::abs(testutil::mean(rw.draws)) < 0.02);
}

TEST_CASE("expected assortativity is strongly positive under gender blocks") {
  // regime-2-style structure: same-gender 0.8, cross-gender 0.05
  std::mt19937_64 rng(10);
  int V = 30;
  std::vector<int> gender(V);
  for (int v = 0; v < V; ++v) gender[v] = (v <= 4 || (v >= 15 && v <= 24)) ? 0 : 1;
  std::vector<double> pi(dyad_count(V));
  for (int v = 1; v < V; ++v)
    for (int u = 0; u < v; ++u)
      pi[dyad_index(v, u)] = gender[v] == gender[u] ? 0.8 : 0.05;
  std::vector<std::vector<double>> draws(20, pi);
  auto r = expected_assortativity_mc(draws, V, gender, 100, rng);
  for (double x : r.draws) CHECK(x > 0.5);
}

TEST_CASE("density equals mean degree over V-1") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    int V = 3 + rep % 7;
    AdjacencyMatrix A(V);
    for (int v = 1; v < V; ++v)
      for (int u = 0; u < v; ++u)
        if (unif(rng) < 0.5) A.set(v, u, true);
    double mean_deg = 0;
    for (int v = 0; v < V; ++v) mean_deg += degree(A, v);
    mean_deg /= V;
    CHECK(density(A) == doctest::Approx(mean_deg / (V - 1)).epsilon(1e-12));
  }
}
