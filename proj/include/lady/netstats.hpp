#pragma once

#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lady/gibbs.hpp"
#include "lady/netseries.hpp"

namespace lady {

/// Edge count over V(V-1)/2.
double density(const AdjacencyMatrix& A);

/// Number of neighbours of v.
int degree(const AdjacencyMatrix& A, int v);

// Newman's discrete assortativity coefficient from the symmetrized mixing
// matrix: r = (sum_k e_kk - sum_k a_k^2) / (1 - sum_k a_k^2).
// Undefined (nullopt) for edgeless graphs, a single label class among the
// endpoints, or a perfectly assortative complete-mixing denominator of 0.
std::optional<double> assortativity(const AdjacencyMatrix& A,
                                    const std::vector<int>& labels);

// Exact tie-corrected Mann-Whitney AUC: P(s+ > s-) + 0.5 P(s+ = s-).
// Undefined when either class is absent.
std::optional<double> auc(std::span<const double> scores,
                          std::span<const int> labels);

// Split-chain potential scale reduction factor from m >= 2 equal-length
// sub-chains: R = sqrt(((L-1)/L * W + B/L) / W). Undefined when W = 0.
std::optional<double> psrf(const std::vector<std::vector<double>>& subchains);

// Convenience: split one chain into m consecutive equal sub-chains (trailing
// remainder dropped) and compute psrf.
std::optional<double> split_psrf(std::span<const double> chain, int m = 4);

/// One Bernoulli network draw from dyad-major edge probabilities.
AdjacencyMatrix sample_bernoulli_network(std::span<const double> pi_dyads,
                                         int V, std::mt19937_64& rng);

struct ExpectedAssortativity {
  std::vector<double> draws;  // one MC-averaged coefficient per pi draw
  int undefined_dropped = 0;  // simulated networks with undefined coefficient
};

// For each posterior draw of the dyad probabilities at one time, simulate
// n_sim networks, compute the assortativity of each and average.
ExpectedAssortativity expected_assortativity_mc(
    const std::vector<std::vector<double>>& pi_draws, int V,
    const std::vector<int>& labels, int n_sim, std::mt19937_64& rng);

// Map a string attribute to dense integer classes (order of first appearance).
std::vector<int> encode_labels(const std::vector<std::string>& values);

struct Band {
  double observed = 0, mean = 0, lo = 0, hi = 0;
  bool observed_defined = true;
};

struct CheckReport {
  std::vector<Band> density;                         // per time
  std::map<std::string, std::vector<Band>> assort;   // per attribute, per time
  std::vector<std::vector<Band>> degree;             // [time][actor]
  double density_coverage = 0;  // fraction of observed values inside bands
  double degree_coverage = 0;
};

// Posterior-predictive model checking: one Bernoulli network per retained pi
// draw per time; equal-tailed bands at the given level for network density,
// per-actor degree, and assortativity of every labelled attribute.
CheckReport posterior_predictive_check(const PosteriorStore& store,
                                       const NetworkSeries& observed,
                                       std::mt19937_64& rng,
                                       double level = 0.95);

}  // namespace lady
