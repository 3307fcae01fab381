#pragma once

#include <cstdint>
#include <random>

namespace lady {

/// E[PG(1,c)] = tanh(c/2)/(2c), with the c -> 0 limit 1/4.
double pg1_mean(double c);

/// Var[PG(1,c)] = (sinh(c) - c) sech^2(c/2) / (4 c^3), c -> 0 limit 1/24.
double pg1_var(double c);

struct PGStats {
  std::uint64_t draws = 0;
  std::uint64_t proposals = 0;
};

// Exact draw from PG(1, c) by the alternating-series rejection sampler of
// Devroye as adapted by Polson-Scott-Windle. Depends on c only through |c|.
// Throws on non-finite c.
double sample_pg1(double c, std::mt19937_64& rng, PGStats* stats = nullptr);

}  // namespace lady
