#include "lady/pg.hpp"

#include <cmath>

#include "lady/errors.hpp"

// PG(1,c) equals J*(1, c/2)/4 where J* is the Jacobi random variable of
// Devroye (2009). The density of J*(1,z) restricted to either side of the
// truncation point t = 0.64 is sandwiched by partial sums of an alternating
// series, so a proposal from the exact mixture of a truncated inverse-Gaussian
// (left of t) and a shifted exponential (right of t) can be accepted or
// rejected after finitely many terms, with no approximation anywhere.

namespace lady {

namespace {

constexpr double kTrunc = 0.64;
constexpr double kPi = 3.141592653589793238462643383279502884;

// log of the standard normal CDF, adequate over the range used here
double log_norm_cdf(double x) {
  return std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
}

// coefficients a_n(x) of the alternating series for the J*(1,z) density
double series_coef(int n, double x) {
  double k = (n + 0.5) * kPi;
  if (x > kTrunc) {
    return k * std::exp(-0.5 * k * k * x);
  }
  if (x > 0) {
    double expnt = -1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) -
                   2.0 * (n + 0.5) * (n + 0.5) / x;
    return std::exp(expnt);
  }
  return 0.0;
}

// probability that the proposal falls in the exponential (right) branch
double mass_texpon(double z) {
  double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  double b = std::sqrt(1.0 / kTrunc) * (kTrunc * z - 1.0);
  double a = -std::sqrt(1.0 / kTrunc) * (kTrunc * z + 1.0);

  double x0 = std::log(fz) + fz * kTrunc;
  double xb = x0 - z + log_norm_cdf(b);
  double xa = x0 + z + log_norm_cdf(a);
  double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + qdivp);
}

// inverse-Gaussian(1/z, 1) truncated to (0, kTrunc]
double rtigauss(double z, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> norm(0.0, 1.0);

  double x = kTrunc + 1.0;
  if (1.0 / kTrunc > z) {
    // low tilt: rejection from the chi-square-derived tail of 1/IG
    double alpha = 0.0;
    while (unif(rng) > alpha) {
      double e1 = expo(rng), e2 = expo(rng);
      while (e1 * e1 > 2.0 * e2 / kTrunc) {
        e1 = expo(rng);
        e2 = expo(rng);
      }
      x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    double mu = 1.0 / z;
    while (x > kTrunc) {
      double y = norm(rng);
      y *= y;
      double mu_y = mu * y;
      x = mu + 0.5 * mu * mu_y - 0.5 * mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (unif(rng) > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace

double pg1_mean(double c) {
  double a = std::fabs(c);
  if (a < 1e-4) {
    // tanh(c/2)/(2c) = 1/4 - c^2/48 + O(c^4)
    return 0.25 - c * c / 48.0;
  }
  return std::tanh(a / 2.0) / (2.0 * a);
}

double pg1_var(double c) {
  double a = std::fabs(c);
  if (a < 1e-3) {
    // series: 1/24 - c^2/120 + O(c^4)
    return 1.0 / 24.0 - c * c / 120.0;
  }
  double sech = 1.0 / std::cosh(a / 2.0);
  return (std::sinh(a) - a) * sech * sech / (4.0 * a * a * a);
}

double sample_pg1(double c, std::mt19937_64& rng, PGStats* stats) {
  if (!std::isfinite(c)) throw numerical_error("sample_pg1: non-finite tilt");
  double z = 0.5 * std::fabs(c);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  double p_right = mass_texpon(z);

  if (stats) ++stats->draws;
  while (true) {
    if (stats) ++stats->proposals;
    double x;
    if (unif(rng) < p_right)
      x = kTrunc + expo(rng) / fz;
    else
      x = rtigauss(z, rng);

    // alternating-series accept/reject on partial sums
    double s = series_coef(0, x);
    double y = unif(rng) * s;
    int n = 0;
    while (true) {
      ++n;
      if (n % 2 == 1) {
        s -= series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

}  // namespace lady
