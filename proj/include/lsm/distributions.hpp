#pragma once

#include <cstdint>
#include <random>

namespace lsm {

using Rng = std::mt19937_64;

/// Deterministic child seed for stream (a, b) of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

double uniform01(Rng& rng);       ///< in (0, 1)
double standard_normal(Rng& rng);

/// Draw with density proportional to x^(-shape-1) exp(-rate/x).
double sample_inverse_gamma(double shape, double rate, Rng& rng);

/// N(mean, var) restricted to [low, high]; high may be +infinity and low may
/// be -infinity. Inverse-CDF in the body, exact tail rejection far out.
double sample_truncated_normal(double mean, double var, double low, double high, Rng& rng);

double normal_log_density(double x, double mean, double var);
double truncated_normal_log_density(double x, double mean, double var, double low, double high);

/// log Phi(x), accurate deep into the lower tail.
double log_normal_cdf(double x);
/// log(Phi(b) - Phi(a)) for a < b.
double log_normal_interval_mass(double a, double b);

}  // namespace lsm
