#include "lsm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace lsm {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kDeepTail = 8.0;

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

// Standard normal restricted to [a, b] with a >= kDeepTail: exponential
// proposal (or uniform when the interval is short) with exact rejection.
double sample_right_tail(double a, double b, Rng& rng) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  if (b - a < 2.0 / rate) {
    while (true) {
      const double x = a + (b - a) * uniform01(rng);
      if (std::log(uniform01(rng)) <= -0.5 * (x * x - a * a)) return x;
    }
  }
  while (true) {
    const double x = a - std::log(uniform01(rng)) / rate;
    if (x > b) continue;
    const double d = x - rate;
    if (std::log(uniform01(rng)) <= -0.5 * d * d) return x;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the combined key
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(mix(seed) ^ (a + 0x632be59bd9b4e019ULL)) ^ (b + 0x85157af5ULL));
}

double uniform01(Rng& rng) {
  // 53 random bits, shifted off zero
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> normal;
  return normal(rng);
}

double sample_inverse_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("inverse gamma needs positive shape and rate");
  }
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  double g = 0.0;
  do {
    g = gamma(rng);
  } while (!(g > 0.0));
  return 1.0 / g;
}

double log_normal_cdf(double x) {
  if (x > -20.0) return std::log(phi_cdf(x));
  // asymptotic series of the Mills ratio
  const double x2 = x * x;
  const double inv = 1.0 / x2;
  const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_normal_interval_mass(double a, double b) {
  if (!(a < b)) return -kInfinity;
  if (a > 0.0) return log_normal_interval_mass(-b, -a);
  if (b > 0.0) {
    return std::log(0.5 * (std::erf(b / std::numbers::sqrt2) - std::erf(a / std::numbers::sqrt2)));
  }
  const double lb = log_normal_cdf(b);
  if (a == -kInfinity) return lb;
  const double la = log_normal_cdf(a);
  return lb + std::log1p(-std::exp(la - lb));
}

double normal_log_density(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * d * d / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

double truncated_normal_log_density(double x, double mean, double var, double low, double high) {
  if (x < low || x > high) return -kInfinity;
  const double sd = std::sqrt(var);
  return normal_log_density(x, mean, var) -
         log_normal_interval_mass((low - mean) / sd, (high - mean) / sd);
}

double sample_truncated_normal(double mean, double var, double low, double high, Rng& rng) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw std::invalid_argument("truncated normal needs a positive finite variance");
  }
  if (!(low < high)) throw std::invalid_argument("truncated normal needs low < high");
  const double sd = std::sqrt(var);
  double a = (low - mean) / sd;
  double b = (high - mean) / sd;
  // Work in the lower half where Phi is accurate.
  bool flipped = false;
  if (a > 0.0) {
    std::swap(a, b);
    a = -a;
    b = -b;
    flipped = true;
  }
  double x = 0.0;
  if (b <= -kDeepTail) {
    x = -sample_right_tail(-b, -a, rng);
  } else {
    const double pa = a == -kInfinity ? 0.0 : phi_cdf(a);
    const double pb = b == kInfinity ? 1.0 : phi_cdf(b);
    double p = pa + uniform01(rng) * (pb - pa);
    p = std::clamp(p, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
    x = std::clamp(normal_quantile(p), a, b);
  }
  if (flipped) x = -x;
  return std::clamp(mean + sd * x, low, high);
}

}  // namespace lsm
