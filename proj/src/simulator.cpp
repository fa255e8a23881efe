#include "lsm/simulator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lsm {

void TruthConfig::validate() const {
  if (n < 2) throw std::invalid_argument("truth needs n >= 2");
  if (K < 1) throw std::invalid_argument("truth needs K >= 1");
  spec.validate();
  if (reference_alpha < 0.0 || reference_beta < 0.0) {
    throw std::invalid_argument("reference alpha/beta must be >= 0");
  }
  if (alpha_sd <= 0.0 || beta_sd <= 0.0 || lambda_sd <= 0.0) {
    throw std::invalid_argument("generator standard deviations must be > 0");
  }
  if (missing_rate < 0.0 || missing_rate >= 1.0) {
    throw std::invalid_argument("missing rate must lie in [0, 1)");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int uniform_index(int n, Rng& rng) {
  return std::min(n - 1, static_cast<int>(uniform01(rng) * n));
}

void draw_effect(Eigen::MatrixXd& e, EffectType type, Rng& rng) {
  const int n = static_cast<int>(e.rows());
  const int K = static_cast<int>(e.cols());
  if (type == EffectType::Null) {
    e.setOnes();
  } else if (type == EffectType::Constant) {
    for (int i = 0; i < n; ++i) e.row(i).setConstant(2.0 * uniform01(rng) - 1.0);
    e.row(uniform_index(n, rng)).setOnes();
  } else {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) e(i, k) = 2.0 * uniform01(rng) - 1.0;
    }
    for (int k = 0; k < K; ++k) e(uniform_index(n, rng), k) = 1.0;
  }
}

}  // namespace

ParameterState draw_truth(const TruthConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto& spec = cfg.spec;
  ParameterState s = ParameterState::zeros(cfg.n, cfg.K, spec.p, spec.F);
  for (int i = 0; i < cfg.n; ++i) {
    for (int d = 0; d < spec.p; ++d) s.z(i, d) = standard_normal(rng);
  }
  draw_effect(s.theta, spec.sender, rng);
  if (spec.directed) {
    draw_effect(s.gamma, spec.receiver, rng);
  } else {
    s.gamma = s.theta;
  }
  s.alpha[0] = cfg.reference_alpha;
  s.beta[0] = cfg.reference_beta;
  const double a_sd = cfg.alpha_sd * cfg.alpha_sd;
  const double b_sd = cfg.beta_sd * cfg.beta_sd;
  for (int k = 1; k < cfg.K; ++k) {
    s.alpha[k] = sample_truncated_normal(cfg.alpha_mean, a_sd, 0.0, kInf, rng);
    s.beta[k] = sample_truncated_normal(cfg.beta_mean, b_sd, 0.0, kInf, rng);
  }
  for (int f = 0; f < spec.F; ++f) {
    s.lambda[f] = sample_truncated_normal(cfg.lambda_mean, cfg.lambda_sd * cfg.lambda_sd, 0.0, kInf, rng);
    s.mu_lambda[f] = cfg.lambda_mean;
    s.sigma2_lambda[f] = cfg.lambda_sd * cfg.lambda_sd;
  }
  s.mu_alpha = cfg.alpha_mean;
  s.mu_beta = cfg.beta_mean;
  s.sigma2_alpha = a_sd;
  s.sigma2_beta = b_sd;
  return s;
}

Multiplex simulate_multiplex(const ParameterState& truth, const ModelSpec& spec, Rng& rng,
                             double missing_rate, std::vector<Eigen::MatrixXd> covariates) {
  if (missing_rate < 0.0 || missing_rate >= 1.0) {
    throw std::invalid_argument("missing rate must lie in [0, 1)");
  }
  if (static_cast<int>(covariates.size()) != truth.F()) {
    throw std::invalid_argument("covariate count does not match the truth");
  }
  Multiplex m(truth.n(), truth.K(), spec.directed);
  if (!covariates.empty()) m.set_covariates(std::move(covariates));
  for (int k = 0; k < m.K(); ++k) {
    for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
      const double p = edge_probability(m, truth, spec, k, i, j);
      const std::uint8_t edge = uniform01(rng) < p ? 1 : 0;
      const std::uint8_t observed = missing_rate > 0.0 && uniform01(rng) < missing_rate ? 0 : 1;
      m.set(k, i, j, observed ? edge : 0, observed);
    });
  }
  return m;
}

}  // namespace lsm
