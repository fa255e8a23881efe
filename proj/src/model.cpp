#include "lsm/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsm {

char effect_letter(EffectType e) {
  switch (e) {
    case EffectType::Null: return 'N';
    case EffectType::Constant: return 'C';
    case EffectType::Variable: return 'V';
  }
  return '?';
}

EffectType effect_from_letter(char c) {
  switch (c) {
    case 'N': case 'n': return EffectType::Null;
    case 'C': case 'c': return EffectType::Constant;
    case 'V': case 'v': return EffectType::Variable;
    default: throw std::invalid_argument(std::string("unknown effect type '") + c + "'");
  }
}

double ModelSpec::effect_weight() const {
  if (!directed) return 0.5;
  return (has_sender() && has_receiver()) ? 0.5 : 1.0;
}

std::string ModelSpec::name() const {
  if (!directed) return std::string(1, effect_letter(sender));
  return std::string{effect_letter(sender), effect_letter(receiver)};
}

ModelSpec ModelSpec::parse(const std::string& name, bool directed, int p, int F) {
  ModelSpec spec;
  spec.directed = directed;
  spec.p = p;
  spec.F = F;
  if (directed) {
    if (name.size() != 2) {
      throw std::invalid_argument("directed model names have two letters (NN..VV): '" + name + "'");
    }
    spec.sender = effect_from_letter(name[0]);
    spec.receiver = effect_from_letter(name[1]);
  } else {
    if (name.size() != 1) {
      throw std::invalid_argument("'" + name +
                                  "' is a directed-only taxonomy cell; undirected models are N, C or V");
    }
    spec.sender = spec.receiver = effect_from_letter(name[0]);
  }
  spec.validate();
  return spec;
}

void ModelSpec::validate() const {
  if (p < 1) throw std::invalid_argument("latent dimension p must be >= 1");
  if (F < 0) throw std::invalid_argument("covariate count F must be >= 0");
  if (!directed && sender != receiver) {
    throw std::invalid_argument("undirected models need identical sender and receiver effects");
  }
}

std::vector<ModelSpec> directed_model_family(int p) {
  std::vector<ModelSpec> out;
  for (const char* name : {"NN", "CN", "NC", "CC", "VN", "NV", "VC", "CV", "VV"}) {
    out.push_back(ModelSpec::parse(name, true, p));
  }
  return out;
}

std::vector<ModelSpec> undirected_model_family(int p) {
  std::vector<ModelSpec> out;
  for (const char* name : {"N", "C", "V"}) out.push_back(ModelSpec::parse(name, false, p));
  return out;
}

ParameterState ParameterState::zeros(int n, int K, int p, int F) {
  ParameterState s;
  s.alpha = Eigen::VectorXd::Zero(K);
  s.beta = Eigen::VectorXd::Zero(K);
  s.theta = Eigen::MatrixXd::Zero(n, K);
  s.gamma = Eigen::MatrixXd::Zero(n, K);
  s.z = Eigen::MatrixXd::Zero(n, p);
  s.lambda = Eigen::VectorXd::Zero(F);
  s.mu_lambda = Eigen::VectorXd::Zero(F);
  s.sigma2_lambda = Eigen::VectorXd::Ones(F);
  return s;
}

bool ParameterState::in_support() const {
  if ((alpha.array() < 0.0).any() || (beta.array() < 0.0).any()) return false;
  if ((lambda.array() < 0.0).any() || (mu_lambda.array() < 0.0).any()) return false;
  if (theta.size() > 0 && theta.cwiseAbs().maxCoeff() > 1.0) return false;
  if (gamma.size() > 0 && gamma.cwiseAbs().maxCoeff() > 1.0) return false;
  if (mu_alpha < 0.0 || mu_beta < 0.0) return false;
  if (!(sigma2_alpha > 0.0) || !(sigma2_beta > 0.0)) return false;
  if ((sigma2_lambda.array() <= 0.0).any()) return false;
  return z.allFinite();
}

Hyperparameters Hyperparameters::defaults_for(int K) {
  Hyperparameters h;
  const double tau = K > 1 ? static_cast<double>(K - 1) / K : 1.0;
  h.tau_alpha = tau;
  h.tau_beta = tau;
  return h;
}

void Hyperparameters::validate() const {
  if (!(tau_alpha > 0 && tau_beta > 0 && tau_lambda > 0)) {
    throw std::invalid_argument("tau hyperparameters must be positive");
  }
  if (!(nu_alpha > 0 && nu_beta > 0 && nu_lambda > 0)) {
    throw std::invalid_argument("nu hyperparameters must be positive");
  }
  if (m_alpha < 0 || m_beta < 0) throw std::invalid_argument("m_alpha and m_beta must be >= 0");
  if (reference_alpha < 0 || reference_beta < 0) {
    throw std::invalid_argument("reference alpha/beta must be >= 0");
  }
}

double combined_effect(const ModelSpec& spec, double theta_ik, double gamma_jk) {
  const bool s = spec.directed ? spec.has_sender() : spec.has_shared();
  const bool r = spec.directed ? spec.has_receiver() : spec.has_shared();
  if (s && r) return 0.5 * (theta_ik + gamma_jk);
  if (s) return theta_ik;
  if (r) return gamma_jk;
  return 1.0;
}

double dyad_effect(const ParameterState& state, const ModelSpec& spec, int k, int i, int j) {
  if (!spec.directed) return combined_effect(spec, state.theta(i, k), state.theta(j, k));
  return combined_effect(spec, state.theta(i, k), state.gamma(j, k));
}

double covariate_term(const Multiplex& m, const ParameterState& state, int i, int j) {
  double acc = 0.0;
  for (int f = 0; f < state.F(); ++f) acc += state.lambda[f] * m.x(f, i, j);
  return acc;
}

double linear_predictor(const Multiplex& m, const ParameterState& state, const ModelSpec& spec,
                        int k, int i, int j) {
  return state.alpha[k] * dyad_effect(state, spec, k, i, j) - state.beta[k] * state.sq_distance(i, j) -
         covariate_term(m, state, i, j);
}

double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double softplus(double eta) {
  if (eta > 35.0) return eta;
  if (eta < -35.0) return std::exp(eta);
  return std::log1p(std::exp(eta));
}

double edge_probability(const Multiplex& m, const ParameterState& state, const ModelSpec& spec,
                        int k, int i, int j) {
  return logistic(linear_predictor(m, state, spec, k, i, j));
}

int w_indicator(const Multiplex& m, const ParameterState& state, const ModelSpec& spec, int k,
                int i, int j) {
  return linear_predictor(m, state, spec, k, i, j) > 0.0 ? 1 : 0;
}

double view_log_likelihood(const Multiplex& m, const ParameterState& state, const ModelSpec& spec,
                           int k) {
  double acc = 0.0;
  for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
    if (!m.h(k, i, j)) return;
    const double eta = linear_predictor(m, state, spec, k, i, j);
    acc += (m.y(k, i, j) ? eta : 0.0) - softplus(eta);
  });
  return acc;
}

double log_likelihood(const Multiplex& m, const ParameterState& state, const ModelSpec& spec) {
  double acc = 0.0;
  for (int k = 0; k < m.K(); ++k) acc += view_log_likelihood(m, state, spec, k);
  return acc;
}

double log_prior(const ParameterState& s, const ModelSpec& /*spec*/, const Hyperparameters& h) {
  if (!s.in_support()) return -std::numeric_limits<double>::infinity();
  const double K = static_cast<double>(s.K());
  double quad = s.z.squaredNorm();
  quad += (s.alpha.array() - s.mu_alpha).square().sum() / s.sigma2_alpha;
  quad += (s.beta.array() - s.mu_beta).square().sum() / s.sigma2_beta;
  quad += K * std::log(s.sigma2_alpha) + K * std::log(s.sigma2_beta);
  quad += std::log(h.tau_alpha * s.sigma2_alpha) + std::log(h.tau_beta * s.sigma2_beta);
  quad += (s.mu_alpha - h.m_alpha) * (s.mu_alpha - h.m_alpha) / (h.tau_alpha * s.sigma2_alpha);
  quad += (s.mu_beta - h.m_beta) * (s.mu_beta - h.m_beta) / (h.tau_beta * s.sigma2_beta);
  quad += 1.0 / s.sigma2_alpha + 1.0 / s.sigma2_beta;
  double lp = (-h.nu_alpha / 2.0 - 1.0) * std::log(s.sigma2_alpha) +
              (-h.nu_beta / 2.0 - 1.0) * std::log(s.sigma2_beta);
  for (int f = 0; f < s.F(); ++f) {
    const double v = s.sigma2_lambda[f];
    const double dl = s.lambda[f] - s.mu_lambda[f];
    const double dm = s.mu_lambda[f] - h.m_lambda;
    quad += dl * dl / v + std::log(v) + std::log(h.tau_lambda * v) + dm * dm / (h.tau_lambda * v) +
            1.0 / v;
    lp += (-h.nu_lambda / 2.0 - 1.0) * std::log(v);
  }
  return lp - 0.5 * quad;
}

double log_posterior(const Multiplex& m, const ParameterState& state, const ModelSpec& spec,
                     const Hyperparameters& hyper) {
  const double prior = log_prior(state, spec, hyper);
  if (!std::isfinite(prior)) return prior;
  return log_likelihood(m, state, spec) + prior;
}

}  // namespace lsm
