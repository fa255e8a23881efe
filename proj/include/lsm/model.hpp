#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsm/multiplex.hpp"

namespace lsm {

enum class EffectType { Null, Constant, Variable };

char effect_letter(EffectType e);
EffectType effect_from_letter(char c);

/// Sender/receiver assumptions for one member of the model family.
///
/// Directed models are named by two letters (sender then receiver), e.g. "CN".
/// Undirected models carry a single shared effect and are named by one letter.
struct ModelSpec {
  EffectType sender = EffectType::Null;
  EffectType receiver = EffectType::Null;
  bool directed = true;
  int p = 2;
  int F = 0;

  bool has_sender() const { return sender != EffectType::Null; }
  bool has_receiver() const { return directed && receiver != EffectType::Null; }
  /// True when the shared undirected effect (stored in theta) is active.
  bool has_shared() const { return !directed && sender != EffectType::Null; }

  /// Derivative of phi with respect to one effect: 0.5 when phi averages two
  /// effects, 1 otherwise.
  double effect_weight() const;

  std::string name() const;
  /// Accepts "NN".."VV" for directed models and "N"/"C"/"V" for undirected ones.
  static ModelSpec parse(const std::string& name, bool directed, int p = 2, int F = 0);

  void validate() const;
};

/// The nine directed models in the fixed order NN,CN,NC,CC,VN,NV,VC,CV,VV.
std::vector<ModelSpec> directed_model_family(int p = 2);
/// The three undirected models N, C, V.
std::vector<ModelSpec> undirected_model_family(int p = 2);

/// One point in parameter space.
///
/// theta and gamma are n x K; a Constant effect keeps identical columns. In
/// undirected models theta holds the shared effect and gamma mirrors it.
struct ParameterState {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd z;
  Eigen::VectorXd lambda;

  double mu_alpha = 2.0;
  double mu_beta = 1.0;
  double sigma2_alpha = 1.0;
  double sigma2_beta = 1.0;
  Eigen::VectorXd mu_lambda;
  Eigen::VectorXd sigma2_lambda;

  static ParameterState zeros(int n, int K, int p, int F);

  int n() const { return static_cast<int>(z.rows()); }
  int K() const { return static_cast<int>(alpha.size()); }
  int p() const { return static_cast<int>(z.cols()); }
  int F() const { return static_cast<int>(lambda.size()); }

  /// Squared Euclidean distance between latent positions i and j.
  double sq_distance(int i, int j) const { return (z.row(i) - z.row(j)).squaredNorm(); }

  /// alpha, beta, lambda >= 0; effects in [-1,1]; variances > 0.
  bool in_support() const;
};

struct Hyperparameters {
  double m_alpha = 2.0;
  double m_beta = 0.0;
  double tau_alpha = 1.0;
  double tau_beta = 1.0;
  double nu_alpha = 3.0;
  double nu_beta = 3.0;
  double m_lambda = 0.0;
  double tau_lambda = 1.0;
  double nu_lambda = 3.0;
  double reference_alpha = 2.0;
  double reference_beta = 1.0;

  /// nu = 3, m_alpha = 2, m_beta = 0, tau = (K-1)/K (tau = 1 when K = 1).
  static Hyperparameters defaults_for(int K);

  void validate() const;
};

/// phi: 1 with no effects, the single effect when only one is present, and the
/// average of the two otherwise.
double combined_effect(const ModelSpec& spec, double theta_ik, double gamma_jk);

/// phi for the dyad (i, j) in view k, reading the effects out of state.
double dyad_effect(const ParameterState& state, const ModelSpec& spec, int k, int i, int j);

/// sum_f lambda_f x_ijf.
double covariate_term(const Multiplex& m, const ParameterState& state, int i, int j);

/// eta = alpha*phi - beta*d - sum_f lambda_f x, with d the squared distance.
double linear_predictor(const Multiplex& m, const ParameterState& state,
                        const ModelSpec& spec, int k, int i, int j);

double logistic(double eta);
/// log(1 + exp(eta)) without overflow.
double softplus(double eta);

double edge_probability(const Multiplex& m, const ParameterState& state,
                        const ModelSpec& spec, int k, int i, int j);

/// 1 iff eta > 0.
int w_indicator(const Multiplex& m, const ParameterState& state,
                const ModelSpec& spec, int k, int i, int j);

/// Bernoulli log-likelihood over observed dyads. Directed models sum over
/// ordered pairs i != j; undirected models count each unordered pair once.
double log_likelihood(const Multiplex& m, const ParameterState& state, const ModelSpec& spec);

/// Log-likelihood contribution of view k alone.
double view_log_likelihood(const Multiplex& m, const ParameterState& state,
                           const ModelSpec& spec, int k);

/// Log-likelihood plus every prior and hyperprior term, up to a constant.
/// Returns -infinity outside the support.
double log_posterior(const Multiplex& m, const ParameterState& state,
                     const ModelSpec& spec, const Hyperparameters& hyper);

/// The prior/hyperprior part of log_posterior.
double log_prior(const ParameterState& state, const ModelSpec& spec, const Hyperparameters& hyper);

/// Iterates the dyads that carry likelihood: all ordered pairs for directed
/// models, i < j for undirected ones.
template <class Fn>
void for_each_dyad(int n, bool directed, Fn&& fn) {
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i != j) fn(i, j);
    }
  }
}

}  // namespace lsm
