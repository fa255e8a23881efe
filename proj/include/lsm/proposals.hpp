#pragma once

#include <limits>

#include <Eigen/Dense>

#include "lsm/distributions.hpp"
#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"

namespace lsm {

/// Mean and variance of a (possibly truncated) normal proposal. When
/// `uniform` is set the curvature vanished and the proposal is Unif(low, high).
struct ProposalMoments {
  double mean = 0.0;
  double var = 1.0;
  bool uniform = false;
};

/// A drawn candidate with its forward and reverse proposal log-densities.
struct ScalarProposal {
  double candidate = 0.0;
  double log_q_forward = 0.0;
  double log_q_reverse = 0.0;
};

// Second-order expansions of the log-posterior around the points named in
// each function. The variance is the inverse curvature (plus prior precision
// where a prior enters); the mean is one Newton step from the expansion point.

/// alpha^(k), expanded at alpha = mu_alpha.
ProposalMoments alpha_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k);
/// beta^(k), expanded at beta = mu_beta.
ProposalMoments beta_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k);
/// lambda_f, expanded with lambda_f removed from the predictor.
ProposalMoments lambda_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int f);

/// Latent proposal for node i: softplus replaced by its lower bound
/// max(0, eta). Coordinates share one variance.
struct LatentMoments {
  Eigen::VectorXd mean;
  double var = 1.0;
};
LatentMoments latent_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int i);

enum class EffectSide { Sender, Receiver, Shared };

/// Effect of node i on `side`, expanded at its current value. view >= 0 uses
/// that view only (Variable effects); view < 0 sums over all views (Constant).
ProposalMoments effect_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec,
                               int i, EffectSide side, int view);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Draws from the moments on [low, high]; uniform fallback when flagged.
double draw_from(const ProposalMoments& q, double low, double high, Rng& rng);
double log_density(const ProposalMoments& q, double x, double low, double high);

ScalarProposal propose_alpha(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k, Rng& rng);
ScalarProposal propose_beta(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k, Rng& rng);
ScalarProposal propose_lambda(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int f, Rng& rng);
ScalarProposal propose_effect(const Multiplex& m, const ParameterState& s, const ModelSpec& spec,
                              int i, EffectSide side, int view, Rng& rng);

struct LatentProposal {
  Eigen::VectorXd candidate;
  double log_q_forward = 0.0;
  double log_q_reverse = 0.0;
};
LatentProposal propose_latent(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int i, Rng& rng);

/// Writes an effect value into state, honoring the storage rules: Constant
/// effects fill the whole row, undirected effects mirror into gamma.
void set_effect(ParameterState& s, const ModelSpec& spec, int i, EffectSide side, int view, double value);
double get_effect(const ParameterState& s, int i, EffectSide side, int view);

}  // namespace lsm
