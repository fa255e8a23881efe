#include "lsm/proposals.hpp"

#include <cmath>

namespace lsm {

namespace {

constexpr double kMinCurvature = 1e-12;

// eta without the covariate f (f < 0 keeps every covariate).
double eta_at(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k, int i,
              int j, double alpha, double beta, int drop_covariate = -1) {
  double cov = 0.0;
  for (int f = 0; f < s.F(); ++f) {
    if (f != drop_covariate) cov += s.lambda[f] * m.x(f, i, j);
  }
  return alpha * dyad_effect(s, spec, k, i, j) - beta * s.sq_distance(i, j) - cov;
}

// Calls fn(k, i, j) for every observed dyad whose predictor involves the
// effect of node `node` on `side` within the given views.
template <class Fn>
void for_effect_dyads(const Multiplex& m, int node, EffectSide side, int view, Fn&& fn) {
  const int k_begin = view < 0 ? 0 : view;
  const int k_end = view < 0 ? m.K() : view + 1;
  for (int k = k_begin; k < k_end; ++k) {
    for (int other = 0; other < m.n(); ++other) {
      if (other == node) continue;
      const int i = side == EffectSide::Receiver ? other : node;
      const int j = side == EffectSide::Receiver ? node : other;
      if (!m.h(k, i, j)) continue;
      fn(k, i, j);
    }
  }
}

}  // namespace

ProposalMoments alpha_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k) {
  double curvature = 0.0;
  double gradient = 0.0;
  for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
    if (!m.h(k, i, j)) return;
    const double phi = dyad_effect(s, spec, k, i, j);
    const double p = logistic(eta_at(m, s, spec, k, i, j, s.mu_alpha, s.beta[k]));
    curvature += phi * phi * p * (1.0 - p);
    gradient += phi * (m.y(k, i, j) - p);
  });
  ProposalMoments q;
  q.var = 1.0 / (curvature + 1.0 / s.sigma2_alpha);
  q.mean = q.var * gradient + s.mu_alpha;
  return q;
}

ProposalMoments beta_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k) {
  double curvature = 0.0;
  double gradient = 0.0;
  for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
    if (!m.h(k, i, j)) return;
    const double d = s.sq_distance(i, j);
    const double p = logistic(eta_at(m, s, spec, k, i, j, s.alpha[k], s.mu_beta));
    curvature += d * d * p * (1.0 - p);
    gradient += d * (p - m.y(k, i, j));
  });
  ProposalMoments q;
  q.var = 1.0 / (curvature + 1.0 / s.sigma2_beta);
  q.mean = q.var * gradient + s.mu_beta;
  return q;
}

ProposalMoments lambda_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int f) {
  double curvature = 0.0;
  double gradient = 0.0;
  for (int k = 0; k < m.K(); ++k) {
    for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
      if (!m.h(k, i, j)) return;
      const double x = m.x(f, i, j);
      if (x == 0.0) return;
      const double p = logistic(eta_at(m, s, spec, k, i, j, s.alpha[k], s.beta[k], f));
      curvature += x * x * p * (1.0 - p);
      gradient += x * (p - m.y(k, i, j));
    });
  }
  ProposalMoments q;
  q.var = 1.0 / (curvature + 1.0 / s.sigma2_lambda[f]);
  q.mean = q.var * gradient + s.mu_lambda[f];
  return q;
}

LatentMoments latent_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int i) {
  LatentMoments q;
  Eigen::VectorXd pull = Eigen::VectorXd::Zero(s.p());
  double precision = 1.0;
  for (int k = 0; k < m.K(); ++k) {
    const double b = s.beta[k];
    for (int j = 0; j < m.n(); ++j) {
      if (j == i || !m.h(k, i, j)) continue;
      const int w = linear_predictor(m, s, spec, k, i, j) > 0.0 ? 1 : 0;
      const int r = static_cast<int>(m.y(k, i, j)) - w;
      if (r == 0) continue;
      pull.noalias() += (2.0 * b * r) * s.z.row(j).transpose();
      precision += 2.0 * b * std::abs(r);
    }
  }
  q.var = 1.0 / precision;
  q.mean = q.var * pull;
  return q;
}

double get_effect(const ParameterState& s, int i, EffectSide side, int view) {
  const int k = view < 0 ? 0 : view;
  return side == EffectSide::Receiver ? s.gamma(i, k) : s.theta(i, k);
}

void set_effect(ParameterState& s, const ModelSpec& spec, int i, EffectSide side, int view, double value) {
  Eigen::MatrixXd& target = side == EffectSide::Receiver ? s.gamma : s.theta;
  if (view < 0) {
    target.row(i).setConstant(value);
  } else {
    target(i, view) = value;
  }
  if (!spec.directed) s.gamma.row(i) = s.theta.row(i);
}

ProposalMoments effect_moments(const Multiplex& m, const ParameterState& s, const ModelSpec& spec,
                               int i, EffectSide side, int view) {
  const double weight = spec.effect_weight();
  double curvature = 0.0;
  double gradient = 0.0;
  for_effect_dyads(m, i, side, view, [&](int k, int a, int b) {
    const double slope = s.alpha[k] * weight;
    const double p = logistic(linear_predictor(m, s, spec, k, a, b));
    curvature += slope * slope * p * (1.0 - p);
    gradient += slope * (m.y(k, a, b) - p);
  });
  ProposalMoments q;
  if (curvature <= kMinCurvature) {
    q.uniform = true;
    return q;
  }
  q.var = 1.0 / curvature;
  q.mean = get_effect(s, i, side, view) + q.var * gradient;
  return q;
}

double draw_from(const ProposalMoments& q, double low, double high, Rng& rng) {
  if (q.uniform) return low + (high - low) * uniform01(rng);
  if (low == -kInf && high == kInf) return q.mean + std::sqrt(q.var) * standard_normal(rng);
  return sample_truncated_normal(q.mean, q.var, low, high, rng);
}

double log_density(const ProposalMoments& q, double x, double low, double high) {
  if (x < low || x > high) return -kInf;
  if (q.uniform) return -std::log(high - low);
  if (low == -kInf && high == kInf) return normal_log_density(x, q.mean, q.var);
  return truncated_normal_log_density(x, q.mean, q.var, low, high);
}

ScalarProposal propose_alpha(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k, Rng& rng) {
  const auto q = alpha_moments(m, s, spec, k);
  ScalarProposal out;
  out.candidate = draw_from(q, -kInf, kInf, rng);
  out.log_q_forward = log_density(q, out.candidate, -kInf, kInf);
  out.log_q_reverse = log_density(q, s.alpha[k], -kInf, kInf);
  return out;
}

ScalarProposal propose_beta(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k, Rng& rng) {
  const auto q = beta_moments(m, s, spec, k);
  ScalarProposal out;
  out.candidate = draw_from(q, -kInf, kInf, rng);
  out.log_q_forward = log_density(q, out.candidate, -kInf, kInf);
  out.log_q_reverse = log_density(q, s.beta[k], -kInf, kInf);
  return out;
}

ScalarProposal propose_lambda(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int f, Rng& rng) {
  const auto q = lambda_moments(m, s, spec, f);
  ScalarProposal out;
  out.candidate = draw_from(q, 0.0, kInf, rng);
  out.log_q_forward = log_density(q, out.candidate, 0.0, kInf);
  out.log_q_reverse = log_density(q, s.lambda[f], 0.0, kInf);
  return out;
}

ScalarProposal propose_effect(const Multiplex& m, const ParameterState& s, const ModelSpec& spec,
                              int i, EffectSide side, int view, Rng& rng) {
  const auto forward = effect_moments(m, s, spec, i, side, view);
  ScalarProposal out;
  out.candidate = draw_from(forward, -1.0, 1.0, rng);
  out.log_q_forward = log_density(forward, out.candidate, -1.0, 1.0);
  ParameterState moved = s;
  set_effect(moved, spec, i, side, view, out.candidate);
  const auto reverse = effect_moments(m, moved, spec, i, side, view);
  out.log_q_reverse = log_density(reverse, get_effect(s, i, side, view), -1.0, 1.0);
  return out;
}

LatentProposal propose_latent(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int i, Rng& rng) {
  const auto forward = latent_moments(m, s, spec, i);
  LatentProposal out;
  out.candidate.resize(s.p());
  const double sd = std::sqrt(forward.var);
  for (int d = 0; d < s.p(); ++d) {
    out.candidate[d] = forward.mean[d] + sd * standard_normal(rng);
    out.log_q_forward += normal_log_density(out.candidate[d], forward.mean[d], forward.var);
  }
  ParameterState moved = s;
  moved.z.row(i) = out.candidate.transpose();
  const auto reverse = latent_moments(m, moved, spec, i);
  for (int d = 0; d < s.p(); ++d) {
    out.log_q_reverse += normal_log_density(s.z(i, d), reverse.mean[d], reverse.var);
  }
  return out;
}

}  // namespace lsm
