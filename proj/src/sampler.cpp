#include "lsm/sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsm/procrustes.hpp"
#include "lsm/proposals.hpp"

namespace lsm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double cell_loglik(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int k, int i, int j) {
  const double eta = linear_predictor(m, s, spec, k, i, j);
  return (m.y(k, i, j) ? eta : 0.0) - softplus(eta);
}

// Likelihood of every dyad whose distance involves node i.
double node_loglik(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int i) {
  double acc = 0.0;
  for (int k = 0; k < m.K(); ++k) {
    for (int j = 0; j < m.n(); ++j) {
      if (j == i) continue;
      if (m.h(k, i, j)) acc += cell_loglik(m, s, spec, k, i, j);
      if (spec.directed && m.h(k, j, i)) acc += cell_loglik(m, s, spec, k, j, i);
    }
  }
  return acc;
}

// Likelihood of the dyads carrying node i's effect on `side` in `view`
// (all views when view < 0).
double effect_loglik(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int node,
                     EffectSide side, int view) {
  double acc = 0.0;
  const int k_begin = view < 0 ? 0 : view;
  const int k_end = view < 0 ? m.K() : view + 1;
  for (int k = k_begin; k < k_end; ++k) {
    for (int other = 0; other < m.n(); ++other) {
      if (other == node) continue;
      const int i = side == EffectSide::Receiver ? other : node;
      const int j = side == EffectSide::Receiver ? node : other;
      if (m.h(k, i, j)) acc += cell_loglik(m, s, spec, k, i, j);
    }
  }
  return acc;
}

double covariate_loglik(const Multiplex& m, const ParameterState& s, const ModelSpec& spec, int f) {
  double acc = 0.0;
  for (int k = 0; k < m.K(); ++k) {
    for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
      if (m.h(k, i, j) && m.x(f, i, j) != 0.0) acc += cell_loglik(m, s, spec, k, i, j);
    });
  }
  return acc;
}

class Sweeper {
public:
  Sweeper(const Multiplex& m, const ModelSpec& spec, const Hyperparameters& hyper,
          const McmcConfig& config, const References& refs, ParameterState& s, Rng& rng,
          ChainOutput& out)
      : m_(m), spec_(spec), hyper_(hyper), config_(config), refs_(refs), s_(s), rng_(rng), out_(out) {}

  void sweep() {
    const auto& u = config_.update;
    if (u.nuisance) gibbs_update_nuisance(s_, hyper_, rng_);
    if (u.alpha || u.beta) {
      for (int k = 0; k < m_.K(); ++k) {
        if (k != refs_.view) update_alpha_beta(k);
      }
    }
    if (u.latent) update_latent();
    if (u.effects) {
      for (int i = 0; i < m_.n(); ++i) {
        if (spec_.directed) {
          if (spec_.has_sender()) update_effect(i, EffectSide::Sender, spec_.sender, out_.acceptance.sender);
          if (spec_.has_receiver()) {
            update_effect(i, EffectSide::Receiver, spec_.receiver, out_.acceptance.receiver);
          }
        } else if (spec_.has_shared()) {
          update_effect(i, EffectSide::Shared, spec_.sender, out_.acceptance.sender);
        }
      }
    }
    if (u.lambda) {
      for (int f = 0; f < s_.F(); ++f) update_lambda(f);
    }
  }

private:
  void update_alpha_beta(int k) {
    const bool free_a = config_.update.alpha;
    const bool free_b = config_.update.beta;
    auto& counter = out_.acceptance.alpha_beta;
    ++counter.proposed;

    const double a_old = s_.alpha[k];
    const double b_old = s_.beta[k];
    const auto qa = alpha_moments(m_, s_, spec_, k);
    const auto qb = beta_moments(m_, s_, spec_, k);
    const double a_new = free_a ? draw_from(qa, -kInf, kInf, rng_) : a_old;
    const double b_new = free_b ? draw_from(qb, -kInf, kInf, rng_) : b_old;
    if (a_new < 0.0 || b_new < 0.0) return;  // outside the prior support

    double log_q_fwd = 0.0;
    if (free_a) log_q_fwd += log_density(qa, a_new, -kInf, kInf);
    if (free_b) log_q_fwd += log_density(qb, b_new, -kInf, kInf);

    const double ll_old = view_log_likelihood(m_, s_, spec_, k);
    s_.alpha[k] = a_new;
    s_.beta[k] = b_new;
    const double ll_new = view_log_likelihood(m_, s_, spec_, k);
    double log_q_rev = 0.0;
    if (free_a) log_q_rev += log_density(alpha_moments(m_, s_, spec_, k), a_old, -kInf, kInf);
    if (free_b) log_q_rev += log_density(beta_moments(m_, s_, spec_, k), b_old, -kInf, kInf);

    auto sq = [](double x) { return x * x; };
    const double prior_delta =
        -0.5 * (sq(a_new - s_.mu_alpha) - sq(a_old - s_.mu_alpha)) / s_.sigma2_alpha -
        0.5 * (sq(b_new - s_.mu_beta) - sq(b_old - s_.mu_beta)) / s_.sigma2_beta;
    if (mh_accept(0.0, ll_new - ll_old + prior_delta, log_q_fwd, log_q_rev, rng_)) {
      ++counter.accepted;
    } else {
      s_.alpha[k] = a_old;
      s_.beta[k] = b_old;
    }
  }

  void update_latent() {
    const Eigen::MatrixXd z_prev = s_.z;
    auto& counter = out_.acceptance.latent;
    for (int i = 0; i < m_.n(); ++i) {
      ++counter.proposed;
      const Eigen::RowVectorXd old = s_.z.row(i);
      const auto forward = latent_moments(m_, s_, spec_, i);
      Eigen::RowVectorXd cand(s_.p());
      double log_q_fwd = 0.0;
      const double sd = std::sqrt(forward.var);
      for (int d = 0; d < s_.p(); ++d) {
        cand[d] = forward.mean[d] + sd * standard_normal(rng_);
        log_q_fwd += normal_log_density(cand[d], forward.mean[d], forward.var);
      }
      const double ll_old = node_loglik(m_, s_, spec_, i);
      s_.z.row(i) = cand;
      const double ll_new = node_loglik(m_, s_, spec_, i);
      const auto reverse = latent_moments(m_, s_, spec_, i);
      double log_q_rev = 0.0;
      for (int d = 0; d < s_.p(); ++d) {
        log_q_rev += normal_log_density(old[d], reverse.mean[d], reverse.var);
      }
      const double prior_delta = -0.5 * (cand.squaredNorm() - old.squaredNorm());
      if (mh_accept(0.0, ll_new - ll_old + prior_delta, log_q_fwd, log_q_rev, rng_)) {
        ++counter.accepted;
      } else {
        s_.z.row(i) = old;
      }
    }
    const auto guard = procrustes_guard(s_.z, z_prev, config_.procrustes_tolerance);
    if (guard.decision == GuardDecision::Discard) {
      s_.z = z_prev;
      ++out_.procrustes_discards;
    } else {
      s_.z = guard.aligned;
    }
  }

  bool pinned(int i, EffectSide side, int k) const {
    return side == EffectSide::Receiver ? refs_.receiver_pinned(i, k) : refs_.sender_pinned(i, k);
  }

  void update_effect(int i, EffectSide side, EffectType type, AcceptanceCounter& counter) {
    views_.clear();
    if (type == EffectType::Constant) {
      if (pinned(i, side, 0)) return;
      views_.push_back(-1);
    } else {
      for (int k = 0; k < m_.K(); ++k) {
        if (!pinned(i, side, k)) views_.push_back(k);
      }
      if (views_.empty()) return;
    }
    ++counter.proposed;

    old_.clear();
    cand_.clear();
    double log_q_fwd = 0.0;
    double ll_old = 0.0;
    for (int v : views_) {
      const auto q = effect_moments(m_, s_, spec_, i, side, v);
      const double c = draw_from(q, -1.0, 1.0, rng_);
      old_.push_back(get_effect(s_, i, side, v));
      cand_.push_back(c);
      log_q_fwd += log_density(q, c, -1.0, 1.0);
      ll_old += effect_loglik(m_, s_, spec_, i, side, v);
    }
    for (std::size_t a = 0; a < views_.size(); ++a) set_effect(s_, spec_, i, side, views_[a], cand_[a]);
    double ll_new = 0.0;
    double log_q_rev = 0.0;
    for (std::size_t a = 0; a < views_.size(); ++a) {
      const int v = views_[a];
      ll_new += effect_loglik(m_, s_, spec_, i, side, v);
      log_q_rev += log_density(effect_moments(m_, s_, spec_, i, side, v), old_[a], -1.0, 1.0);
    }
    if (mh_accept(0.0, ll_new - ll_old, log_q_fwd, log_q_rev, rng_)) {
      ++counter.accepted;
    } else {
      for (std::size_t a = 0; a < views_.size(); ++a) set_effect(s_, spec_, i, side, views_[a], old_[a]);
    }
  }

  void update_lambda(int f) {
    auto& counter = out_.acceptance.lambda;
    ++counter.proposed;
    const auto q = lambda_moments(m_, s_, spec_, f);
    const double old = s_.lambda[f];
    const double cand = draw_from(q, 0.0, kInf, rng_);
    const double ll_old = covariate_loglik(m_, s_, spec_, f);
    s_.lambda[f] = cand;
    const double ll_new = covariate_loglik(m_, s_, spec_, f);
    auto sq = [](double x) { return x * x; };
    const double prior_delta =
        -0.5 * (sq(cand - s_.mu_lambda[f]) - sq(old - s_.mu_lambda[f])) / s_.sigma2_lambda[f];
    // The proposal ignores the current lambda_f, so both densities share q.
    if (mh_accept(0.0, ll_new - ll_old + prior_delta, log_density(q, cand, 0.0, kInf),
                  log_density(q, old, 0.0, kInf), rng_)) {
      ++counter.accepted;
    } else {
      s_.lambda[f] = old;
    }
  }

  const Multiplex& m_;
  const ModelSpec& spec_;
  const Hyperparameters& hyper_;
  const McmcConfig& config_;
  const References& refs_;
  ParameterState& s_;
  Rng& rng_;
  ChainOutput& out_;
  std::vector<int> views_;
  std::vector<double> old_;
  std::vector<double> cand_;
};

}  // namespace

void McmcConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (burn_in < 0 || burn_in > iterations) {
    throw std::invalid_argument("burn-in must lie in [0, iterations]");
  }
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (!(procrustes_tolerance >= 0.0)) throw std::invalid_argument("procrustes tolerance must be >= 0");
}

ParameterLayout ParameterLayout::make(const ModelSpec& spec, int n, int K, bool with_latent) {
  ParameterLayout l;
  l.spec = spec;
  l.n = n;
  l.K = K;
  l.with_latent = with_latent;
  auto& c = l.columns;
  for (int k = 1; k <= K; ++k) c.push_back("alpha_" + std::to_string(k));
  for (int k = 1; k <= K; ++k) c.push_back("beta_" + std::to_string(k));
  auto effect_columns = [&](const std::string& prefix, EffectType type) {
    if (type == EffectType::Constant) {
      for (int i = 1; i <= n; ++i) c.push_back(prefix + "_" + std::to_string(i));
    } else if (type == EffectType::Variable) {
      for (int i = 1; i <= n; ++i) {
        for (int k = 1; k <= K; ++k) c.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(k));
      }
    }
  };
  if (spec.directed) {
    effect_columns("theta", spec.sender);
    effect_columns("gamma", spec.receiver);
  } else {
    effect_columns("delta", spec.sender);
  }
  for (int f = 1; f <= spec.F; ++f) c.push_back("lambda_" + std::to_string(f));
  c.insert(c.end(), {"mu_alpha", "mu_beta", "sigma2_alpha", "sigma2_beta"});
  for (int f = 1; f <= spec.F; ++f) c.push_back("mu_lambda_" + std::to_string(f));
  for (int f = 1; f <= spec.F; ++f) c.push_back("sigma2_lambda_" + std::to_string(f));
  if (with_latent) {
    for (int i = 1; i <= n; ++i) {
      for (int d = 1; d <= spec.p; ++d) c.push_back("z_" + std::to_string(i) + "_" + std::to_string(d));
    }
  }
  return l;
}

Eigen::RowVectorXd ParameterLayout::pack(const ParameterState& s) const {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(columns.size()));
  Eigen::Index c = 0;
  for (int k = 0; k < K; ++k) row[c++] = s.alpha[k];
  for (int k = 0; k < K; ++k) row[c++] = s.beta[k];
  auto effects = [&](const Eigen::MatrixXd& e, EffectType type) {
    if (type == EffectType::Constant) {
      for (int i = 0; i < n; ++i) row[c++] = e(i, 0);
    } else if (type == EffectType::Variable) {
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) row[c++] = e(i, k);
      }
    }
  };
  effects(s.theta, spec.sender);
  if (spec.directed) effects(s.gamma, spec.receiver);
  for (int f = 0; f < spec.F; ++f) row[c++] = s.lambda[f];
  row[c++] = s.mu_alpha;
  row[c++] = s.mu_beta;
  row[c++] = s.sigma2_alpha;
  row[c++] = s.sigma2_beta;
  for (int f = 0; f < spec.F; ++f) row[c++] = s.mu_lambda[f];
  for (int f = 0; f < spec.F; ++f) row[c++] = s.sigma2_lambda[f];
  if (with_latent) {
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < spec.p; ++d) row[c++] = s.z(i, d);
    }
  }
  return row;
}

ParameterState ParameterLayout::unpack(const Eigen::RowVectorXd& row) const {
  if (row.size() != static_cast<Eigen::Index>(columns.size())) {
    throw std::invalid_argument("unpack: row length does not match the layout");
  }
  ParameterState s = ParameterState::zeros(n, K, spec.p, spec.F);
  Eigen::Index c = 0;
  for (int k = 0; k < K; ++k) s.alpha[k] = row[c++];
  for (int k = 0; k < K; ++k) s.beta[k] = row[c++];
  auto effects = [&](Eigen::MatrixXd& e, EffectType type) {
    if (type == EffectType::Constant) {
      for (int i = 0; i < n; ++i) e.row(i).setConstant(row[c++]);
    } else if (type == EffectType::Variable) {
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) e(i, k) = row[c++];
      }
    }
  };
  effects(s.theta, spec.sender);
  if (spec.directed) {
    effects(s.gamma, spec.receiver);
  } else {
    s.gamma = s.theta;
  }
  for (int f = 0; f < spec.F; ++f) s.lambda[f] = row[c++];
  s.mu_alpha = row[c++];
  s.mu_beta = row[c++];
  s.sigma2_alpha = row[c++];
  s.sigma2_beta = row[c++];
  for (int f = 0; f < spec.F; ++f) s.mu_lambda[f] = row[c++];
  for (int f = 0; f < spec.F; ++f) s.sigma2_lambda[f] = row[c++];
  if (with_latent) {
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < spec.p; ++d) s.z(i, d) = row[c++];
    }
  }
  return s;
}

int ParameterLayout::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return static_cast<int>(c);
  }
  return -1;
}

ParameterState ChainOutput::posterior_mean() const {
  if (stored() == 0) throw std::invalid_argument("posterior_mean: the chain stored no samples");
  ParameterState s = layout.unpack(samples.colwise().mean());
  s.z = z_mean;
  return s;
}

std::vector<std::string> ChainOutput::pinned_columns() const {
  std::vector<std::string> out;
  out.push_back("alpha_" + std::to_string(references.view + 1));
  out.push_back("beta_" + std::to_string(references.view + 1));
  auto add = [&](const std::string& prefix, EffectType type, const std::vector<int>& nodes) {
    if (nodes.empty()) return;
    if (type == EffectType::Constant) {
      if (nodes[0] >= 0) out.push_back(prefix + "_" + std::to_string(nodes[0] + 1));
    } else if (type == EffectType::Variable) {
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k] >= 0) {
          out.push_back(prefix + "_" + std::to_string(nodes[k] + 1) + "_" + std::to_string(k + 1));
        }
      }
    }
  };
  const auto& spec = layout.spec;
  if (spec.directed) {
    add("theta", spec.sender, references.sender_node);
    add("gamma", spec.receiver, references.receiver_node);
  } else {
    add("delta", spec.sender, references.sender_node);
  }
  return out;
}

InverseGammaParams variance_conditional(const Eigen::VectorXd& values, double mu, double tau,
                                        double nu, double m) {
  const double K = static_cast<double>(values.size());
  const double ss = (values.array() - mu).square().sum();
  return {(nu + K + 1.0) / 2.0, (tau + tau * ss + (mu - m) * (mu - m)) / (2.0 * tau)};
}

NormalParams mean_conditional(const Eigen::VectorXd& values, double sigma2, double tau, double m) {
  const double K = static_cast<double>(values.size());
  return {(tau * values.sum() + m) / (1.0 + K * tau), tau * sigma2 / (1.0 + K * tau)};
}

void gibbs_update_nuisance(ParameterState& s, const Hyperparameters& h, Rng& rng) {
  auto update = [&](const Eigen::VectorXd& values, double& mu, double& sigma2, double tau, double nu,
                    double m) {
    const auto ig = variance_conditional(values, mu, tau, nu, m);
    sigma2 = sample_inverse_gamma(ig.shape, ig.rate, rng);
    const auto nm = mean_conditional(values, sigma2, tau, m);
    mu = sample_truncated_normal(nm.mean, nm.var, 0.0, kInf, rng);
  };
  update(s.alpha, s.mu_alpha, s.sigma2_alpha, h.tau_alpha, h.nu_alpha, h.m_alpha);
  update(s.beta, s.mu_beta, s.sigma2_beta, h.tau_beta, h.nu_beta, h.m_beta);
  for (int f = 0; f < s.F(); ++f) {
    Eigen::VectorXd one(1);
    one[0] = s.lambda[f];
    update(one, s.mu_lambda[f], s.sigma2_lambda[f], h.tau_lambda, h.nu_lambda, h.m_lambda);
  }
}

bool mh_accept(double log_post_old, double log_post_new, double log_q_forward, double log_q_reverse,
               Rng& rng) {
  if (std::isnan(log_post_new) || log_post_new == kNegInf) return false;
  const double log_ratio = log_post_new - log_post_old + log_q_reverse - log_q_forward;
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

GuardResult procrustes_guard(const Eigen::MatrixXd& z_new, const Eigen::MatrixXd& z_prev, double tol) {
  GuardResult r;
  r.aligned = procrustes_align(z_new, z_prev);
  const double deviation = (r.aligned - z_prev).cwiseAbs().maxCoeff();
  r.decision = deviation <= tol ? GuardDecision::Discard : GuardDecision::KeepNew;
  return r;
}

ChainOutput run_chain(const Multiplex& m, const ModelSpec& spec, const Hyperparameters& hyper,
                      const McmcConfig& config, const References& references,
                      const ParameterState& start) {
  config.validate();
  hyper.validate();
  spec.validate();
  if (spec.directed != m.directed()) {
    throw std::invalid_argument("model directedness does not match the multiplex");
  }
  if (spec.F != m.F()) throw std::invalid_argument("model covariate count does not match the multiplex");
  if (start.n() != m.n() || start.K() != m.K() || start.p() != spec.p || start.F() != m.F()) {
    throw std::invalid_argument("starting state dimensions do not match the data");
  }
  if (!start.in_support()) throw std::invalid_argument("starting state lies outside the support");

  ChainOutput out;
  out.layout = ParameterLayout::make(spec, m.n(), m.K(), config.store_latent);
  out.references = references;
  out.config = config;
  const long kept = config.iterations > config.burn_in
                        ? (config.iterations - config.burn_in + config.thin - 1) / config.thin
                        : 0;
  out.samples.resize(kept, static_cast<Eigen::Index>(out.layout.columns.size()));
  out.sweeps.reserve(kept);
  out.z_mean = Eigen::MatrixXd::Zero(m.n(), spec.p);

  ParameterState s = start;
  Rng rng(config.seed);
  Sweeper sweeper(m, spec, hyper, config, references, s, rng, out);
  long row = 0;
  for (long t = 0; t < config.iterations; ++t) {
    sweeper.sweep();
    if (t >= config.burn_in && (t - config.burn_in) % config.thin == 0) {
      out.samples.row(row++) = out.layout.pack(s);
      out.sweeps.push_back(t + 1);
      out.z_mean += s.z;
    }
  }
  if (row > 0) out.z_mean /= static_cast<double>(row);
  out.final_state = s;
  return out;
}

ChainOutput fit(const Multiplex& m, const ModelSpec& spec, const Hyperparameters& hyper,
                const McmcConfig& config, InitReport* report_out) {
  InitReport report = initialize(m, spec);
  const ParameterState start = initial_state(m, spec, hyper, report);
  auto chain = run_chain(m, spec, hyper, config, report.references, start);
  if (report_out) *report_out = std::move(report);
  return chain;
}

}  // namespace lsm
