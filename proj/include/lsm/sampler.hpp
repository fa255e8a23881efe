#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsm/distributions.hpp"
#include "lsm/init.hpp"
#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"

namespace lsm {

/// Which parameter blocks a chain updates. Blocks switched off keep their
/// starting values; used for restricted runs and calibration checks.
struct UpdateBlocks {
  bool nuisance = true;
  bool alpha = true;
  bool beta = true;
  bool latent = true;
  bool effects = true;
  bool lambda = true;
};

struct McmcConfig {
  long iterations = 60000;  ///< total sweeps, burn-in included
  long burn_in = 15000;
  long thin = 1;
  std::uint64_t seed = 1;
  double procrustes_tolerance = 1e-8;
  bool store_latent = false;
  UpdateBlocks update;

  void validate() const;
};

struct AcceptanceCounter {
  long proposed = 0;
  long accepted = 0;
  double rate() const { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed; }
};

struct AcceptanceRates {
  AcceptanceCounter alpha_beta;
  AcceptanceCounter latent;
  AcceptanceCounter sender;
  AcceptanceCounter receiver;
  AcceptanceCounter lambda;
};

/// Flat column layout of one stored sweep.
///
/// Pinned parameters are kept in the layout (they are constant columns).
/// Constant effects get one column per node; Variable effects one per
/// (node, view).
struct ParameterLayout {
  ModelSpec spec;
  int n = 0;
  int K = 0;
  bool with_latent = false;
  std::vector<std::string> columns;

  static ParameterLayout make(const ModelSpec& spec, int n, int K, bool with_latent);
  Eigen::RowVectorXd pack(const ParameterState& s) const;
  /// Rebuilds a state from a row. Latent positions are only filled when the
  /// layout carries them.
  ParameterState unpack(const Eigen::RowVectorXd& row) const;
  int column(const std::string& name) const;  ///< -1 when absent
};

struct ChainOutput {
  ParameterLayout layout;
  References references;
  McmcConfig config;
  Eigen::MatrixXd samples;  ///< one row per stored sweep
  std::vector<long> sweeps;
  /// Running mean of the (aligned) latent positions over stored sweeps.
  Eigen::MatrixXd z_mean;
  AcceptanceRates acceptance;
  long procrustes_discards = 0;
  ParameterState final_state;

  long stored() const { return static_cast<long>(samples.rows()); }
  /// Posterior-mean state with z taken from z_mean.
  ParameterState posterior_mean() const;
  /// Column names of parameters held fixed by the identifiability constraints.
  std::vector<std::string> pinned_columns() const;
};

struct InverseGammaParams {
  double shape = 0.0;
  double rate = 0.0;
};

/// Full conditional of a group variance: shape (nu + K + 1)/2 and rate
/// (tau + tau*sum (x - mu)^2 + (mu - m)^2) / (2 tau).
InverseGammaParams variance_conditional(const Eigen::VectorXd& values, double mu, double tau,
                                        double nu, double m);

struct NormalParams {
  double mean = 0.0;
  double var = 1.0;
};

/// Full conditional of a group mean, truncated to [0, inf):
/// mean (tau*sum x + m)/(1 + K tau), variance tau*sigma2/(1 + K tau).
NormalParams mean_conditional(const Eigen::VectorXd& values, double sigma2, double tau, double m);

/// One Gibbs pass over sigma2/mu for alpha, beta and each lambda_f.
void gibbs_update_nuisance(ParameterState& s, const Hyperparameters& hyper, Rng& rng);

bool mh_accept(double log_post_old, double log_post_new, double log_q_forward,
               double log_q_reverse, Rng& rng);

enum class GuardDecision { KeepNew, Discard };

struct GuardResult {
  GuardDecision decision = GuardDecision::KeepNew;
  Eigen::MatrixXd aligned;  ///< z_new aligned onto z_prev
};

/// Discards z_new when, after alignment, it is within tol (max abs coordinate
/// deviation) of z_prev.
GuardResult procrustes_guard(const Eigen::MatrixXd& z_new, const Eigen::MatrixXd& z_prev, double tol);

/// Runs the Metropolis-within-Gibbs sampler from `start`.
ChainOutput run_chain(const Multiplex& m, const ModelSpec& spec, const Hyperparameters& hyper,
                      const McmcConfig& config, const References& references,
                      const ParameterState& start);

/// Convenience: initialize then run.
ChainOutput fit(const Multiplex& m, const ModelSpec& spec, const Hyperparameters& hyper,
                const McmcConfig& config, InitReport* report_out = nullptr);

}  // namespace lsm
