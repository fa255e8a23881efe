#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"
#include "lsm/sampler.hpp"

namespace lsm {

/// Szekely's V-statistic distance correlation (square root of dCor^2).
/// Zero-variance input gives 0.
double distance_correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Average ranks, 1-based, ties sharing their mean rank.
Eigen::VectorXd mid_ranks(const Eigen::VectorXd& v);

/// Pearson correlation of mid-ranks; 0 when either rank vector is constant.
double spearman(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Procrustes (protest) correlation sqrt(1 - m^2) after centering,
/// rotation/reflection and scaling of A onto B. 0 for a degenerate input.
double procrustes_correlation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  std::optional<double> sd;  ///< absent for pinned parameters
  double q025 = 0.0;
  double q975 = 0.0;
};

std::vector<ParameterSummary> posterior_summaries(const ChainOutput& chain);

/// Summaries of one column of draws (sample sd, type-7 quantiles).
ParameterSummary summarize_draws(const std::string& name, const Eigen::VectorXd& draws);

enum class ProbabilityMode {
  PlugIn,         ///< edge probabilities at posterior-mean parameters
  PosteriorMean,  ///< mean over stored samples (requires stored latent positions)
};

struct ViewRecovery {
  int view = 0;
  double dcor_probability = 0.0;
  std::optional<double> spearman_sender;
  std::optional<double> spearman_receiver;
};

struct RecoveryReport {
  std::vector<ViewRecovery> views;
  double procrustes = 0.0;
  nlohmann::json to_json() const;
};

/// Edge probabilities of view k over observed off-diagonal dyads, in
/// for_each_dyad order.
Eigen::VectorXd observed_probabilities(const Multiplex& m, const ParameterState& s,
                                       const ModelSpec& spec, int k);

RecoveryReport recovery_report(const ParameterState& truth, const ChainOutput& chain,
                               const Multiplex& m,
                               ProbabilityMode mode = ProbabilityMode::PlugIn);

/// Same report for an explicit estimate (no chain).
RecoveryReport recovery_report(const ParameterState& truth, const ParameterState& estimate,
                               const ModelSpec& spec, const Multiplex& m);

}  // namespace lsm
