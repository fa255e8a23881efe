#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lsm/distributions.hpp"
#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"

namespace lsm {

/// Generator law for synthetic truths.
struct TruthConfig {
  int n = 50;
  int K = 5;
  ModelSpec spec;
  double reference_alpha = 2.0;
  double reference_beta = 1.0;
  double alpha_mean = 2.0;
  double alpha_sd = 0.5;
  double beta_mean = 1.0;
  double beta_sd = 0.5;
  double lambda_mean = 0.5;
  double lambda_sd = 0.25;
  double missing_rate = 0.0;

  void validate() const;
};

/// z ~ N(0, I); effects ~ Unif(-1, 1) with one random node per view (or one
/// overall for Constant effects) pinned at 1; alpha/beta of views 2..K from
/// normals truncated at 0; view 1 at the reference values.
ParameterState draw_truth(const TruthConfig& cfg, Rng& rng);

/// Bernoulli draw of every off-diagonal cell. Undirected models draw i < j and
/// mirror. Covariates, if given, are attached to the multiplex.
Multiplex simulate_multiplex(const ParameterState& truth, const ModelSpec& spec, Rng& rng,
                             double missing_rate = 0.0,
                             std::vector<Eigen::MatrixXd> covariates = {});

}  // namespace lsm
