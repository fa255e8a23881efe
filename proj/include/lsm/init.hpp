#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"

namespace lsm {

/// Nodes and view whose parameters are held fixed for identifiability.
///
/// sender_node[k] / receiver_node[k] is the pinned node in view k, or -1.
/// Constant effects pin the same node in every view. Undirected models use
/// sender_node for the shared effect.
struct References {
  int view = 0;
  std::vector<int> sender_node;
  std::vector<int> receiver_node;

  bool sender_pinned(int i, int k) const { return !sender_node.empty() && sender_node[k] == i; }
  bool receiver_pinned(int i, int k) const {
    return !receiver_node.empty() && receiver_node[k] == i;
  }
};

struct InitReport {
  Eigen::MatrixXd z0;
  Eigen::VectorXd alpha0;
  Eigen::VectorXd beta0;
  References references;
  long disconnected_pairs = 0;
  std::vector<std::string> warnings;
};

/// Unweighted shortest paths on each symmetrized view, averaged over views.
/// Unreachable pairs take (largest finite geodesic in that view) + 1.
/// disconnected_pairs, if given, receives the number of imputed (view, pair) cells.
Eigen::MatrixXd geodesic_average(const Multiplex& m, long* disconnected_pairs = nullptr);

/// Torgerson scaling of a distance matrix (not squared) into p dimensions.
/// Each axis is signed so that its first nonzero loading is positive.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& D, int p);

struct LogisticFit {
  double intercept = 0.0;
  double slope = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// IRLS fit of logit P(y=1) = intercept + slope * x with a small ridge.
LogisticFit fit_logistic_irls(const std::vector<double>& x, const std::vector<double>& y,
                              int max_iterations = 25, double tolerance = 1e-8,
                              double ridge = 1e-6);

struct LogisticInit {
  Eigen::VectorXd alpha0;
  Eigen::VectorXd beta0;
  std::vector<std::string> warnings;
};

/// Per view, regress y on squared distances of z0; alpha0 = intercept and
/// beta0 = -slope, both clamped at 0.
LogisticInit logistic_init(const Multiplex& m, const Eigen::MatrixXd& z0);

/// Reference view 0; reference nodes by highest (mean) out-/in-degree with
/// ties broken toward the lowest index.
References select_references(const Multiplex& m, const ModelSpec& spec);

InitReport initialize(const Multiplex& m, const ModelSpec& spec);

/// Starting state: z0, logistic intercepts/slopes with the reference view
/// overwritten, effects 0 except pinned nodes at 1, lambda at its prior mean.
ParameterState initial_state(const Multiplex& m, const ModelSpec& spec,
                             const Hyperparameters& hyper, const InitReport& report);

}  // namespace lsm
