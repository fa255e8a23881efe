#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lsm/distributions.hpp"
#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"

namespace lsm {

/// Means and standard deviations of degree-correlation matrices: across views
/// (K x K) and across nodes (n x n), for out-degrees (s) and in-degrees (r).
struct SummaryStats {
  double mean_cs_k = 0.0;
  double mean_cr_k = 0.0;
  double mean_cs_i = 0.0;
  double mean_cr_i = 0.0;
  double sd_cs_k = 0.0;
  double sd_cr_k = 0.0;
  double sd_cs_i = 0.0;
  double sd_cr_i = 0.0;

  Eigen::VectorXd as_vector() const;
  static SummaryStats from_vector(const Eigen::VectorXd& v);
};

inline constexpr int kSummaryDim = 8;

/// Pearson correlation; 0 when either input has zero variance.
double pearson_guarded(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

SummaryStats summary_statistics(const Multiplex& m);

struct LabeledFeatures {
  Eigen::VectorXd features;
  int label = 0;
};

/// Linear discriminant classifier with a shared, ridge-regularized covariance.
struct LdaModel {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> labels;
  Eigen::MatrixXd means;       ///< classes x features
  Eigen::MatrixXd covariance;  ///< pooled within-class + reg * I
  Eigen::VectorXd priors;
  double reg = 0.0;

  struct Prediction {
    int label = 0;
    Eigen::VectorXd probabilities;
  };
  Prediction predict(const Eigen::VectorXd& x) const;

  nlohmann::json to_json() const;
  static LdaModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static LdaModel load(const std::string& path);
};

/// Default ridge 1e-6 * trace(pooled covariance) / dim.
double default_lda_ridge(const std::vector<LabeledFeatures>& data, int num_classes);

/// reg < 0 selects default_lda_ridge. Throws NumericalError if the
/// regularized covariance is not positive definite.
LdaModel lda_train(const std::vector<LabeledFeatures>& data, const std::vector<std::string>& labels,
                   double reg = -1.0);

LdaModel::Prediction lda_predict(const LdaModel& model, const SummaryStats& s);

/// Misclassification rate of stratification-free k-fold cross-validation
/// after a seeded shuffle.
double cross_validation_error(const std::vector<LabeledFeatures>& data,
                              const std::vector<std::string>& labels, int folds,
                              std::uint64_t seed, double reg = -1.0);

struct TrainingSetConfig {
  int n = 50;
  int K = 5;
  int p = 2;
  bool directed = true;
  long replicates = 5000;  ///< per model
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Simulates `replicates` multiplexes per model and returns their statistics.
/// Replicate r of model c always uses the same derived seed, independent of
/// the thread count.
std::vector<LabeledFeatures> simulate_training_set(const TrainingSetConfig& cfg);

std::vector<std::string> model_labels(bool directed);

struct SelectionResult {
  std::vector<std::string> labels;
  Eigen::VectorXd probabilities;
  int best = 0;
  double cv_error = 0.0;
  LdaModel model;
  bool from_cache = false;

  /// Indices sorted by decreasing probability, ties in label order.
  std::vector<int> ranking() const;
};

struct SelectOptions {
  long replicates = 5000;
  std::uint64_t seed = 1;
  int threads = 1;
  int folds = 10;
  int p = 2;
  /// Directory for trained classifiers; empty disables caching.
  std::string cache_dir;
};

/// Simulate, train, cross-validate, then classify m.
SelectionResult heuristic_select(const Multiplex& m, const SelectOptions& options);

}  // namespace lsm
