#include "lsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lsm {

namespace {

// Row means and grand mean of the pairwise distance matrix |x_i - x_j|.
void distance_means(const Eigen::VectorXd& x, Eigen::VectorXd& row, double& grand) {
  const Eigen::Index n = x.size();
  row = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::abs(x[i] - x[j]);
      row[i] += d;
      row[j] += d;
    }
  }
  row /= static_cast<double>(n);
  grand = row.mean();
}

}  // namespace

double distance_correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw std::invalid_argument("distance correlation needs equal lengths");
  if (u.size() < 2) throw std::invalid_argument("distance correlation needs at least two points");
  Eigen::VectorXd ru, rv;
  double gu = 0.0, gv = 0.0;
  distance_means(u, ru, gu);
  distance_means(v, rv, gv);
  // Double-centered entries are formed on the fly; the diagonal has
  // A_ii = -2 r_i + g.
  double suv = 0.0, suu = 0.0, svv = 0.0;
  const Eigen::Index n = u.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = -2.0 * ru[i] + gu;
    const double b = -2.0 * rv[i] + gv;
    suv += a * b;
    suu += a * a;
    svv += b * b;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double aij = std::abs(u[i] - u[j]) - ru[i] - ru[j] + gu;
      const double bij = std::abs(v[i] - v[j]) - rv[i] - rv[j] + gv;
      suv += 2.0 * aij * bij;
      suu += 2.0 * aij * aij;
      svv += 2.0 * bij * bij;
    }
  }
  if (suu <= 0.0 || svv <= 0.0) return 0.0;
  const double r2 = suv / std::sqrt(suu * svv);
  return std::sqrt(std::clamp(r2, 0.0, 1.0));
}

Eigen::VectorXd mid_ranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  Eigen::VectorXd ranks(n);
  Eigen::Index a = 0;
  while (a < n) {
    Eigen::Index b = a;
    while (b + 1 < n && v[order[b + 1]] == v[order[a]]) ++b;
    const double rank = 0.5 * static_cast<double>(a + b) + 1.0;
    for (Eigen::Index c = a; c <= b; ++c) ranks[order[c]] = rank;
    a = b + 1;
  }
  return ranks;
}

double spearman(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw std::invalid_argument("spearman needs equal lengths");
  if (u.size() < 2) throw std::invalid_argument("spearman needs at least two points");
  const Eigen::ArrayXd ru = mid_ranks(u).array() - (static_cast<double>(u.size()) + 1.0) / 2.0;
  const Eigen::ArrayXd rv = mid_ranks(v).array() - (static_cast<double>(v.size()) + 1.0) / 2.0;
  const double suu = ru.square().sum();
  const double svv = rv.square().sum();
  if (suu <= 0.0 || svv <= 0.0) return 0.0;
  return std::clamp((ru * rv).sum() / std::sqrt(suu * svv), -1.0, 1.0);
}

double procrustes_correlation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("procrustes correlation needs equal shapes");
  }
  const Eigen::MatrixXd a = A.rowwise() - A.colwise().mean();
  const Eigen::MatrixXd b = B.rowwise() - B.colwise().mean();
  const double na = a.norm();
  const double nb = b.norm();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  return std::clamp(svd.singularValues().sum() / (na * nb), 0.0, 1.0);
}

ParameterSummary summarize_draws(const std::string& name, const Eigen::VectorXd& draws) {
  if (draws.size() == 0) throw std::invalid_argument("no draws to summarize");
  ParameterSummary s;
  s.name = name;
  const Eigen::Index n = draws.size();
  s.mean = draws.mean();
  s.sd = n > 1 ? std::sqrt((draws.array() - s.mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
  std::vector<double> sorted(draws.data(), draws.data() + n);
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double h = (static_cast<double>(n) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.q025 = quantile(0.025);
  s.q975 = quantile(0.975);
  return s;
}

std::vector<ParameterSummary> posterior_summaries(const ChainOutput& chain) {
  if (chain.stored() == 0) throw std::invalid_argument("the chain stored no samples");
  const auto pinned = chain.pinned_columns();
  std::vector<ParameterSummary> out;
  for (std::size_t c = 0; c < chain.layout.columns.size(); ++c) {
    const auto& name = chain.layout.columns[c];
    auto s = summarize_draws(name, chain.samples.col(static_cast<Eigen::Index>(c)));
    if (std::find(pinned.begin(), pinned.end(), name) != pinned.end()) s.sd.reset();
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json RecoveryReport::to_json() const {
  nlohmann::json j;
  j["procrustes"] = procrustes;
  j["views"] = nlohmann::json::array();
  for (const auto& v : views) {
    nlohmann::json row;
    row["view"] = v.view + 1;
    row["dcor_probability"] = v.dcor_probability;
    if (v.spearman_sender) row["spearman_sender"] = *v.spearman_sender;
    if (v.spearman_receiver) row["spearman_receiver"] = *v.spearman_receiver;
    j["views"].push_back(row);
  }
  return j;
}

Eigen::VectorXd observed_probabilities(const Multiplex& m, const ParameterState& s,
                                       const ModelSpec& spec, int k) {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(m.n()) * m.n());
  for_each_dyad(m.n(), spec.directed, [&](int i, int j) {
    if (m.h(k, i, j)) p.push_back(edge_probability(m, s, spec, k, i, j));
  });
  return Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
}

namespace {

void check_shapes(const ParameterState& truth, const ParameterState& estimate, const Multiplex& m) {
  if (truth.n() != m.n() || truth.K() != m.K() || estimate.n() != m.n() || estimate.K() != m.K() ||
      truth.p() != estimate.p() || truth.F() != estimate.F()) {
    throw std::invalid_argument("truth and estimate dimensions do not match");
  }
}

RecoveryReport report_from(const ParameterState& truth, const ParameterState& estimate,
                           const ModelSpec& spec, const Multiplex& m,
                           const std::vector<Eigen::VectorXd>& estimated_probabilities) {
  RecoveryReport r;
  for (int k = 0; k < m.K(); ++k) {
    ViewRecovery v;
    v.view = k;
    const auto truth_p = observed_probabilities(m, truth, spec, k);
    if (truth_p.size() >= 2) v.dcor_probability = distance_correlation(truth_p, estimated_probabilities[k]);
    if (spec.has_sender() && m.n() >= 2) {
      v.spearman_sender = spearman(truth.theta.col(k), estimate.theta.col(k));
    }
    if (spec.has_receiver() && m.n() >= 2) {
      v.spearman_receiver = spearman(truth.gamma.col(k), estimate.gamma.col(k));
    }
    r.views.push_back(v);
  }
  r.procrustes = procrustes_correlation(estimate.z, truth.z);
  return r;
}

}  // namespace

RecoveryReport recovery_report(const ParameterState& truth, const ParameterState& estimate,
                               const ModelSpec& spec, const Multiplex& m) {
  check_shapes(truth, estimate, m);
  std::vector<Eigen::VectorXd> probs;
  for (int k = 0; k < m.K(); ++k) probs.push_back(observed_probabilities(m, estimate, spec, k));
  return report_from(truth, estimate, spec, m, probs);
}

RecoveryReport recovery_report(const ParameterState& truth, const ChainOutput& chain,
                               const Multiplex& m, ProbabilityMode mode) {
  const auto& spec = chain.layout.spec;
  const ParameterState estimate = chain.posterior_mean();
  if (mode == ProbabilityMode::PlugIn) return recovery_report(truth, estimate, spec, m);
  if (!chain.layout.with_latent) {
    throw std::invalid_argument("posterior-mean probabilities need stored latent positions");
  }
  check_shapes(truth, estimate, m);
  std::vector<Eigen::VectorXd> probs;
  for (int k = 0; k < m.K(); ++k) probs.push_back(Eigen::VectorXd::Zero(observed_probabilities(m, estimate, spec, k).size()));
  for (long r = 0; r < chain.stored(); ++r) {
    const auto s = chain.layout.unpack(chain.samples.row(r));
    for (int k = 0; k < m.K(); ++k) probs[k] += observed_probabilities(m, s, spec, k);
  }
  for (auto& p : probs) p /= static_cast<double>(chain.stored());
  return report_from(truth, estimate, spec, m, probs);
}

}  // namespace lsm
