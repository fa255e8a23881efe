#include "lsm/init.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "lsm/error.hpp"

namespace lsm {

namespace {

std::vector<int> bfs_lengths(const std::vector<std::vector<int>>& adjacency, int source) {
  std::vector<int> dist(adjacency.size(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adjacency[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

Eigen::MatrixXd geodesic_average(const Multiplex& m, long* disconnected_pairs) {
  const int n = m.n();
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(n, n);
  long imputed = 0;
  for (int k = 0; k < m.K(); ++k) {
    std::vector<std::vector<int>> adjacency(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool edge = (m.h(k, i, j) && m.y(k, i, j)) || (m.h(k, j, i) && m.y(k, j, i));
        if (edge) {
          adjacency[i].push_back(j);
          adjacency[j].push_back(i);
        }
      }
    }
    Eigen::MatrixXi geo(n, n);
    int max_finite = 0;
    for (int i = 0; i < n; ++i) {
      const auto d = bfs_lengths(adjacency, i);
      for (int j = 0; j < n; ++j) {
        geo(i, j) = d[j];
        max_finite = std::max(max_finite, d[j]);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        int g = geo(i, j);
        if (g < 0) {
          g = max_finite + 1;
          if (i < j) ++imputed;
        }
        avg(i, j) += g;
      }
    }
  }
  if (disconnected_pairs) *disconnected_pairs = imputed;
  return avg / static_cast<double>(m.K());
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& D, int p) {
  const auto n = D.rows();
  if (D.cols() != n) throw std::invalid_argument("classical_mds: distance matrix must be square");
  if (p < 1 || p > n - 1) throw std::invalid_argument("classical_mds: need 1 <= p <= n-1");
  const Eigen::MatrixXd sq = D.array().square().matrix();
  const Eigen::MatrixXd J =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd B = -0.5 * J * sq * J;
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
  if (eig.info() != Eigen::Success) throw NumericalError("classical_mds: eigendecomposition failed");

  // eigenvalues come in increasing order
  Eigen::MatrixXd coords(n, p);
  for (int a = 0; a < p; ++a) {
    const auto col = n - 1 - a;
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0) v = -v;
        break;
      }
    }
    coords.col(a) = v * std::sqrt(std::max(eig.eigenvalues()[col], 0.0));
  }
  return coords;
}

LogisticFit fit_logistic_irls(const std::vector<double>& x, const std::vector<double>& y,
                              int max_iterations, double tolerance, double ridge) {
  LogisticFit fit;
  const std::size_t N = x.size();
  if (N == 0) return fit;
  Eigen::Vector2d coef = Eigen::Vector2d::Zero();
  double deviance_old = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::Matrix2d xtwx = ridge * Eigen::Matrix2d::Identity();
    Eigen::Vector2d xtwz = Eigen::Vector2d::Zero();
    for (std::size_t r = 0; r < N; ++r) {
      const double eta = coef[0] + coef[1] * x[r];
      const double mu = logistic(eta);
      const double w = std::max(mu * (1.0 - mu), 1e-12);
      const double work = eta + (y[r] - mu) / w;
      const Eigen::Vector2d row(1.0, x[r]);
      xtwx.noalias() += w * row * row.transpose();
      xtwz.noalias() += w * work * row;
    }
    coef = xtwx.ldlt().solve(xtwz);
    double deviance = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
      const double eta = coef[0] + coef[1] * x[r];
      deviance += 2.0 * (softplus(eta) - y[r] * eta);
    }
    fit.iterations = it;
    if (std::abs(deviance - deviance_old) / (std::abs(deviance) + 0.1) < tolerance) {
      fit.converged = true;
      break;
    }
    deviance_old = deviance;
  }
  fit.intercept = coef[0];
  fit.slope = coef[1];
  return fit;
}

LogisticInit logistic_init(const Multiplex& m, const Eigen::MatrixXd& z0) {
  LogisticInit out;
  out.alpha0 = Eigen::VectorXd::Zero(m.K());
  out.beta0 = Eigen::VectorXd::Zero(m.K());
  for (int k = 0; k < m.K(); ++k) {
    std::vector<double> x;
    std::vector<double> y;
    for_each_dyad(m.n(), m.directed(), [&](int i, int j) {
      if (!m.h(k, i, j)) return;
      x.push_back((z0.row(i) - z0.row(j)).squaredNorm());
      y.push_back(m.y(k, i, j));
    });
    const auto fit = fit_logistic_irls(x, y);
    if (!fit.converged) {
      out.warnings.push_back("logistic initialization did not converge in view " +
                             m.view_labels[k]);
    }
    out.alpha0[k] = std::isfinite(fit.intercept) ? std::max(fit.intercept, 0.0) : 0.0;
    out.beta0[k] = std::isfinite(fit.slope) ? std::max(-fit.slope, 0.0) : 0.0;
  }
  return out;
}

References select_references(const Multiplex& m, const ModelSpec& spec) {
  References refs;
  refs.view = 0;
  const auto deg = degrees(m);
  auto pick = [&](EffectType type, const Eigen::MatrixXd& d) {
    std::vector<int> nodes(m.K(), -1);
    if (type == EffectType::Variable) {
      for (int k = 0; k < m.K(); ++k) nodes[k] = argmax_lowest(d.col(k));
    } else if (type == EffectType::Constant) {
      const int node = argmax_lowest(d.rowwise().mean());
      std::fill(nodes.begin(), nodes.end(), node);
    }
    return nodes;
  };
  if (spec.directed) {
    if (spec.has_sender()) refs.sender_node = pick(spec.sender, deg.out);
    if (spec.has_receiver()) refs.receiver_node = pick(spec.receiver, deg.in);
  } else if (spec.has_shared()) {
    refs.sender_node = pick(spec.sender, deg.out);
  }
  return refs;
}

InitReport initialize(const Multiplex& m, const ModelSpec& spec) {
  InitReport report;
  const Eigen::MatrixXd D = geodesic_average(m, &report.disconnected_pairs);
  report.z0 = classical_mds(D, spec.p);
  auto li = logistic_init(m, report.z0);
  report.alpha0 = li.alpha0;
  report.beta0 = li.beta0;
  report.warnings = std::move(li.warnings);
  report.references = select_references(m, spec);
  return report;
}

ParameterState initial_state(const Multiplex& m, const ModelSpec& spec, const Hyperparameters& hyper,
                             const InitReport& report) {
  ParameterState s = ParameterState::zeros(m.n(), m.K(), spec.p, m.F());
  s.z = report.z0;
  s.alpha = report.alpha0;
  s.beta = report.beta0;
  s.alpha[report.references.view] = hyper.reference_alpha;
  s.beta[report.references.view] = hyper.reference_beta;
  s.mu_alpha = s.alpha.mean();
  s.mu_beta = s.beta.mean();
  s.sigma2_alpha = 1.0;
  s.sigma2_beta = 1.0;
  for (int k = 0; k < m.K(); ++k) {
    if (!report.references.sender_node.empty()) {
      const int i = report.references.sender_node[k];
      if (i >= 0) s.theta(i, k) = 1.0;
    }
    if (!report.references.receiver_node.empty()) {
      const int j = report.references.receiver_node[k];
      if (j >= 0) s.gamma(j, k) = 1.0;
    }
  }
  if (!spec.directed) s.gamma = s.theta;
  for (int f = 0; f < m.F(); ++f) {
    s.mu_lambda[f] = std::max(hyper.m_lambda, 0.0);
    s.lambda[f] = s.mu_lambda[f];
  }
  return s;
}

}  // namespace lsm
