// Random test instances shared by several test files.
#pragma once

#include <random>
#include <string>

#include "lsm/model.hpp"
#include "lsm/multiplex.hpp"
#include "oracles.hpp"

namespace fixture {

struct Options {
  int n = 6;
  int K = 3;
  int p = 2;
  int F = 0;
  bool directed = true;
  char sender = 'N';
  char receiver = 'N';
  double missing = 0.0;
};

inline oracle::Instance random_instance(std::mt19937_64& rng, const Options& o) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> effect(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  oracle::Instance a;
  a.n = o.n;
  a.K = o.K;
  a.directed = o.directed;
  a.sender = o.sender;
  a.receiver = o.directed ? o.receiver : 'N';
  a.alpha = Eigen::VectorXd(o.K);
  a.beta = Eigen::VectorXd(o.K);
  for (int k = 0; k < o.K; ++k) {
    a.alpha[k] = 0.5 + 2.5 * unit(rng);
    a.beta[k] = 0.2 + 1.5 * unit(rng);
  }
  a.z = Eigen::MatrixXd(o.n, o.p);
  for (int i = 0; i < o.n; ++i) {
    for (int d = 0; d < o.p; ++d) a.z(i, d) = normal(rng);
  }
  auto effects = [&](char type) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(o.n, o.K);
    for (int i = 0; i < o.n; ++i) {
      const double c = effect(rng);
      for (int k = 0; k < o.K; ++k) e(i, k) = type == 'V' ? effect(rng) : (type == 'C' ? c : 0.0);
    }
    return e;
  };
  a.theta = effects(a.sender);
  a.gamma = o.directed ? effects(a.receiver) : a.theta;
  a.lambda = Eigen::VectorXd(o.F);
  for (int f = 0; f < o.F; ++f) {
    a.lambda[f] = unit(rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(o.n, o.n);
    for (int i = 0; i < o.n; ++i) {
      for (int j = 0; j < o.n; ++j) {
        if (i == j) continue;
        x(i, j) = o.directed || j > i ? unit(rng) : x(j, i);
      }
    }
    a.x.push_back(x);
  }
  for (int k = 0; k < o.K; ++k) {
    Eigen::MatrixXi y = Eigen::MatrixXi::Zero(o.n, o.n);
    Eigen::MatrixXi h = Eigen::MatrixXi::Zero(o.n, o.n);
    for (int i = 0; i < o.n; ++i) {
      for (int j = 0; j < o.n; ++j) {
        if (i == j) continue;
        if (!o.directed && j < i) {
          y(i, j) = y(j, i);
          h(i, j) = h(j, i);
          continue;
        }
        h(i, j) = unit(rng) >= o.missing ? 1 : 0;
        y(i, j) = h(i, j) && unit(rng) < oracle::sigmoid(oracle::eta(a, k, i, j)) ? 1 : 0;
      }
    }
    a.y.push_back(y);
    a.h.push_back(h);
  }
  return a;
}

inline lsm::Multiplex to_multiplex(const oracle::Instance& a) {
  lsm::Multiplex m(a.n, a.K, a.directed);
  for (int k = 0; k < a.K; ++k) {
    for (int i = 0; i < a.n; ++i) {
      for (int j = 0; j < a.n; ++j) {
        if (i == j || (!a.directed && j < i)) continue;
        m.set(k, i, j, static_cast<std::uint8_t>(a.y[k](i, j)), static_cast<std::uint8_t>(a.h[k](i, j)));
      }
    }
  }
  if (!a.x.empty()) m.set_covariates(a.x);
  return m;
}

inline lsm::ModelSpec to_spec(const oracle::Instance& a) {
  const std::string name = a.directed ? std::string{a.sender, a.receiver} : std::string{a.sender};
  return lsm::ModelSpec::parse(name, a.directed, static_cast<int>(a.z.cols()), static_cast<int>(a.x.size()));
}

inline lsm::ParameterState to_state(const oracle::Instance& a) {
  auto s = lsm::ParameterState::zeros(a.n, a.K, static_cast<int>(a.z.cols()), static_cast<int>(a.x.size()));
  s.alpha = a.alpha;
  s.beta = a.beta;
  s.theta = a.theta;
  s.gamma = a.gamma;
  s.z = a.z;
  s.lambda = a.lambda;
  s.mu_alpha = 1.8;
  s.mu_beta = 0.9;
  s.sigma2_alpha = 0.7;
  s.sigma2_beta = 0.4;
  s.mu_lambda.setConstant(0.3);
  s.sigma2_lambda.setConstant(0.5);
  return s;
}

}  // namespace fixture
