#include <doctest.h>

#include <cmath>
#include <random>

#include "lsm/init.hpp"
#include "lsm/simulator.hpp"

using namespace lsm;

TEST_CASE("geodesics on a path graph") {
  Multiplex m(4, 1, true);
  m.set(0, 0, 1, 1);
  m.set(0, 2, 1, 1);  // direction is ignored
  m.set(0, 2, 3, 1);
  long disconnected = -1;
  const auto D = geodesic_average(m, &disconnected);
  CHECK(D(0, 3) == 3.0);
  CHECK(D(3, 0) == 3.0);
  CHECK(D(1, 3) == 2.0);
  CHECK(disconnected == 0);
}

TEST_CASE("unreachable pairs take the largest finite geodesic plus one") {
  Multiplex m(5, 2, false);
  m.set(0, 0, 1, 1);
  m.set(0, 1, 2, 1);
  m.set(0, 3, 4, 1);
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) m.set(1, i, j, 1);
  }
  long disconnected = 0;
  const auto D = geodesic_average(m, &disconnected);
  // view 1: max finite geodesic 2, so 0..3 imputed as 3; view 2 complete.
  CHECK(D(0, 3) == doctest::Approx((3.0 + 1.0) / 2.0));
  CHECK(D(0, 2) == doctest::Approx((2.0 + 1.0) / 2.0));
  CHECK(disconnected == 6);
}

TEST_CASE("classical scaling recovers Euclidean configurations") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(12, 2);
  for (int i = 0; i < 12; ++i) X.row(i) << normal(rng), 3.0 * normal(rng);
  Eigen::MatrixXd D(12, 12);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) D(i, j) = (X.row(i) - X.row(j)).norm();
  }
  const auto Z = classical_mds(D, 2);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) CHECK((Z.row(i) - Z.row(j)).norm() == doctest::Approx(D(i, j)).epsilon(1e-9));
  }
  // centered, first nonzero loading positive on each axis
  CHECK(Z.colwise().sum().norm() < 1e-9);
  for (int a = 0; a < 2; ++a) CHECK(Z(0, a) > 0.0);
  // the major axis comes first
  CHECK(Z.col(0).squaredNorm() >= Z.col(1).squaredNorm());
  CHECK_THROWS_AS(classical_mds(D, 12), std::invalid_argument);
}

TEST_CASE("IRLS solves the ridge-penalized score equations") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x, y;
  for (int r = 0; r < 400; ++r) {
    x.push_back(4.0 * unit(rng));
    y.push_back(unit(rng) < 1.0 / (1.0 + std::exp(-(1.5 - 1.2 * x.back()))) ? 1.0 : 0.0);
  }
  const double ridge = 1e-6;
  const auto fit = fit_logistic_irls(x, y, 25, 1e-8, ridge);
  CHECK(fit.converged);
  double g0 = 0.0, g1 = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double p = 1.0 / (1.0 + std::exp(-(fit.intercept + fit.slope * x[r])));
    g0 += y[r] - p;
    g1 += (y[r] - p) * x[r];
  }
  CHECK(std::abs(g0 - ridge * fit.intercept) < 1e-5);
  CHECK(std::abs(g1 - ridge * fit.slope) < 1e-5);
}

TEST_CASE("IRLS recovers known coefficients from a large sample") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x, y;
  for (int r = 0; r < 100000; ++r) {
    x.push_back(3.0 * unit(rng));
    y.push_back(unit(rng) < 1.0 / (1.0 + std::exp(-(0.8 - 1.1 * x.back()))) ? 1.0 : 0.0);
  }
  const auto fit = fit_logistic_irls(x, y);
  CHECK(fit.intercept == doctest::Approx(0.8).epsilon(0.05));
  CHECK(fit.slope == doctest::Approx(-1.1).epsilon(0.05));
}

TEST_CASE("separable data stops without converging and is reported") {
  Multiplex m(4, 1, true);
  // every pair connected: intercept diverges
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) m.set(0, i, j, 1);
    }
  }
  const auto li = logistic_init(m, Eigen::MatrixXd::Identity(4, 2));
  CHECK(li.alpha0[0] > 5.0);
  CHECK(li.beta0[0] >= 0.0);
}

TEST_CASE("references pick the highest degree with lowest-index ties") {
  Multiplex m(4, 2, true);
  m.set(0, 1, 0, 1);
  m.set(0, 1, 2, 1);
  m.set(0, 3, 2, 1);
  m.set(1, 3, 0, 1);
  m.set(1, 3, 2, 1);
  m.set(1, 1, 0, 1);
  const auto vv = select_references(m, ModelSpec::parse("VV", true));
  CHECK(vv.view == 0);
  CHECK(vv.sender_node == std::vector<int>{1, 3});
  CHECK(vv.receiver_node == std::vector<int>{2, 0});
  const auto cc = select_references(m, ModelSpec::parse("CC", true));
  CHECK(cc.sender_node == std::vector<int>{1, 1});  // mean out-degrees 1.5 vs 1.5: lowest index
  const auto nn = select_references(m, ModelSpec::parse("NN", true));
  CHECK(nn.sender_node.empty());
  CHECK(nn.receiver_node.empty());
  CHECK(vv.sender_pinned(3, 1));
  CHECK(!vv.sender_pinned(3, 0));
}

TEST_CASE("initial state pins the reference view and nodes") {
  Rng rng(4);
  TruthConfig tc;
  tc.n = 20;
  tc.K = 3;
  tc.spec = ModelSpec::parse("VC", true);
  const auto truth = draw_truth(tc, rng);
  const auto m = simulate_multiplex(truth, tc.spec, rng);
  const auto h = Hyperparameters::defaults_for(3);
  const auto report = initialize(m, tc.spec);
  const auto s = initial_state(m, tc.spec, h, report);
  CHECK(s.alpha[0] == 2.0);
  CHECK(s.beta[0] == 1.0);
  CHECK(s.in_support());
  for (int k = 0; k < 3; ++k) {
    CHECK(s.theta(report.references.sender_node[k], k) == 1.0);
    CHECK(s.gamma(report.references.receiver_node[k], k) == 1.0);
  }
  CHECK(s.z.rows() == 20);
  CHECK(s.z.cols() == 2);
}
