#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <filesystem>
#include <random>

#include "lsm/error.hpp"
#include "lsm/model_select.hpp"
#include "lsm/simulator.hpp"
#include "temp_file.hpp"

using namespace lsm;

namespace {

Multiplex random_multiplex(std::mt19937_64& rng, int n, int K, bool directed, double p = 0.3) {
  std::bernoulli_distribution coin(p);
  Multiplex m(n, K, directed);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = directed ? 0 : i + 1; j < n; ++j) {
        if (i != j) m.set(k, i, j, coin(rng));
      }
    }
  }
  return m;
}

std::vector<LabeledFeatures> gaussian_classes(std::mt19937_64& rng, int per_class, double spread) {
  std::normal_distribution<double> normal(0.0, spread);
  std::vector<LabeledFeatures> data;
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < per_class; ++r) {
      Eigen::VectorXd x(kSummaryDim);
      for (int d = 0; d < kSummaryDim; ++d) x[d] = normal(rng) + (d == c ? 4.0 : 0.0);
      data.push_back({x, c});
    }
  }
  return data;
}

const std::vector<std::string> kThree = {"a", "b", "c"};

}  // namespace

TEST_CASE("identical views have perfectly correlated degrees") {
  std::mt19937_64 rng(71);
  const auto one = random_multiplex(rng, 15, 1, true);
  Multiplex m(15, 4, true);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) {
        if (i != j) m.set(k, i, j, one.y(0, i, j));
      }
    }
  }
  const auto s = summary_statistics(m);
  CHECK(s.mean_cs_k == doctest::Approx(1.0));
  CHECK(s.mean_cr_k == doctest::Approx(1.0));
  CHECK(s.sd_cs_k == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nodes with identical degree sequences correlate perfectly") {
  Multiplex m(8, 4, true);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        if (i != j) m.set(k, i, j, k < 2 ? 1 : 0);
      }
    }
  }
  const auto s = summary_statistics(m);
  CHECK(s.mean_cs_i == doctest::Approx(1.0));
  CHECK(s.mean_cr_i == doctest::Approx(1.0));
  CHECK(s.mean_cs_k == 0.0);
  CHECK_THROWS_AS(summary_statistics(Multiplex(8, 1, true)), DataError);
}

TEST_CASE("shared sender effects raise the cross-view degree correlation") {
  Rng rng(72);
  TruthConfig nn, vv;
  nn.n = vv.n = 30;
  nn.K = vv.K = 4;
  nn.spec = ModelSpec::parse("NN", true);
  vv.spec = ModelSpec::parse("VV", true);
  double nn_mean = 0.0, vv_mean = 0.0;
  for (int r = 0; r < 100; ++r) {
    nn_mean += summary_statistics(simulate_multiplex(draw_truth(nn, rng), nn.spec, rng)).mean_cs_k;
    vv_mean += summary_statistics(simulate_multiplex(draw_truth(vv, rng), vv.spec, rng)).mean_cs_k;
  }
  CHECK(nn_mean > vv_mean);
}

TEST_CASE("undirected statistics coincide for senders and receivers") {
  std::mt19937_64 rng(73);
  const auto s = summary_statistics(random_multiplex(rng, 12, 3, false));
  CHECK(s.mean_cs_k == s.mean_cr_k);
  CHECK(s.sd_cs_i == s.sd_cr_i);
  CHECK(SummaryStats::from_vector(s.as_vector()).as_vector() == s.as_vector());
}

TEST_CASE("node relabeling leaves the statistics unchanged") {
  std::mt19937_64 rng(74);
  const auto m = random_multiplex(rng, 10, 3, true);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Multiplex q(10, 3, true);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        if (i != j) q.set(k, perm[i], perm[j], m.y(k, i, j));
      }
    }
  }
  const Eigen::VectorXd a = summary_statistics(m).as_vector();
  const Eigen::VectorXd b = summary_statistics(q).as_vector();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("LDA separates well-spaced Gaussian classes") {
  std::mt19937_64 rng(75);
  const auto train = gaussian_classes(rng, 300, 1.0);
  const auto model = lda_train(train, kThree);
  const auto test = gaussian_classes(rng, 300, 1.0);
  int right = 0;
  for (const auto& t : test) {
    const auto p = model.predict(t.features);
    CHECK(p.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
    right += p.label == t.label;
  }
  CHECK(right / 900.0 >= 0.99);
  for (int c = 0; c < 3; ++c) {
    CHECK(model.predict(model.means.row(c).transpose()).probabilities[c] > 0.99);
  }
  CHECK(cross_validation_error(train, kThree, 10, 3) < 0.01);
  CHECK(cross_validation_error(train, kThree, 10, 3) == cross_validation_error(train, kThree, 10, 3));
}

TEST_CASE("LDA falls back to priors when classes are indistinguishable") {
  std::vector<LabeledFeatures> data;
  std::mt19937_64 rng(76);
  std::normal_distribution<double> normal;
  for (int r = 0; r < 40; ++r) {
    Eigen::VectorXd x(kSummaryDim);
    for (auto& v : x) v = normal(rng);
    data.push_back({x, 0});
    data.push_back({x, 1});
    data.push_back({x, 1});
  }
  const auto model = lda_train(data, {"a", "b"});
  const auto p = model.predict(Eigen::VectorXd::Constant(kSummaryDim, 0.3));
  CHECK(p.probabilities[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(p.label == 1);
}

TEST_CASE("LDA is invariant to doubling the training set") {
  std::mt19937_64 rng(77);
  auto data = gaussian_classes(rng, 50, 2.0);
  const auto once = lda_train(data, kThree, 0.01);
  auto twice = data;
  twice.insert(twice.end(), data.begin(), data.end());
  const auto doubled = lda_train(twice, kThree, 0.01);
  const Eigen::VectorXd x = data[7].features;
  CHECK((once.predict(x).probabilities - doubled.predict(x).probabilities).cwiseAbs().maxCoeff() < 1e-3);
  CHECK((once.means - doubled.means).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("singular covariance without ridge is reported") {
  std::vector<LabeledFeatures> data;
  for (int r = 0; r < 20; ++r) data.push_back({Eigen::VectorXd::Zero(kSummaryDim), r % 2});
  CHECK_THROWS_AS(lda_train(data, {"a", "b"}, 0.0), NumericalError);
}

TEST_CASE("classifier JSON roundtrip") {
  std::mt19937_64 rng(78);
  const auto model = lda_train(gaussian_classes(rng, 30, 1.0), kThree);
  fixture::TempFile file("", ".json");
  model.save(file.path());
  const auto back = LdaModel::load(file.path());
  CHECK(back.labels == model.labels);
  CHECK(back.means == model.means);
  CHECK(back.covariance == model.covariance);
  CHECK(back.priors == model.priors);
  CHECK(back.reg == model.reg);
  auto j = model.to_json();
  j["format_version"] = 99;
  CHECK_THROWS_AS(LdaModel::from_json(j), DataError);
}

TEST_CASE("training sets are independent of the thread count") {
  TrainingSetConfig cfg;
  cfg.n = 12;
  cfg.K = 3;
  cfg.replicates = 4;
  cfg.seed = 9;
  const auto one = simulate_training_set(cfg);
  cfg.threads = 3;
  const auto three = simulate_training_set(cfg);
  REQUIRE(one.size() == 4 * model_labels(true).size());
  for (std::size_t r = 0; r < one.size(); ++r) {
    CHECK(one[r].label == three[r].label);
    CHECK(one[r].features == three[r].features);
  }
  CHECK(model_labels(false).size() == 3);
}

TEST_CASE("heuristic selection caches its classifier") {
  std::mt19937_64 rng(79);
  const auto m = random_multiplex(rng, 12, 3, true);
  fixture::TempFile dir("", "");
  SelectOptions o;
  o.replicates = 10;
  o.folds = 5;
  o.threads = 2;
  o.cache_dir = dir.path();
  const auto first = heuristic_select(m, o);
  CHECK_FALSE(first.from_cache);
  CHECK(first.probabilities.sum() == doctest::Approx(1.0));
  CHECK(std::filesystem::exists(std::filesystem::path(dir.path()) / "lda_directed_n12_K3_T10_p2_seed1.json"));
  const auto second = heuristic_select(m, o);
  CHECK(second.from_cache);
  CHECK(second.probabilities == first.probabilities);
  CHECK(second.cv_error == first.cv_error);
  const auto order = first.ranking();
  CHECK(order.front() == first.best);

  o.replicates = 5;
  CHECK_THROWS_AS(heuristic_select(m, o), std::invalid_argument);
}
