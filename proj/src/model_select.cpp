#include "lsm/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lsm/error.hpp"
#include "lsm/simulator.hpp"

namespace lsm {

Eigen::VectorXd SummaryStats::as_vector() const {
  Eigen::VectorXd v(kSummaryDim);
  v << mean_cs_k, mean_cr_k, mean_cs_i, mean_cr_i, sd_cs_k, sd_cr_k, sd_cs_i, sd_cr_i;
  return v;
}

SummaryStats SummaryStats::from_vector(const Eigen::VectorXd& v) {
  if (v.size() != kSummaryDim) throw std::invalid_argument("summary vector must have 8 entries");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

double pearson_guarded(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

// Mean and sample sd of the off-diagonal correlations between the rows of x.
std::pair<double, double> correlation_moments(const Eigen::MatrixXd& x) {
  const int r = static_cast<int>(x.rows());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(r) * (r - 1) / 2);
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) values.push_back(pearson_guarded(x.row(a).transpose(), x.row(b).transpose()));
  }
  // The matrix is symmetric, so each value fills two off-diagonal cells.
  const double cells = 2.0 * static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += 2.0 * v;
  const double mean = sum / cells;
  double ss = 0.0;
  for (double v : values) ss += 2.0 * (v - mean) * (v - mean);
  const double sd = cells > 1.0 ? std::sqrt(ss / (cells - 1.0)) : 0.0;
  return {mean, sd};
}

}  // namespace

SummaryStats summary_statistics(const Multiplex& m) {
  if (m.n() < 3 || m.K() < 2) throw DataError("summary statistics need n >= 3 and K >= 2");
  const auto d = degrees(m);
  SummaryStats s;
  std::tie(s.mean_cs_k, s.sd_cs_k) = correlation_moments(d.out.transpose());
  std::tie(s.mean_cr_k, s.sd_cr_k) = correlation_moments(d.in.transpose());
  std::tie(s.mean_cs_i, s.sd_cs_i) = correlation_moments(d.out);
  std::tie(s.mean_cr_i, s.sd_cr_i) = correlation_moments(d.in);
  return s;
}

LdaModel::Prediction LdaModel::predict(const Eigen::VectorXd& x) const {
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  const int C = static_cast<int>(means.rows());
  Eigen::VectorXd score(C);
  for (int c = 0; c < C; ++c) {
    const Eigen::VectorXd mu = means.row(c).transpose();
    const Eigen::VectorXd w = llt.solve(mu);
    score[c] = x.dot(w) - 0.5 * mu.dot(w) + (priors[c] > 0.0 ? std::log(priors[c]) : -INFINITY);
  }
  Prediction out;
  const double top = score.maxCoeff();
  out.probabilities = (score.array() - top).exp();
  out.probabilities /= out.probabilities.sum();
  out.label = 0;
  for (int c = 1; c < C; ++c) {
    if (out.probabilities[c] > out.probabilities[out.label]) out.label = c;
  }
  return out;
}

nlohmann::json LdaModel::to_json() const {
  auto matrix = [](const Eigen::MatrixXd& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["labels"] = labels;
  j["means"] = matrix(means);
  j["covariance"] = matrix(covariance);
  j["priors"] = std::vector<double>(priors.data(), priors.data() + priors.size());
  j["reg"] = reg;
  return j;
}

LdaModel LdaModel::from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != kFormatVersion) {
    throw DataError("unsupported classifier format version");
  }
  auto matrix = [](const nlohmann::json& rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd a(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != c) throw DataError("ragged matrix in classifier file");
      for (Eigen::Index k = 0; k < c; ++k) a(i, k) = rows[i][k].get<double>();
    }
    return a;
  };
  LdaModel m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.means = matrix(j.at("means"));
  m.covariance = matrix(j.at("covariance"));
  const auto priors = j.at("priors").get<std::vector<double>>();
  m.priors = Eigen::Map<const Eigen::VectorXd>(priors.data(), static_cast<Eigen::Index>(priors.size()));
  m.reg = j.at("reg").get<double>();
  if (static_cast<std::size_t>(m.means.rows()) != m.labels.size() ||
      m.priors.size() != m.means.rows() || m.covariance.rows() != m.means.cols() ||
      m.covariance.cols() != m.means.cols()) {
    throw DataError("inconsistent classifier dimensions");
  }
  return m;
}

void LdaModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write classifier file: " + path);
  out << to_json().dump(2) << '\n';
}

LdaModel LdaModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open classifier file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed classifier file: ") + e.what());
  }
  return from_json(j);
}

namespace {

struct ClassMoments {
  Eigen::MatrixXd means;
  Eigen::MatrixXd pooled;
  Eigen::VectorXd counts;
};

ClassMoments class_moments(const std::vector<LabeledFeatures>& data, int num_classes) {
  if (data.empty()) throw std::invalid_argument("no training examples");
  const auto dim = data.front().features.size();
  ClassMoments cm{Eigen::MatrixXd::Zero(num_classes, dim), Eigen::MatrixXd::Zero(dim, dim),
                  Eigen::VectorXd::Zero(num_classes)};
  for (const auto& d : data) {
    if (d.label < 0 || d.label >= num_classes) throw std::invalid_argument("label out of range");
    if (d.features.size() != dim) throw std::invalid_argument("feature dimensions differ");
    cm.means.row(d.label) += d.features.transpose();
    cm.counts[d.label] += 1.0;
  }
  for (int c = 0; c < num_classes; ++c) {
    if (cm.counts[c] > 0.0) cm.means.row(c) /= cm.counts[c];
  }
  for (const auto& d : data) {
    const Eigen::VectorXd r = d.features - cm.means.row(d.label).transpose();
    cm.pooled.noalias() += r * r.transpose();
  }
  const double dof = static_cast<double>(data.size()) - static_cast<double>((cm.counts.array() > 0).count());
  cm.pooled /= std::max(dof, 1.0);
  return cm;
}

}  // namespace

double default_lda_ridge(const std::vector<LabeledFeatures>& data, int num_classes) {
  const auto cm = class_moments(data, num_classes);
  return 1e-6 * cm.pooled.trace() / static_cast<double>(cm.pooled.rows());
}

LdaModel lda_train(const std::vector<LabeledFeatures>& data, const std::vector<std::string>& labels,
                   double reg) {
  const int C = static_cast<int>(labels.size());
  if (C < 2) throw std::invalid_argument("LDA needs at least two classes");
  const auto cm = class_moments(data, C);
  LdaModel m;
  m.labels = labels;
  m.means = cm.means;
  m.reg = reg < 0.0 ? 1e-6 * cm.pooled.trace() / static_cast<double>(cm.pooled.rows()) : reg;
  m.covariance = cm.pooled;
  m.covariance.diagonal().array() += m.reg;
  m.priors = cm.counts / static_cast<double>(data.size());
  const Eigen::LLT<Eigen::MatrixXd> llt(m.covariance);
  if (llt.info() != Eigen::Success || m.covariance.diagonal().minCoeff() <= 0.0) {
    throw NumericalError("LDA covariance is not positive definite after regularization");
  }
  return m;
}

LdaModel::Prediction lda_predict(const LdaModel& model, const SummaryStats& s) {
  return model.predict(s.as_vector());
}

double cross_validation_error(const std::vector<LabeledFeatures>& data,
                              const std::vector<std::string>& labels, int folds, std::uint64_t seed,
                              double reg) {
  if (folds < 2 || static_cast<std::size_t>(folds) > data.size()) {
    throw std::invalid_argument("fold count must lie in [2, number of examples]");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  long errors = 0;
  std::vector<LabeledFeatures> train;
  for (int f = 0; f < folds; ++f) {
    train.clear();
    for (std::size_t a = 0; a < order.size(); ++a) {
      if (static_cast<int>(a % folds) != f) train.push_back(data[order[a]]);
    }
    const auto model = lda_train(train, labels, reg);
    for (std::size_t a = f; a < order.size(); a += folds) {
      const auto& d = data[order[a]];
      if (model.predict(d.features).label != d.label) ++errors;
    }
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

std::vector<std::string> model_labels(bool directed) {
  std::vector<std::string> out;
  for (const auto& spec : directed ? directed_model_family() : undirected_model_family()) {
    out.push_back(spec.name());
  }
  return out;
}

std::vector<LabeledFeatures> simulate_training_set(const TrainingSetConfig& cfg) {
  const auto family = cfg.directed ? directed_model_family(cfg.p) : undirected_model_family(cfg.p);
  const long per = cfg.replicates;
  const long total = per * static_cast<long>(family.size());
  std::vector<LabeledFeatures> out(static_cast<std::size_t>(total));
  auto work = [&](long begin, long end) {
    for (long idx = begin; idx < end; ++idx) {
      const int c = static_cast<int>(idx / per);
      const long r = idx % per;
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(r)));
      TruthConfig tc;
      tc.n = cfg.n;
      tc.K = cfg.K;
      tc.spec = family[c];
      const auto truth = draw_truth(tc, rng);
      const auto m = simulate_multiplex(truth, tc.spec, rng);
      out[idx] = {summary_statistics(m).as_vector(), c};
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(std::max<long>(total, 1))));
  if (threads == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      const long begin = total * t / threads;
      const long end = total * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return out;
}

std::vector<int> SelectionResult::ranking() const {
  std::vector<int> idx(static_cast<std::size_t>(probabilities.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return probabilities[a] > probabilities[b]; });
  return idx;
}

namespace {

std::string cache_path(const std::string& dir, const Multiplex& m, const SelectOptions& o) {
  std::ostringstream name;
  name << "lda_" << (m.directed() ? "directed" : "undirected") << "_n" << m.n() << "_K" << m.K()
       << "_T" << o.replicates << "_p" << o.p << "_seed" << o.seed << ".json";
  return (std::filesystem::path(dir) / name.str()).string();
}

}  // namespace

SelectionResult heuristic_select(const Multiplex& m, const SelectOptions& options) {
  if (options.replicates < 10) throw std::invalid_argument("insufficient training replicates (need T >= 10)");
  const auto stats = summary_statistics(m);

  SelectionResult result;
  result.labels = model_labels(m.directed());
  std::string path;
  if (!options.cache_dir.empty()) {
    path = cache_path(options.cache_dir, m, options);
    if (std::filesystem::exists(path)) {
      const auto j = [&] {
        std::ifstream in(path);
        return nlohmann::json::parse(in);
      }();
      result.model = LdaModel::from_json(j.at("classifier"));
      result.cv_error = j.at("cv_error").get<double>();
      result.from_cache = true;
    }
  }
  if (!result.from_cache) {
    TrainingSetConfig cfg;
    cfg.n = m.n();
    cfg.K = m.K();
    cfg.p = options.p;
    cfg.directed = m.directed();
    cfg.replicates = options.replicates;
    cfg.seed = options.seed;
    cfg.threads = options.threads;
    const auto data = simulate_training_set(cfg);
    result.model = lda_train(data, result.labels);
    result.cv_error = cross_validation_error(data, result.labels, options.folds,
                                             derive_seed(options.seed, 0xCF));
    if (!path.empty()) {
      std::filesystem::create_directories(options.cache_dir);
      nlohmann::json j;
      j["classifier"] = result.model.to_json();
      j["cv_error"] = result.cv_error;
      j["n"] = m.n();
      j["K"] = m.K();
      j["T"] = options.replicates;
      j["seed"] = options.seed;
      std::ofstream out(path);
      if (!out) throw DataError("cannot write classifier cache: " + path);
      out << j.dump(2) << '\n';
    }
  }
  const auto pred = lda_predict(result.model, stats);
  result.probabilities = pred.probabilities;
  result.best = pred.label;
  return result;
}

}  // namespace lsm
