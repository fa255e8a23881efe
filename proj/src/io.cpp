#include "lsm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "csv.hpp"
#include "lsm/error.hpp"

namespace lsm {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd to_mat(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = r == 0 ? cols_if_empty : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd a(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != c) throw DataError("ragged matrix in JSON");
    for (Eigen::Index k = 0; k < c; ++k) a(i, k) = j[i][k].get<double>();
  }
  return a;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  return out;
}

}  // namespace

json to_json(const ModelSpec& spec) {
  return {{"name", spec.name()}, {"directed", spec.directed}, {"p", spec.p}, {"F", spec.F}};
}

ModelSpec model_spec_from_json(const json& j) {
  return ModelSpec::parse(j.at("name").get<std::string>(), j.at("directed").get<bool>(),
                          j.at("p").get<int>(), j.value("F", 0));
}

json to_json(const ParameterState& s) {
  return {{"alpha", vec(s.alpha)},
          {"beta", vec(s.beta)},
          {"theta", mat(s.theta)},
          {"gamma", mat(s.gamma)},
          {"z", mat(s.z)},
          {"lambda", vec(s.lambda)},
          {"mu_alpha", s.mu_alpha},
          {"mu_beta", s.mu_beta},
          {"sigma2_alpha", s.sigma2_alpha},
          {"sigma2_beta", s.sigma2_beta},
          {"mu_lambda", vec(s.mu_lambda)},
          {"sigma2_lambda", vec(s.sigma2_lambda)}};
}

ParameterState parameter_state_from_json(const json& j) {
  ParameterState s;
  s.alpha = to_vec(j.at("alpha"));
  s.beta = to_vec(j.at("beta"));
  const auto K = s.alpha.size();
  s.theta = to_mat(j.at("theta"), K);
  s.gamma = to_mat(j.at("gamma"), K);
  s.z = to_mat(j.at("z"));
  s.lambda = to_vec(j.value("lambda", json::array()));
  s.mu_alpha = j.at("mu_alpha").get<double>();
  s.mu_beta = j.at("mu_beta").get<double>();
  s.sigma2_alpha = j.at("sigma2_alpha").get<double>();
  s.sigma2_beta = j.at("sigma2_beta").get<double>();
  s.mu_lambda = to_vec(j.value("mu_lambda", json::array()));
  s.sigma2_lambda = to_vec(j.value("sigma2_lambda", json::array()));
  const auto n = s.z.rows();
  if (s.beta.size() != K || s.theta.rows() != n || s.gamma.rows() != n || s.theta.cols() != K ||
      s.gamma.cols() != K || s.mu_lambda.size() != s.lambda.size() ||
      s.sigma2_lambda.size() != s.lambda.size()) {
    throw DataError("inconsistent parameter dimensions in JSON state");
  }
  return s;
}

json to_json(const Hyperparameters& h) {
  return {{"m_alpha", h.m_alpha},       {"m_beta", h.m_beta},
          {"tau_alpha", h.tau_alpha},   {"tau_beta", h.tau_beta},
          {"nu_alpha", h.nu_alpha},     {"nu_beta", h.nu_beta},
          {"m_lambda", h.m_lambda},     {"tau_lambda", h.tau_lambda},
          {"nu_lambda", h.nu_lambda},   {"reference_alpha", h.reference_alpha},
          {"reference_beta", h.reference_beta}};
}

Hyperparameters hyperparameters_from_json(const json& j, Hyperparameters base) {
  const std::vector<std::pair<const char*, double*>> fields = {
      {"m_alpha", &base.m_alpha},       {"m_beta", &base.m_beta},
      {"tau_alpha", &base.tau_alpha},   {"tau_beta", &base.tau_beta},
      {"nu_alpha", &base.nu_alpha},     {"nu_beta", &base.nu_beta},
      {"m_lambda", &base.m_lambda},     {"tau_lambda", &base.tau_lambda},
      {"nu_lambda", &base.nu_lambda},   {"reference_alpha", &base.reference_alpha},
      {"reference_beta", &base.reference_beta}};
  for (const auto& [key, target] : fields) {
    if (j.contains(key)) *target = j.at(key).get<double>();
  }
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(fields.begin(), fields.end(),
                                   [&](const auto& f) { return key == f.first; });
    if (!known) throw DataError("unknown hyperparameter: " + key);
  }
  return base;
}

json to_json(const McmcConfig& c) {
  return {{"iterations", c.iterations},
          {"burn_in", c.burn_in},
          {"thin", c.thin},
          {"seed", c.seed},
          {"procrustes_tolerance", c.procrustes_tolerance},
          {"store_latent", c.store_latent},
          {"update",
           {{"nuisance", c.update.nuisance},
            {"alpha", c.update.alpha},
            {"beta", c.update.beta},
            {"latent", c.update.latent},
            {"effects", c.update.effects},
            {"lambda", c.update.lambda}}}};
}

McmcConfig mcmc_config_from_json(const json& j) {
  McmcConfig c;
  c.iterations = j.at("iterations").get<long>();
  c.burn_in = j.at("burn_in").get<long>();
  c.thin = j.at("thin").get<long>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.procrustes_tolerance = j.value("procrustes_tolerance", c.procrustes_tolerance);
  c.store_latent = j.value("store_latent", false);
  if (j.contains("update")) {
    const auto& u = j.at("update");
    c.update.nuisance = u.value("nuisance", true);
    c.update.alpha = u.value("alpha", true);
    c.update.beta = u.value("beta", true);
    c.update.latent = u.value("latent", true);
    c.update.effects = u.value("effects", true);
    c.update.lambda = u.value("lambda", true);
  }
  return c;
}

json to_json(const References& r) {
  return {{"view", r.view}, {"sender_node", r.sender_node}, {"receiver_node", r.receiver_node}};
}

References references_from_json(const json& j) {
  References r;
  r.view = j.at("view").get<int>();
  r.sender_node = j.at("sender_node").get<std::vector<int>>();
  r.receiver_node = j.at("receiver_node").get<std::vector<int>>();
  return r;
}

json to_json(const InitReport& r) {
  return {{"z0", mat(r.z0)},
          {"alpha0", vec(r.alpha0)},
          {"beta0", vec(r.beta0)},
          {"references", to_json(r.references)},
          {"disconnected_pairs", r.disconnected_pairs},
          {"warnings", r.warnings}};
}

json to_json(const AcceptanceRates& a) {
  auto one = [](const AcceptanceCounter& c) {
    return json{{"proposed", c.proposed}, {"accepted", c.accepted}, {"rate", c.rate()}};
  };
  return {{"alpha_beta", one(a.alpha_beta)},
          {"latent", one(a.latent)},
          {"sender", one(a.sender)},
          {"receiver", one(a.receiver)},
          {"lambda", one(a.lambda)}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open JSON file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_chain_csv(const ChainOutput& chain, const std::string& path) {
  auto out = open_out(path);
  out << "sweep";
  for (const auto& c : chain.layout.columns) out << ',' << c;
  out << '\n';
  for (long r = 0; r < chain.stored(); ++r) {
    out << chain.sweeps[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < chain.samples.cols(); ++c) out << ',' << fmt(chain.samples(r, c));
    out << '\n';
  }
}

json chain_manifest(const ChainOutput& chain) {
  return {{"spec", to_json(chain.layout.spec)},
          {"n", chain.layout.n},
          {"K", chain.layout.K},
          {"with_latent", chain.layout.with_latent},
          {"config", to_json(chain.config)},
          {"references", to_json(chain.references)},
          {"acceptance", to_json(chain.acceptance)},
          {"procrustes_discards", chain.procrustes_discards},
          {"stored", chain.stored()},
          {"z_mean", mat(chain.z_mean)},
          {"final_state", to_json(chain.final_state)}};
}

ChainOutput read_chain(const std::string& csv_path, const json& manifest) {
  ChainOutput chain;
  try {
    const auto spec = model_spec_from_json(manifest.at("spec"));
    chain.layout = ParameterLayout::make(spec, manifest.at("n").get<int>(), manifest.at("K").get<int>(),
                                         manifest.at("with_latent").get<bool>());
    chain.config = mcmc_config_from_json(manifest.at("config"));
    chain.references = references_from_json(manifest.at("references"));
    chain.procrustes_discards = manifest.value("procrustes_discards", 0L);
    chain.z_mean = to_mat(manifest.at("z_mean"));
    chain.final_state = parameter_state_from_json(manifest.at("final_state"));
    const auto& acc = manifest.at("acceptance");
    auto counter = [&](const char* key, AcceptanceCounter& c) {
      c.proposed = acc.at(key).at("proposed").get<long>();
      c.accepted = acc.at(key).at("accepted").get<long>();
    };
    counter("alpha_beta", chain.acceptance.alpha_beta);
    counter("latent", chain.acceptance.latent);
    counter("sender", chain.acceptance.sender);
    counter("receiver", chain.acceptance.receiver);
    counter("lambda", chain.acceptance.lambda);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed chain manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed chain manifest: ") + e.what());
  }

  const auto lines = detail::read_lines(csv_path);
  if (lines.empty()) throw DataError("empty chain file: " + csv_path);
  const auto header = detail::split_csv_line(lines[0]);
  const auto& cols = chain.layout.columns;
  if (header.size() != cols.size() + 1 || header[0] != "sweep" ||
      !std::equal(cols.begin(), cols.end(), header.begin() + 1)) {
    throw DataError("chain columns do not match the manifest");
  }
  chain.samples.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = detail::split_csv_line(lines[r]);
    if (fields.size() != header.size()) throw DataError("ragged row in chain file");
    double sweep = 0.0;
    if (!detail::parse_double(fields[0], sweep)) throw DataError("non-numeric sweep in chain file");
    chain.sweeps.push_back(static_cast<long>(sweep));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(fields[c], v)) throw DataError("non-numeric value in chain file");
      chain.samples(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = v;
    }
  }
  return chain;
}

void write_trace_long_csv(const ChainOutput& chain, const std::string& path) {
  auto out = open_out(path);
  out << "sweep,parameter,value\n";
  for (long r = 0; r < chain.stored(); ++r) {
    for (std::size_t c = 0; c < chain.layout.columns.size(); ++c) {
      out << chain.sweeps[static_cast<std::size_t>(r)] << ',' << chain.layout.columns[c] << ','
          << fmt(chain.samples(r, static_cast<Eigen::Index>(c))) << '\n';
    }
  }
}

void write_latent_long_csv(const Eigen::MatrixXd& z, const std::vector<std::string>& labels,
                           const std::string& path) {
  auto out = open_out(path);
  out << "node,label,dim,value\n";
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const std::string label = static_cast<std::size_t>(i) < labels.size() ? labels[i] : std::to_string(i + 1);
    for (Eigen::Index d = 0; d < z.cols(); ++d) {
      out << i + 1 << ',' << label << ',' << d + 1 << ',' << fmt(z(i, d)) << '\n';
    }
  }
}

void write_summaries_csv(const std::vector<ParameterSummary>& s, const std::string& path) {
  auto out = open_out(path);
  out << "parameter,mean,sd,q025,q975\n";
  for (const auto& p : s) {
    out << p.name << ',' << fmt(p.mean) << ',' << (p.sd ? fmt(*p.sd) : "NA") << ',' << fmt(p.q025)
        << ',' << fmt(p.q975) << '\n';
  }
}

json to_json(const std::vector<ParameterSummary>& s) {
  json out = json::array();
  for (const auto& p : s) {
    json row = {{"parameter", p.name}, {"mean", p.mean}, {"q025", p.q025}, {"q975", p.q975}};
    row["sd"] = p.sd ? json(*p.sd) : json(nullptr);
    out.push_back(row);
  }
  return out;
}

void write_recovery_csv(const RecoveryReport& r, const std::string& path) {
  auto out = open_out(path);
  out << "view,dcor_probability,spearman_sender,spearman_receiver,procrustes\n";
  for (const auto& v : r.views) {
    out << v.view + 1 << ',' << fmt(v.dcor_probability) << ','
        << (v.spearman_sender ? fmt(*v.spearman_sender) : "NA") << ','
        << (v.spearman_receiver ? fmt(*v.spearman_receiver) : "NA") << ',' << fmt(r.procrustes) << '\n';
  }
}

Eigen::MatrixXd read_coordinates(const std::string& path, const std::vector<std::string>& labels) {
  auto lines = detail::read_lines(path);
  if (lines.empty()) throw DataError("empty coordinate file: " + path);
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : lines) rows.push_back(detail::split_csv_line(line));
  double probe = 0.0;
  if (rows[0].size() >= 2 && !detail::parse_double(rows[0][1], probe)) rows.erase(rows.begin());
  if (rows.empty()) throw DataError("coordinate file has no data rows");

  const bool labelled = !detail::parse_double(rows[0][0], probe);
  const std::size_t width = rows[0].size() - (labelled ? 1 : 0);
  if (width == 0) throw DataError("coordinate rows carry no values");
  if (rows.size() != labels.size()) {
    throw DataError("coordinate file has " + std::to_string(rows.size()) + " rows but the network has " +
                    std::to_string(labels.size()) + " nodes");
  }
  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  std::vector<bool> seen(rows.size(), false);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != width + (labelled ? 1 : 0)) throw DataError("ragged coordinate file");
    std::size_t target = r;
    if (labelled) {
      const auto it = std::find(labels.begin(), labels.end(), f[0]);
      if (it == labels.end()) throw DataError("unknown node label in coordinates: " + f[0]);
      target = static_cast<std::size_t>(it - labels.begin());
      if (seen[target]) throw DataError("duplicate node label in coordinates: " + f[0]);
      seen[target] = true;
    }
    for (std::size_t d = 0; d < width; ++d) {
      double v = 0.0;
      if (!detail::parse_double(f[d + (labelled ? 1 : 0)], v)) throw DataError("non-numeric coordinate");
      z(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(d)) = v;
    }
  }
  return z;
}

}  // namespace lsm
