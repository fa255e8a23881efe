// Command-line front end: simulate, select, fit, metrics.
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lsm/error.hpp"
#include "lsm/io.hpp"
#include "lsm/metrics.hpp"
#include "lsm/model_select.hpp"
#include "lsm/sampler.hpp"
#include "lsm/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct DataArgs {
  std::string path;
  std::string format = "edgelist";
  bool undirected = false;
  std::string nodes;
};

void add_data_options(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--data", d.path, "multiplex CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", d.format, "edgelist | adjacency")->check(CLI::IsMember({"edgelist", "adjacency"}));
  cmd->add_flag("--undirected", d.undirected, "treat views as undirected");
  cmd->add_option("--nodes", d.nodes, "file with one node label per line")->check(CLI::ExistingFile);
}

lsm::Multiplex load(const DataArgs& d) {
  lsm::LoadOptions opt;
  opt.format = lsm::parse_file_format(d.format);
  opt.directed = !d.undirected;
  if (!d.nodes.empty()) opt.node_labels = lsm::read_node_labels(d.nodes);
  return lsm::load_multiplex(d.path, opt);
}

json base_manifest(const std::string& command, const CLI::App& app) {
  json flags = json::object();
  for (const auto* opt : app.get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto values = opt->results();
    flags[opt->get_name()] = values.size() == 1 ? json(values[0]) : json(values);
  }
  return {{"command", command}, {"version", kVersion}, {"flags", flags}};
}

fs::path prepare_dir(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

lsm::ProbabilityMode parse_mode(const std::string& s) {
  return s == "posterior-mean" ? lsm::ProbabilityMode::PosteriorMean : lsm::ProbabilityMode::PlugIn;
}

void print_recovery(const lsm::RecoveryReport& r) {
  std::cout << "view  dcor_probability  spearman_sender  spearman_receiver\n";
  for (const auto& v : r.views) {
    std::cout << std::setw(4) << v.view + 1 << "  " << std::setw(16) << v.dcor_probability << "  "
              << std::setw(15) << (v.spearman_sender ? std::to_string(*v.spearman_sender) : "NA") << "  "
              << std::setw(17) << (v.spearman_receiver ? std::to_string(*v.spearman_receiver) : "NA") << '\n';
  }
  std::cout << "procrustes " << r.procrustes << '\n';
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  int n = 50;
  int K = 5;
  std::string model = "NN";
  int p = 2;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool undirected = false;
  double missing_rate = 0.0;
  std::string format = "edgelist";
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& app) {
  lsm::TruthConfig cfg;
  cfg.n = a.n;
  cfg.K = a.K;
  cfg.spec = lsm::ModelSpec::parse(a.model, !a.undirected, a.p);
  cfg.missing_rate = a.missing_rate;
  cfg.validate();
  lsm::Rng rng(a.seed);
  const auto truth = lsm::draw_truth(cfg, rng);
  const auto m = lsm::simulate_multiplex(truth, cfg.spec, rng, a.missing_rate);

  const auto dir = prepare_dir(a.out_dir);
  const auto data_path = dir / "multiplex.csv";
  if (a.format == "adjacency") {
    lsm::write_adjacency_csv(m, data_path.string());
  } else {
    lsm::write_edgelist_csv(m, data_path.string());
  }
  json truth_json = {{"spec", lsm::to_json(cfg.spec)},
                     {"state", lsm::to_json(truth)},
                     {"generator",
                      {{"reference_alpha", cfg.reference_alpha},
                       {"reference_beta", cfg.reference_beta},
                       {"alpha_mean", cfg.alpha_mean},
                       {"alpha_sd", cfg.alpha_sd},
                       {"beta_mean", cfg.beta_mean},
                       {"beta_sd", cfg.beta_sd},
                       {"missing_rate", cfg.missing_rate}}}};
  lsm::write_json(truth_json, (dir / "truth.json").string());
  auto manifest = base_manifest("simulate", app);
  manifest["seed"] = a.seed;
  manifest["outputs"] = {"multiplex.csv", "truth.json"};
  lsm::write_json(manifest, (dir / "manifest.json").string());
  std::cout << "wrote " << data_path.string() << " (" << m.n() << " nodes, " << m.K() << " views)\n";
  return 0;
}

// --- select ---------------------------------------------------------------

struct SelectArgs {
  DataArgs data;
  long T = 5000;
  std::uint64_t seed = 1;
  int threads = 1;
  int folds = 10;
  int p = 2;
  std::string cache_dir;
  std::string out;
};

int cmd_select(const SelectArgs& a, const CLI::App& app) {
  const auto m = load(a.data);
  lsm::SelectOptions opt;
  opt.replicates = a.T;
  opt.seed = a.seed;
  opt.threads = a.threads;
  opt.folds = a.folds;
  opt.p = a.p;
  opt.cache_dir = a.cache_dir;
  const auto r = lsm::heuristic_select(m, opt);

  std::cout << "rank  model  probability\n";
  int rank = 1;
  for (int c : r.ranking()) {
    std::cout << std::setw(4) << rank++ << "  " << std::setw(5) << r.labels[c] << "  " << std::fixed
              << std::setprecision(6) << r.probabilities[c] << '\n';
  }
  std::cout << "selected " << r.labels[r.best] << "\ncv_error " << r.cv_error << '\n';

  json out = base_manifest("select", app);
  out["seed"] = a.seed;
  out["selected"] = r.labels[r.best];
  out["cv_error"] = r.cv_error;
  out["from_cache"] = r.from_cache;
  json probs = json::object();
  for (std::size_t c = 0; c < r.labels.size(); ++c) probs[r.labels[c]] = r.probabilities[static_cast<Eigen::Index>(c)];
  out["probabilities"] = probs;
  const auto stats = lsm::summary_statistics(m);
  out["summary_statistics"] = {{"mean_cs_k", stats.mean_cs_k}, {"mean_cr_k", stats.mean_cr_k},
                               {"mean_cs_i", stats.mean_cs_i}, {"mean_cr_i", stats.mean_cr_i},
                               {"sd_cs_k", stats.sd_cs_k},     {"sd_cr_k", stats.sd_cr_k},
                               {"sd_cs_i", stats.sd_cs_i},     {"sd_cr_i", stats.sd_cr_i}};
  if (!a.out.empty()) lsm::write_json(out, a.out);
  std::cout << out.dump() << '\n';
  return 0;
}

// --- fit ------------------------------------------------------------------

struct FitArgs {
  DataArgs data;
  std::string model;
  long iterations = 60000;
  long burn_in = 15000;
  long thin = 10;
  std::uint64_t seed = 1;
  int p = 2;
  std::string covariates;
  std::string hyper;
  std::string truth;
  std::string out_dir = ".";
  bool store_latent = false;
  bool dump_init = false;
  std::string prob_mode = "plug-in";
};

int cmd_fit(const FitArgs& a, const CLI::App& app) {
  auto m = load(a.data);
  if (!a.covariates.empty()) lsm::load_covariates(m, a.covariates);
  const auto spec = lsm::ModelSpec::parse(a.model, m.directed(), a.p, m.F());
  auto hyper = lsm::Hyperparameters::defaults_for(m.K());
  if (!a.hyper.empty()) hyper = lsm::hyperparameters_from_json(lsm::read_json(a.hyper), hyper);
  hyper.validate();

  lsm::McmcConfig cfg;
  cfg.iterations = a.iterations;
  cfg.burn_in = a.burn_in;
  cfg.thin = a.thin;
  cfg.seed = a.seed;
  cfg.store_latent = a.store_latent;
  cfg.validate();

  const auto dir = prepare_dir(a.out_dir);
  lsm::InitReport init = lsm::initialize(m, spec);
  if (a.dump_init) lsm::write_json(lsm::to_json(init), (dir / "init.json").string());
  for (const auto& w : init.warnings) std::cerr << "warning: " << w << '\n';
  const auto start = lsm::initial_state(m, spec, hyper, init);
  const auto chain = lsm::run_chain(m, spec, hyper, cfg, init.references, start);

  lsm::write_chain_csv(chain, (dir / "chain.csv").string());
  lsm::write_trace_long_csv(chain, (dir / "trace_long.csv").string());
  json outputs = {"chain.csv", "trace_long.csv", "manifest.json"};
  if (chain.stored() > 0) {
    const auto summaries = lsm::posterior_summaries(chain);
    lsm::write_summaries_csv(summaries, (dir / "summaries.csv").string());
    lsm::write_json(lsm::to_json(summaries), (dir / "summaries.json").string());
    lsm::write_latent_long_csv(chain.z_mean, m.node_labels, (dir / "latent.csv").string());
    outputs.insert(outputs.end(), {"summaries.csv", "summaries.json", "latent.csv"});
  }

  auto manifest = base_manifest("fit", app);
  manifest["seed"] = a.seed;
  manifest["hyperparameters"] = lsm::to_json(hyper);
  manifest["warnings"] = init.warnings;
  manifest["disconnected_pairs"] = init.disconnected_pairs;
  manifest["node_labels"] = m.node_labels;
  manifest["chain"] = lsm::chain_manifest(chain);

  if (!a.truth.empty() && chain.stored() > 0) {
    const auto truth = lsm::parameter_state_from_json(lsm::read_json(a.truth).at("state"));
    const auto report = lsm::recovery_report(truth, chain, m, parse_mode(a.prob_mode));
    lsm::write_recovery_csv(report, (dir / "recovery.csv").string());
    lsm::write_json(report.to_json(), (dir / "recovery.json").string());
    outputs.insert(outputs.end(), {"recovery.csv", "recovery.json"});
    print_recovery(report);
  }
  manifest["outputs"] = outputs;
  lsm::write_json(manifest, (dir / "manifest.json").string());

  const auto& acc = chain.acceptance;
  std::cout << "model " << spec.name() << ", " << chain.stored() << " stored sweeps\n"
            << "acceptance alpha/beta " << acc.alpha_beta.rate() << ", latent " << acc.latent.rate()
            << ", sender " << acc.sender.rate() << ", receiver " << acc.receiver.rate() << '\n';
  return 0;
}

// --- metrics --------------------------------------------------------------

struct MetricsArgs {
  std::string chain;
  std::string manifest;
  DataArgs data;
  std::string truth;
  std::string coords;
  std::string out_dir = ".";
  std::string prob_mode = "plug-in";
};

int cmd_metrics(const MetricsArgs& a, const CLI::App& app) {
  const std::string manifest_path =
      a.manifest.empty() ? (fs::path(a.chain).parent_path() / "manifest.json").string() : a.manifest;
  const auto fit_manifest = lsm::read_json(manifest_path);
  const json& chain_json = fit_manifest.contains("chain") ? fit_manifest.at("chain") : fit_manifest;
  const auto chain = lsm::read_chain(a.chain, chain_json);
  const auto m = load(a.data);
  if (m.n() != chain.layout.n || m.K() != chain.layout.K) {
    throw lsm::DataError("data dimensions do not match the chain");
  }

  const auto dir = prepare_dir(a.out_dir);
  json out = base_manifest("metrics", app);
  const auto summaries = lsm::posterior_summaries(chain);
  lsm::write_summaries_csv(summaries, (dir / "summaries.csv").string());
  out["summaries"] = lsm::to_json(summaries);
  if (!a.truth.empty()) {
    const auto truth = lsm::parameter_state_from_json(lsm::read_json(a.truth).at("state"));
    const auto report = lsm::recovery_report(truth, chain, m, parse_mode(a.prob_mode));
    lsm::write_recovery_csv(report, (dir / "recovery.csv").string());
    out["recovery"] = report.to_json();
    print_recovery(report);
  }
  if (!a.coords.empty()) {
    const auto coords = lsm::read_coordinates(a.coords, m.node_labels);
    if (coords.rows() != chain.z_mean.rows()) throw lsm::DataError("coordinate count does not match the chain");
    const Eigen::MatrixXd z = chain.z_mean;
    // Coordinates of a different dimension are compared after zero padding.
    const auto cols = std::max(z.cols(), coords.cols());
    Eigen::MatrixXd a_pad = Eigen::MatrixXd::Zero(z.rows(), cols);
    Eigen::MatrixXd b_pad = Eigen::MatrixXd::Zero(z.rows(), cols);
    a_pad.leftCols(z.cols()) = z;
    b_pad.leftCols(coords.cols()) = coords;
    const double r = lsm::procrustes_correlation(a_pad, b_pad);
    out["procrustes_coords"] = r;
    std::cout << "procrustes_coords " << r << '\n';
  }
  lsm::write_json(out, (dir / "metrics.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent space models for multiplex networks with sender and receiver effects"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a multiplex and its truth");
  simulate->add_option("--n", sim.n, "number of nodes")->check(CLI::PositiveNumber);
  simulate->add_option("--K", sim.K, "number of views")->check(CLI::PositiveNumber);
  simulate->add_option("--model", sim.model, "NN..VV, or N/C/V when undirected");
  simulate->add_option("--p", sim.p, "latent dimension")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out-dir", sim.out_dir, "output directory");
  simulate->add_flag("--undirected", sim.undirected, "simulate undirected views");
  simulate->add_option("--missing-rate", sim.missing_rate, "share of cells marked missing");
  simulate->add_option("--format", sim.format, "edgelist | adjacency")->check(CLI::IsMember({"edgelist", "adjacency"}));

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "heuristic model selection");
  add_data_options(select, sel.data);
  select->add_option("--T", sel.T, "training replicates per model");
  select->add_option("--seed", sel.seed, "random seed");
  select->add_option("--threads", sel.threads, "worker threads")->check(CLI::PositiveNumber);
  select->add_option("--folds", sel.folds, "cross-validation folds");
  select->add_option("--p", sel.p, "latent dimension of the training models")->check(CLI::PositiveNumber);
  select->add_option("--cache-dir", sel.cache_dir, "classifier cache directory");
  select->add_option("--out", sel.out, "write the JSON report here");

  FitArgs fa;
  auto* fitcmd = app.add_subcommand("fit", "run the MCMC sampler");
  add_data_options(fitcmd, fa.data);
  fitcmd->add_option("--model", fa.model, "NN..VV, or N/C/V when undirected")->required();
  fitcmd->add_option("--iterations", fa.iterations, "total sweeps");
  fitcmd->add_option("--burn-in", fa.burn_in, "discarded sweeps");
  fitcmd->add_option("--thin", fa.thin, "store every thin-th sweep");
  fitcmd->add_option("--seed", fa.seed, "random seed");
  fitcmd->add_option("--p", fa.p, "latent dimension")->check(CLI::PositiveNumber);
  fitcmd->add_option("--covariates", fa.covariates, "edge covariates CSV")->check(CLI::ExistingFile);
  fitcmd->add_option("--hyper", fa.hyper, "hyperparameter JSON")->check(CLI::ExistingFile);
  fitcmd->add_option("--truth", fa.truth, "truth JSON from simulate")->check(CLI::ExistingFile);
  fitcmd->add_option("--out-dir", fa.out_dir, "output directory");
  fitcmd->add_flag("--store-latent", fa.store_latent, "store latent positions in the chain");
  fitcmd->add_flag("--dump-init", fa.dump_init, "write the initialization report");
  fitcmd->add_option("--prob-mode", fa.prob_mode, "plug-in | posterior-mean")
      ->check(CLI::IsMember({"plug-in", "posterior-mean"}));
  int fit_threads = 1;
  fitcmd->add_option("--threads", fit_threads, "worker threads (a chain is sequential)");

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "evaluate a stored chain");
  metrics->add_option("--chain", ma.chain, "chain CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--manifest", ma.manifest, "fit manifest (default: next to the chain)");
  add_data_options(metrics, ma.data);
  metrics->add_option("--truth", ma.truth, "truth JSON")->check(CLI::ExistingFile);
  metrics->add_option("--coords", ma.coords, "reference coordinates CSV")->check(CLI::ExistingFile);
  metrics->add_option("--out-dir", ma.out_dir, "output directory");
  metrics->add_option("--prob-mode", ma.prob_mode, "plug-in | posterior-mean")
      ->check(CLI::IsMember({"plug-in", "posterior-mean"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(sim, *simulate);
    if (*select) return cmd_select(sel, *select);
    if (*fitcmd) return cmd_fit(fa, *fitcmd);
    if (*metrics) return cmd_metrics(ma, *metrics);
  } catch (const lsm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const lsm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
