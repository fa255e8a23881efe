#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsm/init.hpp"
#include "lsm/metrics.hpp"
#include "lsm/model.hpp"
#include "lsm/sampler.hpp"

namespace lsm {

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ParameterState& s);
ParameterState parameter_state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Hyperparameters& h);
/// Fields missing from j keep the values in `base`.
Hyperparameters hyperparameters_from_json(const nlohmann::json& j, Hyperparameters base);

nlohmann::json to_json(const McmcConfig& c);
McmcConfig mcmc_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const References& r);
References references_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InitReport& r);
nlohmann::json to_json(const AcceptanceRates& a);

nlohmann::json read_json(const std::string& path);
void write_json(const nlohmann::json& j, const std::string& path);

/// Wide CSV: a "sweep" column then one column per layout entry.
void write_chain_csv(const ChainOutput& chain, const std::string& path);

/// Rebuilds a chain from its CSV and the JSON manifest written next to it.
ChainOutput read_chain(const std::string& csv_path, const nlohmann::json& manifest);

/// Manifest fields describing a chain: spec, sizes, config, references,
/// acceptance rates, z_mean and final state.
nlohmann::json chain_manifest(const ChainOutput& chain);

/// Long format (sweep, parameter, value) for plotting.
void write_trace_long_csv(const ChainOutput& chain, const std::string& path);
/// Long format (node, label, dim, value) of the posterior-mean positions.
void write_latent_long_csv(const Eigen::MatrixXd& z, const std::vector<std::string>& labels,
                           const std::string& path);

void write_summaries_csv(const std::vector<ParameterSummary>& s, const std::string& path);
nlohmann::json to_json(const std::vector<ParameterSummary>& s);

void write_recovery_csv(const RecoveryReport& r, const std::string& path);

/// Reads an n x p coordinate table. Rows are either "label,c1,..,cp" or
/// numeric only; a header row is skipped when its second field is not numeric.
Eigen::MatrixXd read_coordinates(const std::string& path, const std::vector<std::string>& labels);

}  // namespace lsm
