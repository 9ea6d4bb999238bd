#pragma once

#include <string>
#include <vector>

#include "hiresim/config_json.hpp"
#include "hiresim/engine.hpp"
#include "hiresim/results.hpp"

namespace hiresim {

struct PolicyChoice {
  PolicySpec policy;
  SubsidyRule subsidy = SubsidyRule::None;
  std::string label;
  bool swept = true;  // runs once per sweep value (if the preset sweeps)
  EngineOptions options;
};

struct ExperimentPreset {
  std::string name;
  std::string description;
  MarketConfig base;
  long runs = 4000;
  std::string sweep_field;  // "", "k1", "sigma_eta_sq", "n0_total"
  std::vector<double> sweep_values;
  std::vector<PolicyChoice> policies;
  std::vector<std::string> outputs;  // table kinds to emit
  int pu_group = 1;                  // group whose shutout frequency is reported
};

const std::vector<ExperimentPreset>& all_presets();
const ExperimentPreset& preset(const std::string& name);  // ConfigError if unknown

MarketConfig sweep_config(const ExperimentPreset& pr, double value);
PolicySpec sweep_policy(const ExperimentPreset& pr, const PolicyChoice& pc, double value);

ResultsBundle run_preset(const ExperimentPreset& pr, long runs_override, int workers);

// Output bundle for a single ad-hoc (config, policy, subsidy) batch: every
// recorded series, per-group shutout frequencies, and the scalar totals.
ResultsBundle bundle_single(const SimConfig& sc, const AggregateStats& stats);

}  // namespace hiresim
