#pragma once

#include <string>

#include <json.hpp>

#include "hiresim/policies.hpp"
#include "hiresim/subsidy.hpp"

namespace hiresim {

// The stock two-group market: ten majority / two minority candidates per
// round, d = 1, mu_x = 3, sigma_x = 2, theta = 1, sigma_eps = 2, lambda = 1,
// delta = 0.1, N = 1000, forced sampling n0_g equal to the arrival counts.
MarketConfig default_market_config();

struct SimConfig {
  MarketConfig market;
  PolicySpec policy;
  SubsidyRule subsidy = SubsidyRule::None;
  long runs = 4000;
};

// Strict JSON parsing: unknown fields, wrong types and out-of-range values
// raise ConfigError with the offending field path.  Absent fields fall back
// to the defaults above.
SimConfig parse_config_text(const std::string& text);
SimConfig parse_config_file(const std::string& path);

nlohmann::json to_json(const MarketConfig& cfg);
nlohmann::json to_json(const SimConfig& cfg);

PolicySpec parse_policy(const std::string& s);   // e.g. "hybrid:0.5", "rooney_then_lf:100"
SubsidyRule parse_subsidy(const std::string& s);

std::string radius_label(RadiusVariant v);
RadiusVariant parse_radius(const std::string& s);

// FNV-1a over the canonical serialization; 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace hiresim
