#pragma once

#include <cstdint>
#include <vector>

#include "hiresim/metrics.hpp"
#include "hiresim/policies.hpp"
#include "hiresim/subsidy.hpp"

namespace hiresim {

struct EngineOptions {
  bool check_coverage = false;  // test ellipsoid membership after every update
  bool record_min_eig = false;  // store per-group min-eigenvalue series
  bool warmstart_cost = false;  // price forced hires against the best estimate
};

RadiusParams radius_params_from(const MarketConfig& cfg);

// Rejects subsidy rules that do not match the policy that produced the
// decisions they would implement.
void validate_pairing(const PolicySpec& pol, SubsidyRule sub);

RunTrace run_single(const MarketConfig& cfg, const PolicySpec& pol, SubsidyRule sub,
                    std::uint32_t run_index, const EngineOptions& opt = {});

// Runs indices 0..runs-1; the result is independent of `workers`.
std::vector<RunTrace> run_traces(const MarketConfig& cfg, const PolicySpec& pol,
                                 SubsidyRule sub, long runs, int workers,
                                 const EngineOptions& opt = {});

AggregateStats run_batch(const MarketConfig& cfg, const PolicySpec& pol,
                         SubsidyRule sub, long runs, int workers,
                         const EngineOptions& opt = {});

}  // namespace hiresim
