#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hiresim/rng.hpp"
#include "hiresim/types.hpp"

namespace hiresim {

// Configuration / input errors carry the offending field path in the message,
// e.g. "groups[1].sigma_x must be >= 0".
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& problem)
      : std::runtime_error(field + " " + problem), field_path(field) {}
  std::string field_path;
};

struct GroupSpec {
  std::string label;
  int count = 1;        // candidates arriving per round
  VecXd mu_x;           // mean of the characteristic vector
  double sigma_x = 1.0; // isotropic std dev of the characteristic vector
  VecXd theta;          // true coefficients mapping x to expected skill
  int n0 = 0;           // forced hires in the initial sampling phase
};

struct MarketConfig {
  int d = 1;
  std::vector<GroupSpec> groups;
  double sigma_eps = 2.0;  // skill noise
  double sigma_eta = 0.0;  // interview signal noise (two-stage only)
  int horizon = 1000;      // total rounds N, counting the initial phase
  double lambda_reg = 1.0;
  double delta = 0.1;
  double s_bound = -1.0;   // bound on ||theta_g||; negative = derive from theta
  double a_hybrid = 1.0;
  int k_finalists = 2;
  std::uint64_t seed = 0;
  RadiusVariant radius_variant = RadiusVariant::DetBased;

  int total_candidates() const {
    int k = 0;
    for (const auto& g : groups) k += g.count;
    return k;
  }

  int initial_rounds() const {
    int n = 0;
    for (const auto& g : groups) n += g.n0;
    return n;
  }

  double skill_bound() const {
    if (s_bound >= 0.0) return s_bound;
    double s = 0.0;
    for (const auto& g : groups) s = std::max(s, g.theta.norm());
    return s;
  }
};

inline void validate(const MarketConfig& cfg) {
  if (cfg.d < 1) throw ConfigError("d", "must be >= 1");
  if (cfg.groups.empty()) throw ConfigError("groups", "must be non-empty");
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
    const auto& gs = cfg.groups[g];
    const std::string p = "groups[" + std::to_string(g) + "].";
    if (gs.count < 1) throw ConfigError(p + "count", "must be >= 1");
    if (gs.n0 < 0) throw ConfigError(p + "n0", "must be >= 0");
    if (gs.sigma_x < 0) throw ConfigError(p + "sigma_x", "must be >= 0");
    if (gs.mu_x.size() != cfg.d)
      throw ConfigError(p + "mu_x", "must have length d = " + std::to_string(cfg.d));
    if (gs.theta.size() != cfg.d)
      throw ConfigError(p + "theta", "must have length d = " + std::to_string(cfg.d));
  }
  if (cfg.sigma_eps < 0) throw ConfigError("sigma_eps", "must be >= 0");
  if (cfg.sigma_eta < 0) throw ConfigError("sigma_eta", "must be >= 0");
  if (cfg.horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (cfg.horizon < cfg.initial_rounds())
    throw ConfigError("horizon", "must be >= the total initial sampling rounds");
  if (!(cfg.lambda_reg > 0)) throw ConfigError("lambda_reg", "must be > 0");
  if (!(cfg.delta > 0 && cfg.delta < 1)) throw ConfigError("delta", "must lie in (0,1)");
  if (cfg.a_hybrid < 0) throw ConfigError("a_hybrid", "must be >= 0");
  if (cfg.k_finalists < 1) throw ConfigError("k_finalists", "must be >= 1");
  if (cfg.k_finalists > cfg.total_candidates())
    throw ConfigError("k_finalists", "must be <= the candidates per round");
}

struct Candidate {
  int group = 0;
  VecXd x;
  double q_true = 0.0;  // x . theta_group
  double eps = 0.0;
  double eta = 0.0;
};

// Slot of a group's first candidate in the per-round ordering (candidates are
// laid out group by group).
inline int group_slot_offset(const MarketConfig& cfg, int group) {
  int off = 0;
  for (int g = 0; g < group; ++g) off += cfg.groups[g].count;
  return off;
}

inline void draw_candidate_into(const MarketConfig& cfg, const NormalStream& rng,
                                std::uint32_t round, int group, std::uint32_t slot,
                                Candidate& out) {
  const GroupSpec& gs = cfg.groups[group];
  out.group = group;
  out.x.resize(cfg.d);
  for (int j = 0; j < cfg.d; ++j)
    out.x[j] = gs.mu_x[j] + gs.sigma_x * rng.normal(round, slot, Draw::Characteristic, j);
  out.q_true = out.x.dot(gs.theta);
  out.eps = cfg.sigma_eps * rng.normal(round, slot, Draw::SkillNoise, 0);
  out.eta = cfg.sigma_eta * rng.normal(round, slot, Draw::SignalNoise, 0);
}

inline Candidate draw_candidate(const MarketConfig& cfg, const NormalStream& rng,
                                std::uint32_t round, int group, std::uint32_t slot) {
  Candidate c;
  draw_candidate_into(cfg, rng, round, group, slot, c);
  return c;
}

// All candidates of one round, ordered group by group.  `out` is reused
// across rounds to avoid reallocating.
inline void draw_round_into(const MarketConfig& cfg, const NormalStream& rng,
                            std::uint32_t round, std::vector<Candidate>& out) {
  out.resize(cfg.total_candidates());
  std::uint32_t slot = 0;
  for (int g = 0; g < int(cfg.groups.size()); ++g)
    for (int k = 0; k < cfg.groups[g].count; ++k, ++slot)
      draw_candidate_into(cfg, rng, round, g, slot, out[slot]);
}

inline std::vector<Candidate> draw_round(const MarketConfig& cfg, const NormalStream& rng,
                                         std::uint32_t round) {
  std::vector<Candidate> out;
  draw_round_into(cfg, rng, round, out);
  return out;
}

inline double realized_skill(const Candidate& c, StageMode stage) {
  return stage == StageMode::TwoStage ? c.q_true + c.eps + c.eta : c.q_true + c.eps;
}

// Order in which groups are force-hired during the initial phase.  Quotas are
// interleaved by highest averages (divisor method): at each step the group
// with the largest n0_g / (assigned_g + 1) among those with remaining quota
// goes next; ties break toward the lower group index.  E.g. quotas (4,2)
// yield 0,0,1,0,0,1.
inline std::vector<int> initial_sampling_plan(const MarketConfig& cfg) {
  const int total = cfg.initial_rounds();
  std::vector<int> plan;
  plan.reserve(total);
  std::vector<int> assigned(cfg.groups.size(), 0);
  for (int t = 0; t < total; ++t) {
    int best = -1;
    double best_score = -1.0;
    for (int g = 0; g < int(cfg.groups.size()); ++g) {
      if (assigned[g] >= cfg.groups[g].n0) continue;
      const double score = double(cfg.groups[g].n0) / double(assigned[g] + 1);
      if (score > best_score) {
        best = g;
        best_score = score;
      }
    }
    plan.push_back(best);
    ++assigned[best];
  }
  return plan;
}

}  // namespace hiresim
