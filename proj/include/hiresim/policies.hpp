#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hiresim/market.hpp"
#include "hiresim/posterior.hpp"
#include "hiresim/selection.hpp"

namespace hiresim {

enum class PolicyKind {
  LaissezFaire,   // hire the top estimate
  Ucb,            // hire the top optimistic index
  Hybrid,         // optimism only where the width still matters
  TwoStageLF,     // estimate-ranked finalists, hire on estimate + signal
  Rooney,         // finalists must cover every group
  RooneyThenLF,   // quota through switch_round, plain finalists after
  WarmStartLF,    // laissez-faire after a lengthened forced-sampling phase
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::LaissezFaire;
  double a = -1;          // Hybrid threshold scale; negative = config's a_hybrid
  int switch_round = 100; // RooneyThenLF: quota applies through this round (absolute, inclusive)
  int n0_total = -1;      // WarmStartLF: total forced hires; negative = config's quotas
};

inline bool is_two_stage(PolicyKind k) {
  return k == PolicyKind::TwoStageLF || k == PolicyKind::Rooney ||
         k == PolicyKind::RooneyThenLF;
}

inline std::string policy_label(const PolicySpec& p) {
  switch (p.kind) {
    case PolicyKind::LaissezFaire: return "lf";
    case PolicyKind::Ucb: return "ucb";
    case PolicyKind::Hybrid: return "hybrid";
    case PolicyKind::TwoStageLF: return "lf2s";
    case PolicyKind::Rooney: return "rooney";
    case PolicyKind::RooneyThenLF: return "rooney_then_lf";
    case PolicyKind::WarmStartLF: return "warmstart_lf";
  }
  return "?";
}

// What a policy saw and did in one round.
struct Decision {
  struct Entry {
    double q_hat = 0;
    double width = 0;       // radius * ||x||_{V^-1}; 0 when the policy ignores it
    double index = 0;       // the score the policy ranked this candidate by
    bool optimistic = false;
  };
  int chosen = -1;
  std::vector<Entry> per_candidate;
  std::vector<int> finalists;    // two-stage only, ascending
  const char* rule_tag = "";     // which rule produced the choice
};

namespace detail {
inline int argmax_entry_index(const std::vector<Decision::Entry>& e) {
  int best = 0;
  for (int i = 1; i < int(e.size()); ++i)
    if (e[i].index > e[best].index) best = i;
  return best;
}
}  // namespace detail

inline std::vector<double> group_radii(const std::vector<GroupPosterior>& posts,
                                       const RadiusParams& rp) {
  std::vector<double> r(posts.size());
  for (std::size_t g = 0; g < posts.size(); ++g) r[g] = conf_radius(posts[g], rp);
  return r;
}

inline Decision choose_lf(std::span<const Candidate> cands,
                          const std::vector<GroupPosterior>& posts) {
  Decision d;
  d.rule_tag = "lf";
  d.per_candidate.resize(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double q = predict(posts[cands[i].group], cands[i].x);
    d.per_candidate[i] = {q, 0.0, q, false};
  }
  d.chosen = detail::argmax_entry_index(d.per_candidate);
  return d;
}

inline Decision choose_ucb(std::span<const Candidate> cands,
                           const std::vector<GroupPosterior>& posts,
                           const std::vector<double>& radius) {
  Decision d;
  d.rule_tag = "ucb";
  d.per_candidate.resize(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& p = posts[cands[i].group];
    const double q = predict(p, cands[i].x);
    const double w = radius[cands[i].group] * weighted_norm(p, cands[i].x);
    d.per_candidate[i] = {q, w, q + w, true};
  }
  d.chosen = detail::argmax_entry_index(d.per_candidate);
  return d;
}

inline Decision choose_ucb(std::span<const Candidate> cands,
                           const std::vector<GroupPosterior>& posts,
                           const RadiusParams& rp) {
  return choose_ucb(cands, posts, group_radii(posts, rp));
}

// Optimistic index only while the width exceeds a * sigma_x * ||theta_hat||
// (strict); once the group is well estimated the index falls back to the
// plain estimate.
inline std::pair<double, bool> hybrid_index(const GroupPosterior& p, const VecXd& x,
                                            double radius, double a, double sigma_x) {
  const double q = predict(p, x);
  const double w = radius * weighted_norm(p, x);
  const bool optimistic = w > a * sigma_x * p.theta_hat.norm();
  return {optimistic ? q + w : q, optimistic};
}

inline std::pair<double, bool> hybrid_index(const GroupPosterior& p, const VecXd& x,
                                            const RadiusParams& rp, double a,
                                            double sigma_x) {
  return hybrid_index(p, x, conf_radius(p, rp), a, sigma_x);
}

inline Decision choose_hybrid(std::span<const Candidate> cands,
                              const std::vector<GroupPosterior>& posts,
                              const std::vector<double>& radius, double a,
                              const MarketConfig& cfg) {
  Decision d;
  d.rule_tag = "hybrid";
  d.per_candidate.resize(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const int g = cands[i].group;
    const auto& p = posts[g];
    const double q = predict(p, cands[i].x);
    const double w = radius[g] * weighted_norm(p, cands[i].x);
    const bool opt = w > a * cfg.groups[g].sigma_x * p.theta_hat.norm();
    d.per_candidate[i] = {q, w, opt ? q + w : q, opt};
  }
  d.chosen = detail::argmax_entry_index(d.per_candidate);
  return d;
}

inline Decision choose_hybrid(std::span<const Candidate> cands,
                              const std::vector<GroupPosterior>& posts,
                              const RadiusParams& rp, double a,
                              const MarketConfig& cfg) {
  return choose_hybrid(cands, posts, group_radii(posts, rp), a, cfg);
}

inline std::vector<int> select_finalists(std::span<const Candidate> cands,
                                         const std::vector<double>& q_hat, int k_f,
                                         bool rooney_quota, int n_groups) {
  if (!rooney_quota) return top_k(q_hat, k_f);
  std::vector<int> grp(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) grp[i] = cands[i].group;
  return constrained_top_k(q_hat, grp, n_groups, k_f);
}

inline std::vector<int> select_finalists(std::span<const Candidate> cands,
                                         const std::vector<GroupPosterior>& posts,
                                         int k_f, bool rooney_quota, int n_groups) {
  std::vector<double> q(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i)
    q[i] = predict(posts[cands[i].group], cands[i].x);
  return select_finalists(cands, q, k_f, rooney_quota, n_groups);
}

// Employer observes the interview signal on finalists and hires the best
// estimate + signal; ties toward the lower slot.
inline int hire_from_finalists(std::span<const Candidate> cands,
                               const std::vector<int>& finalists,
                               const std::vector<double>& q_hat) {
  int best = finalists.at(0);
  double best_v = q_hat[best] + cands[best].eta;
  for (std::size_t j = 1; j < finalists.size(); ++j) {
    const int i = finalists[j];
    const double v = q_hat[i] + cands[i].eta;
    if (v > best_v) {
      best = i;
      best_v = v;
    }
  }
  return best;
}

// Largest-remainder split of `total` proportional to `weights`; remainder
// ties go to the lower index.
inline std::vector<int> apportion_largest_remainder(int total,
                                                    const std::vector<int>& weights) {
  int wsum = 0;
  for (int w : weights) wsum += w;
  if (wsum <= 0) throw std::invalid_argument("apportion: weights must sum > 0");
  std::vector<int> out(weights.size());
  std::vector<std::pair<double, int>> rem;  // (-fraction, index): sort ascending
  int used = 0;
  for (std::size_t g = 0; g < weights.size(); ++g) {
    const double exact = double(total) * weights[g] / wsum;
    out[g] = int(exact);
    used += out[g];
    rem.emplace_back(-(exact - out[g]), int(g));
  }
  std::sort(rem.begin(), rem.end());
  for (int r = 0; r < total - used; ++r) ++out[rem[r].second];
  return out;
}

inline MarketConfig with_warm_start(MarketConfig cfg, int n0_total) {
  std::vector<int> counts;
  for (const auto& g : cfg.groups) counts.push_back(g.count);
  const auto n0 = apportion_largest_remainder(n0_total, counts);
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) cfg.groups[g].n0 = n0[g];
  return cfg;
}

inline void validate_policy(const MarketConfig& cfg, const PolicySpec& pol) {
  const int n_groups = int(cfg.groups.size());
  if ((pol.kind == PolicyKind::Rooney || pol.kind == PolicyKind::RooneyThenLF) &&
      cfg.k_finalists < n_groups)
    throw ConfigError("k_finalists",
                      "must be >= the number of groups for the quota rule");
  if (pol.kind == PolicyKind::RooneyThenLF && pol.switch_round < 1)
    throw ConfigError("policy.switch_round", "must be >= 1");
  if (pol.kind == PolicyKind::WarmStartLF && pol.n0_total >= 0 &&
      pol.n0_total > cfg.horizon)
    throw ConfigError("policy.n0_total", "must be <= horizon");
}

inline Decision policy_step(const PolicySpec& pol, int round,
                            std::span<const Candidate> cands,
                            const std::vector<GroupPosterior>& posts,
                            const RadiusParams& rp, const MarketConfig& cfg) {
  switch (pol.kind) {
    case PolicyKind::LaissezFaire:
    case PolicyKind::WarmStartLF:
      return choose_lf(cands, posts);
    case PolicyKind::Ucb:
      return choose_ucb(cands, posts, group_radii(posts, rp));
    case PolicyKind::Hybrid: {
      const double a = pol.a < 0 ? cfg.a_hybrid : pol.a;
      return choose_hybrid(cands, posts, group_radii(posts, rp), a, cfg);
    }
    case PolicyKind::TwoStageLF:
    case PolicyKind::Rooney:
    case PolicyKind::RooneyThenLF: {
      Decision d = choose_lf(cands, posts);
      std::vector<double> q(cands.size());
      for (std::size_t i = 0; i < cands.size(); ++i) q[i] = d.per_candidate[i].q_hat;
      const bool quota = pol.kind == PolicyKind::Rooney ||
                         (pol.kind == PolicyKind::RooneyThenLF &&
                          round <= pol.switch_round);
      d.rule_tag = quota ? "rooney" : "lf2s";
      d.finalists =
          select_finalists(cands, q, cfg.k_finalists, quota, int(cfg.groups.size()));
      d.chosen = hire_from_finalists(cands, d.finalists, q);
      return d;
    }
  }
  throw std::logic_error("policy_step: unknown policy");
}

}  // namespace hiresim
