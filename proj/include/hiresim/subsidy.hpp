#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hiresim/policies.hpp"

namespace hiresim {

enum class SubsidyRule { None, UcbIndex, HybridIndex, UcbCostSaving, HybridCostSaving };

inline std::string subsidy_label(SubsidyRule r) {
  switch (r) {
    case SubsidyRule::None: return "none";
    case SubsidyRule::UcbIndex: return "ucb_index";
    case SubsidyRule::HybridIndex: return "hybrid_index";
    case SubsidyRule::UcbCostSaving: return "ucb_cost_saving";
    case SubsidyRule::HybridCostSaving: return "hybrid_cost_saving";
  }
  return "?";
}

struct SubsidyOutcome {
  std::vector<double> per_candidate;  // subsidy offered on each slot
  double paid = 0;                    // amount paid out on the hire
  const char* rule_tag = "";
};

namespace detail {
// Offer every candidate the gap between the policy's index and the bare
// estimate, so the employer's subsidized ranking reproduces the index
// ranking.  Computed as a subtraction of the stored values: this keeps the
// floating-point ordering arguments exact.
inline SubsidyOutcome index_subsidy(const Decision& d, const char* tag) {
  SubsidyOutcome s;
  s.rule_tag = tag;
  s.per_candidate.resize(d.per_candidate.size());
  for (std::size_t i = 0; i < d.per_candidate.size(); ++i)
    s.per_candidate[i] = d.per_candidate[i].index - d.per_candidate[i].q_hat;
  s.paid = s.per_candidate[d.chosen];
  return s;
}
}  // namespace detail

inline SubsidyOutcome ucb_index_subsidy(const Decision& d) {
  return detail::index_subsidy(d, "ucb_index");
}

// Non-optimistic slots carry index == q_hat, so their subsidy is exactly 0.
inline SubsidyOutcome hybrid_index_subsidy(const Decision& d) {
  return detail::index_subsidy(d, "hybrid_index");
}

// Pay only the target, and only enough to lift it to the best bare estimate.
// Never exceeds an index payment for the same target: the best estimate is
// <= the best index.
inline SubsidyOutcome cost_saving_subsidy(int target, const std::vector<double>& q_hat) {
  SubsidyOutcome s;
  s.rule_tag = "cost_saving";
  s.per_candidate.assign(q_hat.size(), 0.0);
  double best_q = q_hat.at(target);
  for (double q : q_hat) best_q = std::max(best_q, q);
  s.per_candidate[target] = best_q - q_hat[target];
  s.paid = s.per_candidate[target];
  return s;
}

inline SubsidyOutcome cost_saving_subsidy(const Decision& d) {
  std::vector<double> q(d.per_candidate.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = d.per_candidate[i].q_hat;
  return cost_saving_subsidy(d.chosen, q);
}

inline SubsidyOutcome apply_subsidy(SubsidyRule rule, const Decision& d) {
  switch (rule) {
    case SubsidyRule::None: {
      SubsidyOutcome s;
      s.rule_tag = "none";
      s.per_candidate.assign(d.per_candidate.size(), 0.0);
      return s;
    }
    case SubsidyRule::UcbIndex: return ucb_index_subsidy(d);
    case SubsidyRule::HybridIndex: return hybrid_index_subsidy(d);
    case SubsidyRule::UcbCostSaving:
    case SubsidyRule::HybridCostSaving: return cost_saving_subsidy(d);
  }
  throw std::logic_error("apply_subsidy: unknown rule");
}

// Does a myopic employer, who hires argmax of estimate + subsidy, pick the
// policy's choice?  Ties count in the target's favor (rel_tol absorbs the
// one-ulp slack the subtraction-based offers can leave).
inline bool verify_implements(const Decision& d, const SubsidyOutcome& s,
                              double rel_tol = 1e-9) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.per_candidate.size(); ++i)
    best = std::max(best, d.per_candidate[i].q_hat + s.per_candidate[i]);
  const double mine = d.per_candidate[d.chosen].q_hat + s.per_candidate[d.chosen];
  return mine >= best - rel_tol * std::max(1.0, std::abs(best));
}

}  // namespace hiresim
