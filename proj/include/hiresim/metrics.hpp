#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hiresim/market.hpp"
#include "hiresim/selection.hpp"

namespace hiresim {

// Everything recorded from one simulated run.  Per-round vectors cover the
// main phase only (rounds initial_rounds+1 .. N).
struct RunTrace {
  int initial_rounds = 0;
  std::vector<double> regret_inc;        // one-stage policies
  std::vector<double> u2s_inc, c2s_inc;  // two-stage policies
  std::vector<double> subsidy_paid;
  std::vector<int> chosen_group;
  std::vector<long> hires;        // per group, main phase
  std::vector<long> hires_total;  // per group, forced phase included
  std::vector<std::vector<double>> min_eig;  // [group][round], optional
  double warmstart_cost = 0;      // cost-saving payments during the forced phase
  bool coverage_ok = true;        // no theta ever left its confidence ellipsoid
  std::vector<char> coverage_ok_group;  // same, split per group
  long implement_violations = 0;
};

inline double regret_step(std::span<const Candidate> cands, int chosen) {
  double best = cands[0].q_true;
  for (const auto& c : cands) best = std::max(best, c.q_true);
  return best - cands[chosen].q_true;
}

namespace detail {
inline double benchmark_two_stage_value(std::span<const Candidate> cands,
                                        const std::vector<int>& finalists) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i : finalists) best = std::max(best, cands[i].q_true + cands[i].eta);
  return best;
}
}  // namespace detail

// Gap to the unconstrained two-stage benchmark: finalists ranked by true
// skill, hire the best skill + signal among them.
inline double u2s_step(std::span<const Candidate> cands, int chosen, int k_f) {
  std::vector<double> q(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) q[i] = cands[i].q_true;
  const auto fin = top_k(q, k_f);
  return detail::benchmark_two_stage_value(cands, fin) -
         (cands[chosen].q_true + cands[chosen].eta);
}

// Same benchmark but its slate must cover every group.
inline double c2s_step(std::span<const Candidate> cands, int chosen, int k_f,
                       int n_groups) {
  std::vector<double> q(cands.size());
  std::vector<int> grp(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    q[i] = cands[i].q_true;
    grp[i] = cands[i].group;
  }
  const auto fin = constrained_top_k(q, grp, n_groups, k_f);
  return detail::benchmark_two_stage_value(cands, fin) -
         (cands[chosen].q_true + cands[chosen].eta);
}

// Perpetual underestimation: the group is never hired once forced sampling
// ends.
inline bool detect_pu(const RunTrace& trace, int group) {
  for (int g : trace.chosen_group)
    if (g == group) return false;
  return true;
}

// Linear interpolation percentile (type 7); `sorted` must be ascending.
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
  const double h = (double(sorted.size()) - 1.0) * p;
  const std::size_t lo = std::size_t(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - double(lo)) * (sorted[lo + 1] - sorted[lo]);
}

struct SeriesStats {
  std::vector<double> mean, p5, p95;  // cumulative, per main-phase round
  double final_mean = 0, final_sd = 0;
};

struct EventStats {
  double freq = 0, ci_halfwidth = 0;  // ci = 2 sqrt(freq (1-freq) / runs)
  long count = 0;
};

struct TotalStats {
  double mean = 0, sd = 0, ci_halfwidth = 0;  // ci = 2 sd / sqrt(runs)
};

struct AggregateStats {
  long runs = 0;
  int initial_rounds = 0;
  int main_rounds = 0;
  std::map<std::string, SeriesStats> series;
  std::map<std::string, EventStats> events;  // "pu_g<i>" per group
  std::map<std::string, TotalStats> totals;
  long implement_violations = 0;
  long coverage_failures = 0;                  // runs where any group escaped
  std::vector<long> coverage_failures_group;   // runs where group g escaped
};

namespace detail {

inline SeriesStats cumulative_series(const std::vector<RunTrace>& traces,
                                     std::vector<double> RunTrace::* field) {
  const std::size_t runs = traces.size();
  const std::size_t rounds = (traces[0].*field).size();
  for (const auto& t : traces)
    if ((t.*field).size() != rounds)
      throw std::invalid_argument("aggregate: traces have mismatched round counts");
  SeriesStats s;
  s.mean.resize(rounds);
  s.p5.resize(rounds);
  s.p95.resize(rounds);
  std::vector<double> cum(runs, 0.0), scratch(runs);
  for (std::size_t t = 0; t < rounds; ++t) {
    double sum = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      cum[r] += (traces[r].*field)[t];
      scratch[r] = cum[r];
      sum += cum[r];
    }
    s.mean[t] = sum / double(runs);
    std::sort(scratch.begin(), scratch.end());
    s.p5[t] = percentile_sorted(scratch, 0.05);
    s.p95[t] = percentile_sorted(scratch, 0.95);
  }
  s.final_mean = s.mean.back();
  double ss = 0;
  for (double v : cum) ss += (v - s.final_mean) * (v - s.final_mean);
  s.final_sd = runs > 1 ? std::sqrt(ss / double(runs - 1)) : 0.0;
  return s;
}

inline TotalStats total_of(double mean, double sd, std::size_t runs) {
  return {mean, sd, 2.0 * sd / std::sqrt(double(runs))};
}

}  // namespace detail

inline AggregateStats aggregate(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  AggregateStats a;
  a.runs = long(traces.size());
  a.initial_rounds = traces[0].initial_rounds;
  a.main_rounds = int(traces[0].chosen_group.size());

  const std::pair<const char*, std::vector<double> RunTrace::*> kSeries[] = {
      {"regret", &RunTrace::regret_inc},
      {"subsidy", &RunTrace::subsidy_paid},
      {"u2s_regret", &RunTrace::u2s_inc},
      {"c2s_regret", &RunTrace::c2s_inc},
  };
  for (const auto& [name, field] : kSeries) {
    if ((traces[0].*field).empty()) continue;
    SeriesStats s = detail::cumulative_series(traces, field);
    a.totals[std::string(name) + "_total"] =
        detail::total_of(s.final_mean, s.final_sd, traces.size());
    a.series[name] = std::move(s);
  }

  const std::size_t n_groups = traces[0].hires_total.size();
  for (std::size_t g = 0; g < n_groups; ++g) {
    EventStats e;
    for (const auto& t : traces) e.count += detect_pu(t, int(g)) ? 1 : 0;
    e.freq = double(e.count) / double(a.runs);
    e.ci_halfwidth = 2.0 * std::sqrt(e.freq * (1.0 - e.freq) / double(a.runs));
    a.events["pu_g" + std::to_string(g)] = e;
  }

  // Scalar run totals: the forced-phase premium, and the overall spend
  // (premium + subsidies) that the warm-start comparison plots.
  auto scalar_total = [&](auto&& per_run) {
    double mean = 0;
    for (const auto& t : traces) mean += per_run(t);
    mean /= double(a.runs);
    double ss = 0;
    for (const auto& t : traces) ss += (per_run(t) - mean) * (per_run(t) - mean);
    const double sd = a.runs > 1 ? std::sqrt(ss / double(a.runs - 1)) : 0.0;
    return detail::total_of(mean, sd, traces.size());
  };
  a.totals["warmstart_cost"] =
      scalar_total([](const RunTrace& t) { return t.warmstart_cost; });
  a.totals["spend_total"] = scalar_total([](const RunTrace& t) {
    double s = t.warmstart_cost;
    for (double v : t.subsidy_paid) s += v;
    return s;
  });

  a.coverage_failures_group.assign(traces[0].coverage_ok_group.size(), 0);
  for (const auto& t : traces) {
    a.implement_violations += t.implement_violations;
    a.coverage_failures += t.coverage_ok ? 0 : 1;
    for (std::size_t g = 0; g < a.coverage_failures_group.size(); ++g)
      a.coverage_failures_group[g] += t.coverage_ok_group[g] ? 0 : 1;
  }
  return a;
}

}  // namespace hiresim
