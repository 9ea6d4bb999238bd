// Acceptance survey: one pass/fail line per criterion, nonzero exit on any
// failure.  Statistical thresholds follow the documented desk-scale run
// counts, so a full pass takes a minute or two.
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "hiresim/config_json.hpp"
#include "hiresim/engine.hpp"
#include "hiresim/presets.hpp"
#include "hiresim/selection.hpp"

using namespace hiresim;

namespace {

int g_failures = 0;

void report(int number, const std::string& what, bool pass, const std::string& detail) {
  std::printf("[%2d] %-34s %s  (%s)\n", number, what.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

PolicySpec pol(PolicyKind k) {
  PolicySpec p;
  p.kind = k;
  return p;
}

// cumulative series value at an absolute round (1-based, forced phase
// included)
double cum_at(const std::vector<double>& cum, int initial, int round) {
  return cum.at(std::size_t(round - initial - 1));
}

double slope_loglog(const std::vector<double>& n, const std::vector<double>& v) {
  const std::size_t k = n.size();
  double sx = 0, sy = 0;
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::log(n[i]);
    y[i] = std::log(v[i]);
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / k, my = sy / k;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < k; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace

int main() {
  const MarketConfig base = default_market_config();

  // ---- 1: det-based ellipsoid covers theta along whole runs ----
  {
    EngineOptions opt;
    opt.check_coverage = true;
    const AggregateStats a =
        run_batch(base, pol(PolicyKind::LaissezFaire), SubsidyRule::None, 500, 1, opt);
    // The self-normalized bound is a statement about one estimator, so each
    // group's ellipsoid is scored on its own; a joint all-groups event would
    // stack the per-group miss rates (~2 delta, not delta) and test a claim
    // the bound never makes.
    std::string shown;
    double worst = 1.0;
    for (std::size_t g = 0; g < a.coverage_failures_group.size(); ++g) {
      const double frac =
          1.0 - double(a.coverage_failures_group[g]) / double(a.runs);
      worst = std::min(worst, frac);
      shown += (g ? " / " : "") + fmt(frac);
    }
    report(1, "confidence coverage", worst >= 0.87, shown + " >= 0.87");
  }

  // ---- 2: shutout frequency grows with the majority arrival count ----
  {
    const ExperimentPreset& fig1 = preset("fig1_pu_vs_k1");
    std::vector<EventStats> pu;
    for (const double k1 : fig1.sweep_values)
      pu.push_back(run_batch(sweep_config(fig1, k1), pol(PolicyKind::LaissezFaire),
                             SubsidyRule::None, 1000, 1)
                       .events.at("pu_g1"));
    bool increasing = true;
    for (std::size_t i = 1; i < pu.size(); ++i)
      if (!(pu[i].freq > pu[i - 1].freq)) increasing = false;
    const bool separated =
        pu.front().freq + pu.front().ci_halfwidth <
        pu.back().freq - pu.back().ci_halfwidth;
    const bool small_at_2 = pu.front().freq < 0.05;
    report(2, "shutout trend over K1", increasing && separated && small_at_2,
           "freq " + fmt(pu[0].freq) + " -> " + fmt(pu[1].freq) + " -> " +
               fmt(pu[2].freq) + " -> " + fmt(pu[3].freq));
  }

  // ---- 3 & 5 & 6 share batches at the stock horizon ----
  const auto traces_lf =
      run_traces(base, pol(PolicyKind::LaissezFaire), SubsidyRule::None, 500, 1);
  const auto traces_ucb_index =
      run_traces(base, pol(PolicyKind::Ucb), SubsidyRule::UcbIndex, 500, 1);
  const auto traces_ucb_cost =
      run_traces(base, pol(PolicyKind::Ucb), SubsidyRule::UcbCostSaving, 500, 1);
  const auto traces_hyb_index =
      run_traces(base, pol(PolicyKind::Hybrid), SubsidyRule::HybridIndex, 500, 1);
  const auto traces_hyb_cost =
      run_traces(base, pol(PolicyKind::Hybrid), SubsidyRule::HybridCostSaving, 500, 1);
  const AggregateStats agg_lf = aggregate(traces_lf);
  const AggregateStats agg_ucb = aggregate(traces_ucb_index);
  const AggregateStats agg_hyb = aggregate(traces_hyb_index);
  const int n0 = agg_lf.initial_rounds;

  // ---- 3: ucb beats the laissez-faire tail and never shuts anyone out ----
  {
    const double ucb_mean = agg_ucb.series.at("regret").mean.back();
    const double lf_p95 = agg_lf.series.at("regret").p95.back();
    const long ucb_pu = agg_ucb.events.at("pu_g1").count;
    report(3, "ucb regret vs lf tail",
           ucb_mean < lf_p95 && ucb_pu == 0,
           "ucb " + fmt(ucb_mean) + " < lf p95 " + fmt(lf_p95) + ", pu runs " +
               std::to_string(ucb_pu));
  }

  // ---- 4: regret growth rates on a doubled horizon ----
  {
    MarketConfig long_cfg = base;
    long_cfg.horizon = 2000;
    const AggregateStats ucb2k =
        run_batch(long_cfg, pol(PolicyKind::Ucb), SubsidyRule::None, 500, 1);

    MarketConfig imb = long_cfg;
    imb.groups[0].count = 30;
    imb.groups[0].n0 = 30;
    const AggregateStats lf30 =
        run_batch(imb, pol(PolicyKind::LaissezFaire), SubsidyRule::None, 500, 1);

    // The sublinear side is a bound on expected regret, so the ucb slope is
    // fit on the mean.  The imbalanced-LF side is a constant-probability
    // shutout claim: shut-out runs accrue a fixed gap every round forever
    // while recovered runs go flat, and averaging the two regimes hides the
    // ray.  Fit that slope on the 95th-percentile track, which stays inside
    // the shutout mass (frequency ~0.2 >> 0.05 at every checkpoint).
    const std::vector<double> checkpoints{250, 500, 1000, 2000};
    std::vector<double> ucb_vals, lf_vals;
    for (const double n : checkpoints) {
      ucb_vals.push_back(
          cum_at(ucb2k.series.at("regret").mean, ucb2k.initial_rounds, int(n)));
      lf_vals.push_back(
          cum_at(lf30.series.at("regret").p95, lf30.initial_rounds, int(n)));
    }
    const double s_ucb = slope_loglog(checkpoints, ucb_vals);
    const double s_lf = slope_loglog(checkpoints, lf_vals);
    report(4, "log-log regret slopes", s_ucb <= 0.75 && s_lf >= 0.85,
           "ucb " + fmt(s_ucb) + " <= 0.75, lf/K1=30 " + fmt(s_lf) + " >= 0.85");
  }

  // ---- 5: hybrid keeps ucb's regret at a vanishing subsidy ----
  {
    const double hyb_reg = agg_hyb.series.at("regret").mean.back();
    const double ucb_reg = agg_ucb.series.at("regret").mean.back();
    const SeriesStats& hs = agg_hyb.series.at("subsidy");
    const SeriesStats& us = agg_ucb.series.at("subsidy");
    const double hyb_first = cum_at(hs.mean, n0, 500);
    const double hyb_second = cum_at(hs.mean, n0, 1000) - hyb_first;
    const double ucb_first = cum_at(us.mean, n0, 500);
    const double ucb_second = cum_at(us.mean, n0, 1000) - ucb_first;
    const bool ok = hyb_reg <= 1.3 * ucb_reg && hyb_second <= 0.15 * hyb_first &&
                    ucb_second >= 0.30 * ucb_first;
    report(5, "hybrid regret and subsidy decay", ok,
           "regret ratio " + fmt(hyb_reg / ucb_reg) + " <= 1.3, hybrid tail " +
               fmt(hyb_second / hyb_first) + " <= 0.15, ucb tail " +
               fmt(ucb_second / ucb_first) + " >= 0.30");
  }

  // ---- 6: cost-saving dominance, exact and in the long run ----
  {
    long violations = 0;
    for (std::size_t r = 0; r < traces_ucb_index.size(); ++r)
      for (std::size_t t = 0; t < traces_ucb_index[r].subsidy_paid.size(); ++t)
        if (traces_ucb_cost[r].subsidy_paid[t] > traces_ucb_index[r].subsidy_paid[t])
          ++violations;
    for (std::size_t r = 0; r < traces_hyb_index.size(); ++r)
      for (std::size_t t = 0; t < traces_hyb_index[r].subsidy_paid.size(); ++t)
        if (traces_hyb_cost[r].subsidy_paid[t] > traces_hyb_index[r].subsidy_paid[t])
          ++violations;

    MarketConfig long_cfg = base;
    long_cfg.horizon = 10000;
    const AggregateStats hyb_long = run_batch(
        long_cfg, pol(PolicyKind::Hybrid), SubsidyRule::HybridCostSaving, 50, 1);
    const AggregateStats ucb_long = run_batch(
        long_cfg, pol(PolicyKind::Ucb), SubsidyRule::UcbCostSaving, 50, 1);
    // Flat-versus-growing is a log-time contrast, so split the horizon at the
    // log midpoint (round 100 of 10^4): the hybrid rule has spent nearly its
    // whole budget by then, while the ucb rule keeps accruing across the
    // remaining two decades.
    const int mid = 100;
    const SeriesStats& hl = hyb_long.series.at("subsidy");
    const SeriesStats& ul = ucb_long.series.at("subsidy");
    const double h_first = cum_at(hl.mean, n0, mid);
    const double h_second = cum_at(hl.mean, n0, 10000) - h_first;
    const double u_first = cum_at(ul.mean, n0, mid);
    const double u_second = cum_at(ul.mean, n0, 10000) - u_first;
    const bool ok = violations == 0 && h_second <= 0.20 * h_first &&
                    u_second >= 0.30 * u_first;
    report(6, "cost-saving dominance", ok,
           std::to_string(violations) + " violations, hybrid tail " +
               fmt(h_second / h_first) + " <= 0.20, ucb tail " +
               fmt(u_second / u_first) + " >= 0.30");
  }

  // ---- 7: the finalist quota wipes out shutouts ----
  {
    MarketConfig two_stage = base;
    two_stage.sigma_eta = 4.0;  // variance 16
    const EventStats lf2s =
        run_batch(two_stage, pol(PolicyKind::TwoStageLF), SubsidyRule::None, 1000, 1)
            .events.at("pu_g1");
    const EventStats rooney =
        run_batch(two_stage, pol(PolicyKind::Rooney), SubsidyRule::None, 1000, 1)
            .events.at("pu_g1");
    const bool ok = rooney.freq <= 0.01 &&
                    lf2s.freq - lf2s.ci_halfwidth >
                        rooney.freq + rooney.ci_halfwidth;
    report(7, "quota vs two-stage shutouts", ok,
           "rooney " + fmt(rooney.freq) + " <= 0.01, lf2s " + fmt(lf2s.freq));
  }

  // ---- 8: the quota's benchmark regret keeps growing linearly ----
  {
    MarketConfig two_stage = base;
    two_stage.sigma_eta = 4.0;
    const AggregateStats rooney =
        run_batch(two_stage, pol(PolicyKind::Rooney), SubsidyRule::None, 500, 1);
    PolicySpec then_lf = pol(PolicyKind::RooneyThenLF);
    then_lf.switch_round = 100;
    const AggregateStats switched =
        run_batch(two_stage, then_lf, SubsidyRule::None, 500, 1);

    const SeriesStats& ru = rooney.series.at("u2s_regret");
    const double late =
        (cum_at(ru.mean, n0, 1000) - cum_at(ru.mean, n0, 799)) / (1000 - 799);
    const double early =
        (cum_at(ru.mean, n0, 300) - cum_at(ru.mean, n0, 99)) / (300 - 99);
    const TotalStats rt = rooney.totals.at("u2s_regret_total");
    const TotalStats st = switched.totals.at("u2s_regret_total");
    const bool ok = late >= 0.5 * early &&
                    st.mean + st.ci_halfwidth < rt.mean - rt.ci_halfwidth;
    report(8, "rooney linear-regret signature", ok,
           "late/early " + fmt(late / early) + " >= 0.5, switched " +
               fmt(st.mean) + " < rooney " + fmt(rt.mean));
  }

  // ---- 9: exact oracles ----
  {
    std::mt19937 gen(2718);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> lam(0.1, 4.0);

    long ridge_bad = 0;
    for (int rep = 0; rep < 10000; ++rep) {
      const int d = dim(gen);
      const double lambda = lam(gen);
      auto p = posterior_init(d, lambda);
      MatXd v = lambda * MatXd::Identity(d, d);
      VecXd b = VecXd::Zero(d);
      const int len = rep % 50 == 0 ? 300 : 3 + int(gen() % 38);
      for (int t = 0; t < len; ++t) {
        VecXd x(d);
        for (int j = 0; j < d; ++j) x[j] = nd(gen);
        const double y = nd(gen);
        posterior_update(p, x, y);
        v.noalias() += x * x.transpose();
        b.noalias() += x * y;
      }
      const VecXd exact = Eigen::LLT<MatXd>(v).solve(b);
      if ((p.theta_hat - exact).norm() > 1e-8 * std::max(1.0, exact.norm()))
        ++ridge_bad;
    }

    // closed-form index vs a dense sweep of the ellipsoid boundary
    double worst_rel = 0;
    for (int rep = 0; rep < 3; ++rep) {
      auto p = posterior_init(2, 1.0);
      for (int t = 0; t < 25; ++t) {
        const VecXd x = (VecXd(2) << nd(gen) + 1.0, 2.0 * nd(gen)).finished();
        posterior_update(p, x, nd(gen));
      }
      RadiusParams rp;
      rp.sigma_eps = 2.0;
      rp.lambda = 1.0;
      rp.delta = 0.1;
      rp.s_bound = 1.0;
      const double beta = conf_radius(p, rp);
      const VecXd probe = (VecXd(2) << nd(gen), nd(gen)).finished();
      const double closed = ucb_index(p, probe, beta);
      Eigen::SelfAdjointEigenSolver<MatXd> es(p.v_bar);
      const MatXd half = es.operatorInverseSqrt();
      double best = -1e300;
      constexpr double kTau = 6.283185307179586476925286766559;
      for (int k = 0; k < 1000000; ++k) {
        const double phi = kTau * k / 1000000.0;
        const VecXd u = (VecXd(2) << std::cos(phi), std::sin(phi)).finished();
        best = std::max(best, probe.dot(p.theta_hat + beta * (half * u)));
      }
      worst_rel = std::max(worst_rel,
                           std::abs(closed - best) / std::max(1.0, std::abs(closed)));
    }

    long quota_bad = 0;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<std::array<int, 3>> combos;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        for (int k = j + 1; k < 6; ++k) combos.push_back({i, j, k});
    for (int rep = 0; rep < 10000; ++rep) {
      std::vector<int> grp(6);
      int ones = 0;
      for (int& g : grp) {
        g = int(gen() & 1u);
        ones += g;
      }
      if (ones == 0) grp[0] = 1;
      if (ones == 6) grp[0] = 0;
      std::vector<double> val(6);
      for (double& v : val) v = ud(gen);
      double best = -1.0;
      std::vector<int> best_set;
      for (const auto& c : combos) {
        const int g0 = (grp[c[0]] == 0) + (grp[c[1]] == 0) + (grp[c[2]] == 0);
        if (g0 == 0 || g0 == 3) continue;
        const double total = val[c[0]] + val[c[1]] + val[c[2]];
        if (total > best) {
          best = total;
          best_set = {c[0], c[1], c[2]};
        }
      }
      if (constrained_top_k(val, grp, 2, 3) != best_set) ++quota_bad;
    }

    const bool ok = ridge_bad == 0 && worst_rel <= 1e-4 && quota_bad == 0;
    report(9, "oracle equivalences", ok,
           "ridge misses " + std::to_string(ridge_bad) + ", index rel err " +
               fmt(worst_rel) + ", quota misses " + std::to_string(quota_bad));
  }

  // ---- 10: identical bytes across repeats and worker counts ----
  {
    const ExperimentPreset& fig1 = preset("fig1_pu_vs_k1");
    const ResultsBundle a = run_preset(fig1, 16, 1);
    const ResultsBundle b = run_preset(fig1, 16, 1);
    const ResultsBundle c = run_preset(fig1, 16, 8);
    bool same = a.tables.size() == b.tables.size() &&
                a.tables.size() == c.tables.size();
    if (same)
      for (std::size_t i = 0; i < a.tables.size(); ++i)
        same = same && csv_text(a.tables[i]) == csv_text(b.tables[i]) &&
               csv_text(a.tables[i]) == csv_text(c.tables[i]);
    report(10, "byte-stable csv output", same,
           same ? "repeat and 8-worker runs identical" : "outputs diverged");
  }

  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
