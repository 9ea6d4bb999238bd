#include "hiresim/presets.hpp"

#include <cmath>

namespace hiresim {

namespace {

PolicySpec pol(PolicyKind k) {
  PolicySpec p;
  p.kind = k;
  return p;
}

std::vector<ExperimentPreset> build_presets() {
  std::vector<ExperimentPreset> out;
  const MarketConfig base = default_market_config();

  {
    ExperimentPreset p;
    p.name = "fig1_pu_vs_k1";
    p.description =
        "How often the minority group is never hired again under laissez-faire, "
        "as the majority arrival count grows";
    p.base = base;
    p.sweep_field = "k1";
    p.sweep_values = {2, 10, 30, 100};
    p.policies = {{pol(PolicyKind::LaissezFaire), SubsidyRule::None, "lf"}};
    p.outputs = {"pu_frequency"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig2_lf_vs_ucb";
    p.description = "Cumulative regret of laissez-faire vs the subsidized optimistic rule";
    p.base = base;
    p.policies = {{pol(PolicyKind::LaissezFaire), SubsidyRule::None, "lf"},
                  {pol(PolicyKind::Ucb), SubsidyRule::UcbIndex, "ucb"}};
    p.outputs = {"regret"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig3_ucb_vs_hybrid_regret";
    p.description = "Cumulative regret of the optimistic rule vs the hybrid rule";
    p.base = base;
    p.policies = {{pol(PolicyKind::Ucb), SubsidyRule::UcbIndex, "ucb"},
                  {pol(PolicyKind::Hybrid), SubsidyRule::HybridIndex, "hybrid"}};
    p.outputs = {"regret"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig4_index_subsidies";
    p.description = "Cumulative subsidy outlay of the two index rules";
    p.base = base;
    p.policies = {{pol(PolicyKind::Ucb), SubsidyRule::UcbIndex, "ucb_index"},
                  {pol(PolicyKind::Hybrid), SubsidyRule::HybridIndex, "hybrid_index"}};
    p.outputs = {"subsidy"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig5_costsaving_subsidies";
    p.description = "Cumulative outlay of the cost-saving rules next to the hybrid index rule";
    p.base = base;
    p.policies = {
        {pol(PolicyKind::Ucb), SubsidyRule::UcbCostSaving, "ucb_cost_saving"},
        {pol(PolicyKind::Hybrid), SubsidyRule::HybridIndex, "hybrid_index"},
        {pol(PolicyKind::Hybrid), SubsidyRule::HybridCostSaving, "hybrid_cost_saving"}};
    p.outputs = {"subsidy"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig6_costsaving_long";
    p.description = "Subsidy outlay over a ten-times longer horizon";
    p.base = base;
    p.base.horizon = 10000;
    p.runs = 50;
    p.policies = {
        {pol(PolicyKind::Ucb), SubsidyRule::UcbCostSaving, "ucb_cost_saving"},
        {pol(PolicyKind::Hybrid), SubsidyRule::HybridIndex, "hybrid_index"},
        {pol(PolicyKind::Hybrid), SubsidyRule::HybridCostSaving, "hybrid_cost_saving"}};
    p.outputs = {"subsidy"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig7_rooney_pu";
    p.description =
        "Minority shutout frequency in the two-stage market, with and without a "
        "group-covering finalist quota, vs interview signal variance";
    p.base = base;
    p.sweep_field = "sigma_eta_sq";
    p.sweep_values = {0.25, 1, 4, 16};
    p.policies = {{pol(PolicyKind::TwoStageLF), SubsidyRule::None, "lf2s"},
                  {pol(PolicyKind::Rooney), SubsidyRule::None, "rooney"}};
    p.outputs = {"pu_frequency"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "fig8_rooney_regret";
    p.description =
        "Two-stage cumulative regret against the unconstrained and group-covering "
        "benchmarks, with a high-variance interview signal";
    p.base = base;
    p.base.sigma_eta = 4.0;  // variance 16
    PolicySpec then_lf = pol(PolicyKind::RooneyThenLF);
    then_lf.switch_round = 100;
    p.policies = {{pol(PolicyKind::TwoStageLF), SubsidyRule::None, "lf2s"},
                  {pol(PolicyKind::Rooney), SubsidyRule::None, "rooney"},
                  {then_lf, SubsidyRule::None, "rooney_then_lf"}};
    p.outputs = {"u2s_regret", "c2s_regret"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "appB_warmstart_pu";
    p.description =
        "Shutout frequency after a lengthened forced-sampling phase, next to the "
        "hybrid rule at the stock phase length";
    p.base = base;
    p.sweep_field = "n0_total";
    p.sweep_values = {0, 12, 20, 50, 100};
    p.policies = {{pol(PolicyKind::WarmStartLF), SubsidyRule::None, "warmstart_lf"},
                  {pol(PolicyKind::Hybrid), SubsidyRule::None, "hybrid", false}};
    p.outputs = {"pu_frequency"};
    out.push_back(std::move(p));
  }
  {
    ExperimentPreset p;
    p.name = "appB_warmstart_subsidy";
    p.description =
        "Total money spent: the forced-sampling hiring premium vs the hybrid "
        "cost-saving subsidy";
    p.base = base;
    p.sweep_field = "n0_total";
    p.sweep_values = {12, 20, 50, 100};
    PolicyChoice warm{pol(PolicyKind::WarmStartLF), SubsidyRule::None, "warmstart_lf"};
    warm.options.warmstart_cost = true;
    p.policies = {warm,
                  {pol(PolicyKind::Hybrid), SubsidyRule::HybridCostSaving,
                   "hybrid_cost_saving", false}};
    p.outputs = {"subsidy_total"};
    out.push_back(std::move(p));
  }
  return out;
}

std::string fmt_value(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15)
    return std::to_string(long(v));
  return fmt_g17(v);
}

}  // namespace

const std::vector<ExperimentPreset>& all_presets() {
  static const std::vector<ExperimentPreset> presets = build_presets();
  return presets;
}

const ExperimentPreset& preset(const std::string& name) {
  for (const auto& p : all_presets())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : all_presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("preset", "unknown name '" + name + "' (known: " + known + ")");
}

MarketConfig sweep_config(const ExperimentPreset& pr, double value) {
  MarketConfig cfg = pr.base;
  if (pr.sweep_field == "k1") {
    cfg.groups.at(0).count = int(value);
    cfg.groups.at(0).n0 = int(value);  // forced sampling tracks arrivals
  } else if (pr.sweep_field == "sigma_eta_sq") {
    cfg.sigma_eta = std::sqrt(value);
  }
  // "n0_total" adjusts the policy, not the market
  return cfg;
}

PolicySpec sweep_policy(const ExperimentPreset& pr, const PolicyChoice& pc, double value) {
  PolicySpec p = pc.policy;
  if (pr.sweep_field == "n0_total" && pc.swept) p.n0_total = int(value);
  return p;
}

ResultsBundle run_preset(const ExperimentPreset& pr, long runs_override, int workers) {
  const long runs = runs_override > 0 ? runs_override : pr.runs;
  const bool has_sweep = !pr.sweep_field.empty();

  struct Cell {
    double sweep_value;
    const PolicyChoice* choice;
    AggregateStats stats;
  };
  std::vector<Cell> cells;
  for (const auto& pc : pr.policies) {
    if (has_sweep && pc.swept) {
      for (double v : pr.sweep_values)
        cells.push_back({v, &pc,
                         run_batch(sweep_config(pr, v), sweep_policy(pr, pc, v),
                                   pc.subsidy, runs, workers, pc.options)});
    } else {
      // An unswept row reports at the stock forced-phase length.
      const double v = double(pr.base.initial_rounds());
      cells.push_back({v, &pc,
                       run_batch(pr.base, pc.policy, pc.subsidy, runs, workers,
                                 pc.options)});
    }
  }

  const bool policy_col = pr.policies.size() > 1;
  ResultsBundle bundle;

  for (const std::string& kind : pr.outputs) {
    Table t;
    if (kind == "pu_frequency") {
      t.filename = "pu_frequency.csv";
      if (has_sweep) t.header.push_back(pr.sweep_field);
      if (policy_col) t.header.push_back("policy");
      t.header.insert(t.header.end(), {"freq", "ci_halfwidth", "runs"});
      for (const auto& c : cells) {
        const auto& e = c.stats.events.at("pu_g" + std::to_string(pr.pu_group));
        std::vector<std::string> row;
        if (has_sweep) row.push_back(fmt_value(c.sweep_value));
        if (policy_col) row.push_back(c.choice->label);
        row.insert(row.end(),
                   {fmt_g17(e.freq), fmt_g17(e.ci_halfwidth), std::to_string(c.stats.runs)});
        t.rows.push_back(std::move(row));
      }
    } else if (kind == "subsidy_total") {
      t.filename = "subsidy_total.csv";
      if (has_sweep) t.header.push_back(pr.sweep_field);
      if (policy_col) t.header.push_back("policy");
      t.header.insert(t.header.end(), {"total", "ci_halfwidth", "runs"});
      for (const auto& c : cells) {
        const auto& tot = c.stats.totals.at("spend_total");
        std::vector<std::string> row;
        if (has_sweep) row.push_back(fmt_value(c.sweep_value));
        if (policy_col) row.push_back(c.choice->label);
        row.insert(row.end(), {fmt_g17(tot.mean), fmt_g17(tot.ci_halfwidth),
                               std::to_string(c.stats.runs)});
        t.rows.push_back(std::move(row));
      }
    } else {
      // cumulative per-round series
      t.filename = kind + ".csv";
      if (has_sweep) t.header.push_back(pr.sweep_field);
      t.header.insert(t.header.end(), {"round", "policy", "mean", "p5", "p95"});
      for (const auto& c : cells) {
        const auto it = c.stats.series.find(kind);
        if (it == c.stats.series.end()) continue;
        const SeriesStats& s = it->second;
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
          std::vector<std::string> row;
          if (has_sweep) row.push_back(fmt_value(c.sweep_value));
          row.insert(row.end(),
                     {std::to_string(c.stats.initial_rounds + long(i) + 1),
                      c.choice->label, fmt_g17(s.mean[i]), fmt_g17(s.p5[i]),
                      fmt_g17(s.p95[i])});
          t.rows.push_back(std::move(row));
        }
      }
    }
    bundle.tables.push_back(std::move(t));
  }

  nlohmann::json manifest;
  manifest["preset"] = pr.name;
  manifest["description"] = pr.description;
  manifest["runs"] = runs;
  if (has_sweep)
    manifest["sweep"] = {{"field", pr.sweep_field}, {"values", pr.sweep_values}};
  nlohmann::json pols = nlohmann::json::array();
  for (const auto& pc : pr.policies)
    pols.push_back({{"label", pc.label},
                    {"policy", policy_label(pc.policy)},
                    {"subsidy", subsidy_label(pc.subsidy)},
                    {"swept", pc.swept}});
  manifest["policies"] = std::move(pols);
  manifest["config"] = to_json(pr.base);
  manifest["config_hash"] = config_hash(manifest["config"]);
  manifest["seed"] = pr.base.seed;
  manifest["created_at"] = utc_timestamp();
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& t : bundle.tables) outs.push_back(t.filename);
  manifest["outputs"] = std::move(outs);
  bundle.manifest = std::move(manifest);
  return bundle;
}

ResultsBundle bundle_single(const SimConfig& sc, const AggregateStats& stats) {
  ResultsBundle bundle;
  for (const auto& [name, s] : stats.series) {
    Table t;
    t.filename = name + ".csv";
    t.header = {"round", "mean", "p5", "p95"};
    for (std::size_t i = 0; i < s.mean.size(); ++i)
      t.rows.push_back({std::to_string(stats.initial_rounds + long(i) + 1),
                        fmt_g17(s.mean[i]), fmt_g17(s.p5[i]), fmt_g17(s.p95[i])});
    bundle.tables.push_back(std::move(t));
  }
  {
    Table t;
    t.filename = "pu_frequency.csv";
    t.header = {"group", "freq", "ci_halfwidth", "runs"};
    for (std::size_t g = 0; g < sc.market.groups.size(); ++g) {
      const auto& e = stats.events.at("pu_g" + std::to_string(g));
      t.rows.push_back({sc.market.groups[g].label, fmt_g17(e.freq),
                        fmt_g17(e.ci_halfwidth), std::to_string(stats.runs)});
    }
    bundle.tables.push_back(std::move(t));
  }
  {
    Table t;
    t.filename = "totals.csv";
    t.header = {"name", "mean", "sd", "ci_halfwidth"};
    for (const auto& [name, tot] : stats.totals)
      t.rows.push_back({name, fmt_g17(tot.mean), fmt_g17(tot.sd),
                        fmt_g17(tot.ci_halfwidth)});
    bundle.tables.push_back(std::move(t));
  }

  nlohmann::json manifest;
  manifest["config"] = to_json(sc);
  manifest["config_hash"] = config_hash(manifest["config"]);
  manifest["seed"] = sc.market.seed;
  manifest["created_at"] = utc_timestamp();
  manifest["runs"] = stats.runs;
  manifest["implement_violations"] = stats.implement_violations;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& t : bundle.tables) outs.push_back(t.filename);
  manifest["outputs"] = std::move(outs);
  bundle.manifest = std::move(manifest);
  return bundle;
}

}  // namespace hiresim
