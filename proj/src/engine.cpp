#include "hiresim/engine.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

namespace hiresim {

RadiusParams radius_params_from(const MarketConfig& cfg) {
  RadiusParams rp;
  rp.sigma_eps = cfg.sigma_eps;
  rp.lambda = cfg.lambda_reg;
  rp.delta = cfg.delta;
  rp.s_bound = cfg.skill_bound();
  rp.variant = cfg.radius_variant;
  rp.horizon = cfg.horizon;
  return rp;
}

void validate_pairing(const PolicySpec& pol, SubsidyRule sub) {
  switch (sub) {
    case SubsidyRule::None:
      return;
    case SubsidyRule::UcbIndex:
    case SubsidyRule::UcbCostSaving:
      if (pol.kind != PolicyKind::Ucb)
        throw ConfigError("subsidy", "rule '" + subsidy_label(sub) +
                                         "' requires the ucb policy");
      return;
    case SubsidyRule::HybridIndex:
    case SubsidyRule::HybridCostSaving:
      if (pol.kind != PolicyKind::Hybrid)
        throw ConfigError("subsidy", "rule '" + subsidy_label(sub) +
                                         "' requires the hybrid policy");
      return;
  }
  throw std::logic_error("validate_pairing: unknown rule");
}

RunTrace run_single(const MarketConfig& cfg_in, const PolicySpec& pol, SubsidyRule sub,
                    std::uint32_t run_index, const EngineOptions& opt) {
  const MarketConfig cfg =
      (pol.kind == PolicyKind::WarmStartLF && pol.n0_total >= 0)
          ? with_warm_start(cfg_in, pol.n0_total)
          : cfg_in;
  validate(cfg);
  validate_policy(cfg, pol);
  validate_pairing(pol, sub);

  const StageMode stage =
      is_two_stage(pol.kind) ? StageMode::TwoStage : StageMode::OneStage;
  const RadiusParams rp = radius_params_from(cfg);
  const NormalStream rng(cfg.seed, run_index);
  const int n_groups = int(cfg.groups.size());

  std::vector<GroupPosterior> posts;
  posts.reserve(n_groups);
  for (int g = 0; g < n_groups; ++g)
    posts.push_back(posterior_init(cfg.d, cfg.lambda_reg));

  RunTrace tr;
  tr.initial_rounds = cfg.initial_rounds();
  tr.hires.assign(n_groups, 0);
  tr.hires_total.assign(n_groups, 0);
  if (opt.record_min_eig) tr.min_eig.assign(n_groups, {});
  const int main_rounds = cfg.horizon - tr.initial_rounds;
  if (stage == StageMode::OneStage) tr.regret_inc.reserve(main_rounds);
  tr.subsidy_paid.reserve(main_rounds);
  tr.chosen_group.reserve(main_rounds);

  if (opt.check_coverage) tr.coverage_ok_group.assign(n_groups, 1);
  auto check_coverage = [&] {
    if (!opt.check_coverage) return;
    for (int g = 0; g < n_groups; ++g) {
      if (!tr.coverage_ok_group[g]) continue;
      const VecXd diff = posts[g].theta_hat - cfg.groups[g].theta;
      if (vbar_norm(posts[g], diff) > conf_radius(posts[g], rp)) {
        tr.coverage_ok_group[g] = 0;
        tr.coverage_ok = false;
      }
    }
  };

  // The subsidy framing only makes sense for one-stage decisions; without a
  // subsidy, only the plain-estimate policies coincide with the employer's
  // unassisted choice.
  const bool verify_each_round =
      sub != SubsidyRule::None || pol.kind == PolicyKind::LaissezFaire ||
      pol.kind == PolicyKind::WarmStartLF;

  const auto plan = initial_sampling_plan(cfg);
  std::vector<Candidate> round_buf;
  Candidate lone;
  int n = 1;

  // Forced sampling phase: round n hires one candidate from plan[n-1].
  for (; n <= tr.initial_rounds; ++n) {
    const int g = plan[n - 1];
    const int slot = group_slot_offset(cfg, g);
    const Candidate* c;
    if (opt.warmstart_cost) {
      // Materialize the whole round to price the forced hire against the
      // best current estimate (what a cost-saving subsidy would pay).
      draw_round_into(cfg, rng, std::uint32_t(n), round_buf);
      double best_q = -std::numeric_limits<double>::infinity(), forced_q = 0;
      for (int i = 0; i < int(round_buf.size()); ++i) {
        const double q = predict(posts[round_buf[i].group], round_buf[i].x);
        if (i == slot) forced_q = q;
        best_q = std::max(best_q, q);
      }
      tr.warmstart_cost += best_q - forced_q;
      c = &round_buf[slot];
    } else {
      draw_candidate_into(cfg, rng, std::uint32_t(n), g, std::uint32_t(slot), lone);
      c = &lone;
    }
    posterior_update(posts[g], c->x, realized_skill(*c, stage));
    ++tr.hires_total[g];
    check_coverage();
  }

  for (; n <= cfg.horizon; ++n) {
    draw_round_into(cfg, rng, std::uint32_t(n), round_buf);
    const Decision dec = policy_step(pol, n, round_buf, posts, rp, cfg);
    const SubsidyOutcome s = apply_subsidy(sub, dec);
    if (verify_each_round && !verify_implements(dec, s)) ++tr.implement_violations;

    if (stage == StageMode::OneStage) {
      tr.regret_inc.push_back(regret_step(round_buf, dec.chosen));
    } else {
      tr.u2s_inc.push_back(u2s_step(round_buf, dec.chosen, cfg.k_finalists));
      tr.c2s_inc.push_back(c2s_step(round_buf, dec.chosen, cfg.k_finalists, n_groups));
    }
    tr.subsidy_paid.push_back(s.paid);
    const Candidate& c = round_buf[dec.chosen];
    tr.chosen_group.push_back(c.group);
    ++tr.hires[c.group];
    ++tr.hires_total[c.group];
    posterior_update(posts[c.group], c.x, realized_skill(c, stage));
    check_coverage();
    if (opt.record_min_eig)
      for (int g = 0; g < n_groups; ++g)
        tr.min_eig[g].push_back(min_eigenvalue(posts[g]));
  }
  return tr;
}

std::vector<RunTrace> run_traces(const MarketConfig& cfg, const PolicySpec& pol,
                                 SubsidyRule sub, long runs, int workers,
                                 const EngineOptions& opt) {
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  std::vector<RunTrace> out(runs);
  if (workers < 1) workers = 1;
  if (workers == 1) {
    for (long r = 0; r < runs; ++r)
      out[r] = run_single(cfg, pol, sub, std::uint32_t(r), opt);
    return out;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      const long r = next.fetch_add(1);
      if (r >= runs) return;
      try {
        out[r] = run_single(cfg, pol, sub, std::uint32_t(r), opt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

AggregateStats run_batch(const MarketConfig& cfg, const PolicySpec& pol,
                         SubsidyRule sub, long runs, int workers,
                         const EngineOptions& opt) {
  return aggregate(run_traces(cfg, pol, sub, runs, workers, opt));
}

}  // namespace hiresim
