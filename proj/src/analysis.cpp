#include "prophet_lab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/rng.hpp"

namespace prophet_lab {

SelfBoundingViolation self_bounding_violations(const FeasibilityFamily& family, double tau,
                                               const std::vector<double>& w) {
  if (!(tau > 0.0)) throw BadParams("tau must be positive");
  if (static_cast<int>(w.size()) != family.ground_size())
    throw BadParams("weight vector size does not match the ground set");
  const int n = family.ground_size();
  double g = optimum_value(family, w) / tau;
  SelfBoundingViolation v;
  double drop_sum = 0.0;
  std::vector<double> wz = w;
  for (int e = 0; e < n; ++e) {
    double saved = wz[e];
    wz[e] = 0.0;
    double ge = optimum_value(family, wz) / tau;
    wz[e] = saved;
    v.lower = std::max(v.lower, ge - g);
    v.upper = std::max(v.upper, (g - ge) - 1.0);
    drop_sum += g - ge;
  }
  v.sum = std::max(v.sum, drop_sum - g);
  return v;
}

SelfBoundingReport check_self_bounding(const FeasibilityFamily& family, double tau,
                                       int num_points, uint64_t seed) {
  if (num_points < 1) throw BadParams("need at least one sample point");
  const int n = family.ground_size();
  SelfBoundingReport rep;
  rep.points = num_points;
  std::vector<double> w(n);
  for (int p = 0; p < num_points; ++p) {
    for (int e = 0; e < n; ++e) {
      RngStream s = RngStream::keyed(seed, static_cast<uint64_t>(p), static_cast<uint64_t>(e));
      w[e] = tau * s.next_unit();
    }
    SelfBoundingViolation v = self_bounding_violations(family, tau, w);
    rep.worst.lower = std::max(rep.worst.lower, v.lower);
    rep.worst.upper = std::max(rep.worst.upper, v.upper);
    rep.worst.sum = std::max(rep.worst.sum, v.sum);
  }
  rep.pass = rep.worst.lower <= 1e-9 && rep.worst.upper <= 1e-9 && rep.worst.sum <= 1e-9;
  return rep;
}

BlmReport blm_tail_check(const Instance& inst, double gamma, const std::vector<double>& z_grid,
                         long long trials, uint64_t seed) {
  if (trials < 1) throw BadParams("need at least one trial");
  BlmReport rep;
  rep.threshold = solve_gamma_threshold(inst.dist, gamma);
  if (!(rep.threshold.tau > 0.0))
    throw BadParams("gamma threshold is zero; g = f/tau is undefined");
  rep.trials = trials;
  const double tau = rep.threshold.tau;
  rep.e_g = core_expectation(inst, rep.threshold, 2097152, 200000, seed ^ 0x55) / tau;

  Instance core = truncate_instance(inst, rep.threshold);
  const int n = core.n();
  std::vector<double> g(trials);
  std::vector<double> w(n);
  for (long long t = 0; t < trials; ++t) {
    for (int e = 0; e < n; ++e) {
      RngStream s = RngStream::keyed(seed, static_cast<uint64_t>(t), static_cast<uint64_t>(e));
      w[e] = core.d(e).sample(s);
    }
    g[t] = optimum_value(core.family, w) / tau;
  }

  rep.pass = true;
  for (double z : z_grid) {
    if (!(z > 0.0)) throw BadParams("z grid entries must be positive");
    {
      BlmRow row;
      row.z = z;
      row.upper_tail = true;
      long long hits = 0;
      for (double gi : g)
        if (gi >= rep.e_g + z) ++hits;
      row.empirical = static_cast<double>(hits) / trials;
      row.bound = std::exp(-3.0 * z * z / (6.0 * rep.e_g + 2.0 * z));
      row.slack = 4.0 * std::sqrt(std::max(0.0, row.empirical * (1.0 - row.empirical)) /
                                  static_cast<double>(trials));
      row.ok = row.empirical <= row.bound + row.slack;
      rep.pass = rep.pass && row.ok;
      rep.rows.push_back(row);
    }
    if (z < rep.e_g) {
      BlmRow row;
      row.z = z;
      row.upper_tail = false;
      long long hits = 0;
      for (double gi : g)
        if (gi <= rep.e_g - z) ++hits;
      row.empirical = static_cast<double>(hits) / trials;
      row.bound = std::exp(-z * z / (2.0 * rep.e_g));
      row.slack = 4.0 * std::sqrt(std::max(0.0, row.empirical * (1.0 - row.empirical)) /
                                  static_cast<double>(trials));
      row.ok = row.empirical <= row.bound + row.slack;
      rep.pass = rep.pass && row.ok;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

ReductionAudit reduction_audit(const Instance& inst, const ReductionParams& params) {
  if (!(params.gamma > 0.0) || params.gamma >= 1.0) throw BadParams("gamma must lie in (0,1)");
  if (!(params.delta > 1.0)) throw BadParams("delta must exceed 1");
  if (!(params.k > 2.0)) throw BadParams("k must exceed 2");

  ReductionAudit audit;
  audit.threshold = solve_gamma_threshold(inst.dist, params.gamma);
  Instance core = truncate_instance(inst, audit.threshold);
  auto sub = optimal_policy(core, Objective::RoE);

  MetricReport base = evaluate_exact(core, *sub, std::numeric_limits<double>::infinity(),
                                     1000000);
  audit.core_value = base.expected_opt;
  audit.alpha = base.roe;  // carries the E[f]=0 -> 1 convention

  audit.c_required = ReductionParams::required_c(params.delta, params.k, audit.alpha);
  audit.c = std::max(params.c, audit.c_required);

  // Conditional claims behind the combinatorial branch, on the core law.
  const double cut = params.delta * audit.core_value;
  const int n = core.n();
  std::vector<double> w(n, 0.0), arrival_w(n, 0.0);
  SelectionTracker tracker(core.family);
  double p_le = 0.0, sum_a_le = 0.0;
  auto rec = [&](auto&& self, int t, double p) -> void {
    if (t == n) {
      double f = optimum_value(core.family, w);
      if (f > cut) {
        audit.p_exceed += p;
        return;
      }
      tracker.reset();
      for (int i = 0; i < n; ++i) {
        int e = core.arrival_order[i];
        TrialContext ctx;
        ctx.step = i;
        ctx.element = e;
        ctx.weight = w[e];
        ctx.selected = &tracker;
        ctx.prefix_elements = std::span<const int>(core.arrival_order.data(), i);
        ctx.prefix_weights = std::span<const double>(arrival_w.data(), i);
        if (sub->accept(ctx)) tracker.add(e, w[e]);
      }
      p_le += p;
      sum_a_le += p * tracker.total();
      return;
    }
    int e = core.arrival_order[t];
    const DiscreteDistribution& d = core.d(e);
    for (size_t j = 0; j < d.size(); ++j) {
      w[e] = d.value(j);
      arrival_w[t] = d.value(j);
      self(self, t + 1, p * d.prob(j));
    }
  };
  rec(rec, 0, 1.0);
  audit.exceed_bound = audit.alpha / params.k;
  audit.cond_value = p_le > 0.0 ? sum_a_le / p_le : 0.0;
  audit.cond_bound = (1.0 - (params.delta - 1.0) / params.k) * audit.alpha * audit.core_value;

  ReductionParams eff = params;
  eff.alpha = audit.alpha;
  eff.c = audit.c;
  PolicyPtr composite = roe_to_eor_policy(inst, sub, eff);
  audit.superstar_branch = audit.core_value <= audit.c * audit.threshold.tau;
  audit.eor = evaluate_exact(inst, *composite).eor;

  audit.floor_superstar = params.gamma * std::log(1.0 / params.gamma) / (audit.c + 1.0);
  audit.floor_combinatorial =
      (params.gamma / params.delta) * ((params.k - params.delta) / params.k) * audit.alpha;
  audit.floor_overall = std::min(audit.floor_superstar, audit.floor_combinatorial);

  double branch_floor = audit.superstar_branch ? audit.floor_superstar : audit.floor_combinatorial;
  audit.claims_ok = audit.eor >= branch_floor - 1e-9;
  if (!audit.superstar_branch) {
    audit.claims_ok = audit.claims_ok && audit.p_exceed <= audit.exceed_bound + 1e-9 &&
                      audit.cond_value >= audit.cond_bound - 1e-9;
  }
  return audit;
}

}  // namespace prophet_lab
