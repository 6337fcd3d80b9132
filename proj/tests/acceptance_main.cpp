// Acceptance gate: one line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "prophet_lab/analysis.hpp"
#include "prophet_lab/distributions.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/feasibility.hpp"
#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"
#include "prophet_lab/rng.hpp"

using namespace prophet_lab;

namespace {

struct Row {
  int id = 0;
  bool pass = false;
  std::string text;
};

std::vector<Row> g_rows;
std::vector<MetricReport> g_registry;  // exact reports feeding the ratio-mass lemma
std::vector<std::string> g_single_sample_lines;

void reg(const MetricReport& rep) {
  if (rep.mode == EvalMode::Exact && !rep.ratio_distribution.empty()) g_registry.push_back(rep);
}

std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Row c1_half_mean_threshold() {
  auto t0 = std::chrono::steady_clock::now();
  double min_roe = std::numeric_limits<double>::infinity();
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Instance inst = random_single_choice_instance(seed);
    auto pol = fixed_threshold_policy(expected_max(inst.dist) / 2.0);
    MetricReport rep = single_choice_threshold_metrics(inst, *pol->threshold_rule());
    rep.policy_name = pol->name();
    reg(rep);
    min_roe = std::min(min_roe, rep.roe);
  }
  double secs = seconds_since(t0);
  bool pass = min_roe >= 0.5 - 1e-9 && secs < 5.0;
  return {1, pass,
          fmt("half-mean threshold on 200 random single-choice: min exact RoE=%.9f (need >= 0.5), "
              "%.2fs (cap 5s)",
              min_roe, secs)};
}

Row c2_single_item_roe_ceiling() {
  const double eps = 0.01;
  Instance inst = gen_roe_ub(eps);
  auto pol = optimal_policy(inst, Objective::RoE);
  MetricReport rep = evaluate_exact(inst, *pol);
  reg(rep);
  double cap = 1.0 / (2.0 - eps);
  bool pass = rep.roe <= cap + 1e-9;
  return {2, pass,
          fmt("RoE ceiling at eps=%.2f: optimal exact RoE=%.12f <= 1/(2-eps)=%.12f", eps, rep.roe,
              cap)};
}

Row c3_quantile_stopping_eor() {
  double min_eor = std::numeric_limits<double>::infinity();
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Instance inst = random_single_choice_instance(seed);
    auto pol = eor_threshold_policy(inst);
    MetricReport rep = single_choice_threshold_metrics(inst, *pol->threshold_rule());
    rep.policy_name = pol->name();
    reg(rep);
    min_eor = std::min(min_eor, rep.eor);
  }
  bool pass = min_eor >= 1.0 / std::exp(1.0) - 1e-9;
  return {3, pass,
          fmt("1/e-quantile stopping on the same 200: min exact EoR=%.9f (need >= 1/e=%.9f)",
              min_eor, 1.0 / std::exp(1.0))};
}

Row c4_geometric_tower() {
  const int n = 50;
  const double M = 1e6;
  Instance inst = gen_mpower(n, M);
  std::vector<double> support;
  for (int e = 0; e < inst.n(); ++e)
    for (double v : inst.d(e).values()) support.push_back(v);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  MetricReport best;
  best.eor = -1.0;
  for (double v : support) {
    MetricReport rep = single_choice_threshold_metrics(inst, RandomizedThreshold{v, 0.0});
    reg(rep);
    if (rep.eor > best.eor) best = rep;
  }
  double target = std::pow(1.0 - 1.0 / n, n - 1);
  double tol = 1e-6 + double(n) / M;
  bool close = std::fabs(best.eor - target) <= tol;
  bool pbm_gap = best.eor <= best.pbm + double(n) / M;
  return {4, close && pbm_gap,
          fmt("geometric tower n=%d M=%.0e: best value-threshold EoR=%.9f vs (1-1/n)^(n-1)=%.9f "
              "(tol %.2e), EoR-PbM=%.2e <= n/M=%.2e",
              n, M, best.eor, target, tol, best.eor - best.pbm, double(n) / M)};
}

Row c5_two_box_knife_edge() {
  double worst = 0.0;
  for (double eps : {0.5, 0.1, 0.01}) {
    Instance inst = gen_example1(eps);
    MetricReport thr = evaluate_exact(inst, *fixed_threshold_policy(1.0 + eps / 2.0));
    MetricReport greedy = evaluate_exact(inst, *always_first_policy());
    reg(thr);
    reg(greedy);
    worst = std::max(worst, std::fabs(thr.eor - eps));
    worst = std::max(worst, std::fabs(greedy.eor - ((1.0 - eps) + eps * eps / (1.0 + 2.0 * eps))));
  }
  bool pass = worst <= 1e-12;
  return {5, pass,
          fmt("two-box knife edge at eps=0.5/0.1/0.01: threshold EoR==eps and greedy "
              "EoR==(1-eps)+eps^2/(1+2eps), worst deviation %.2e (tol 1e-12)",
              worst)};
}

Row c6_inverse_ratio_blowup() {
  const double eps = 0.1;
  Instance inst = gen_example3(eps);
  MetricReport rep = evaluate_exact(inst, *always_first_policy());
  reg(rep);
  double eor_target = (1.0 - eps) + eps * eps * eps;
  double roe_target = 1.0 / 10.9;
  bool pass = std::fabs(rep.eor - eor_target) <= 1e-12 &&
              std::fabs(rep.roe - roe_target) <= 1e-12 && rep.eoir >= 1.0 / eps - 1e-9;
  return {6, pass,
          fmt("tiny-fallback blowup at eps=0.1: greedy exact EoR=%.12f (target %.4f), "
              "RoE=%.12f (target 1/10.9), EoIR=%.4f (need >= 10)",
              rep.eor, eor_target, rep.roe, rep.eoir)};
}

Row c7_roe_to_eor_floor() {
  auto t0 = std::chrono::steady_clock::now();
  double min_margin = std::numeric_limits<double>::infinity();
  double min_alpha = std::numeric_limits<double>::infinity();
  int claims_ok = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Instance inst = random_mixed_instance(seed);
    ReductionAudit audit = reduction_audit(inst, ReductionParams{});
    min_margin = std::min(min_margin, audit.eor - audit.alpha / 12.0);
    min_alpha = std::min(min_alpha, audit.alpha);
    claims_ok += audit.claims_ok ? 1 : 0;
  }
  double secs = seconds_since(t0);
  bool pass = min_margin >= -1e-9 && secs < 60.0;
  return {7, pass,
          fmt("RoE-to-EoR composite on 100 mixed instances: min EoR-alpha/12 margin=%.3e "
              "(need >= -1e-9), min alpha=%.4f, audit claims ok %d/100, %.1fs (cap 60s)",
              min_margin, min_alpha, claims_ok, secs)};
}

Row c8_eor_to_roe_floor() {
  double min_margin = std::numeric_limits<double>::infinity();
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Instance inst = random_mixed_instance(seed);
    auto sub = optimal_policy(inst, Objective::EoR);
    MetricReport sub_rep = evaluate_exact(inst, *sub);
    reg(sub_rep);
    // An exact EoR of 1 can overshoot by an ulp; the factory wants (0,1].
    auto red = eor_to_roe_policy(inst, sub, std::min(1.0, sub_rep.eor));
    MetricReport rep = evaluate_exact(inst, *red);
    reg(rep);
    min_margin = std::min(min_margin, rep.roe - sub_rep.eor / 68.0);
  }
  bool pass = min_margin >= -1e-9;
  return {8, pass,
          fmt("EoR-to-RoE composite on 100 mixed instances: min RoE-alpha/68 margin=%.3e "
              "(need >= -1e-9)",
              min_margin)};
}

Row c9_threshold_split() {
  double worst_core = 0.0;
  double min_tail_margin = std::numeric_limits<double>::infinity();
  for (double gamma : {0.1, 0.25, 0.5, std::exp(-1.0), 0.9}) {
    for (uint64_t seed = 0; seed < 50; ++seed) {
      Instance inst = random_mixed_instance(seed);
      EventProbs ev = event_probabilities(inst, gamma);
      worst_core = std::max(worst_core, std::fabs(ev.p_core - gamma));
      min_tail_margin = std::min(min_tail_margin, ev.p_tail - gamma * std::log(1.0 / gamma));
    }
  }
  bool pass = worst_core <= 1e-9 && min_tail_margin >= -1e-9;
  return {9, pass,
          fmt("gamma split over 5 gammas x 50 mixed instances: worst |Pr[core]-gamma|=%.2e "
              "(tol 1e-9), min Pr[one exceedance]-gamma ln(1/gamma)=%.3e (need >= -1e-9)",
              worst_core, min_tail_margin)};
}

Row c10_self_bounding_audit() {
  auto t0 = std::chrono::steady_clock::now();
  struct Fixture {
    FeasibilityFamily family;
    double tau;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({FeasibilityFamily::single_choice(4), 1.0});
  fixtures.push_back({FeasibilityFamily::single_choice(8), 0.7});
  fixtures.push_back({FeasibilityFamily::k_uniform(6, 2), 1.0});
  fixtures.push_back({FeasibilityFamily::k_uniform(9, 4), 2.5});
  fixtures.push_back({FeasibilityFamily::partition(6, {{0, 1}, {2, 3}, {4, 5}}), 1.0});
  fixtures.push_back({FeasibilityFamily::partition(8, {{0, 1, 2}, {3, 4}, {5, 6, 7}}), 0.5});
  for (uint64_t seed = 0; seed < 50; ++seed)
    fixtures.push_back({random_explicit_dc_family(seed), seed % 2 ? 2.0 : 1.0});

  double worst = 0.0;
  bool all_pass = true;
  uint64_t point_seed = 1000;
  for (const Fixture& fx : fixtures) {
    SelfBoundingReport rep = check_self_bounding(fx.family, fx.tau, 1000, point_seed++);
    worst = std::max({worst, rep.worst.lower, rep.worst.upper, rep.worst.sum});
    all_pass = all_pass && rep.pass;
  }
  double secs = seconds_since(t0);
  bool pass = all_pass && worst <= 1e-9 && secs < 30.0;
  return {10, pass,
          fmt("self-bounding audit on %zu families x 1000 points: worst violation=%.2e "
              "(tol 1e-9), %.1fs (cap 30s)",
              fixtures.size(), worst, secs)};
}

Row c11_scaled_tail_bounds() {
  const std::vector<double> grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  BlmReport pairs = blm_tail_check(gen_example2(20), 0.5, grid, 100000, 101);

  std::vector<DiscreteDistribution> coins(20, DiscreteDistribution::bernoulli_value(0, 1, 0.5));
  Instance ku = make_instance("coins20-ku5", FeasibilityFamily::k_uniform(20, 5), coins);
  BlmReport uniform = blm_tail_check(ku, 0.5, grid, 100000, 202);

  double min_slack = std::numeric_limits<double>::infinity();
  for (const BlmReport* rep : {&pairs, &uniform})
    for (const BlmRow& row : rep->rows)
      min_slack = std::min(min_slack, row.bound + row.slack - row.empirical);
  bool pass = pairs.pass && uniform.pass;
  return {11, pass,
          fmt("scaled-optimum tails, 20-pair chain + 20-box 5-uniform, 1e5 trials: "
              "%zu+%zu rows all within bound+4SE (min headroom %.3e)",
              pairs.rows.size(), uniform.rows.size(), min_slack)};
}

Row c12_pair_chain_pbm() {
  double worst = 0.0;
  double min_eor = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 3; ++n) {
    Instance inst = gen_example2(n);
    double target = std::pow(2.0, -n);
    auto opt = optimal_policy(inst, Objective::PbM);
    worst = std::max(worst, std::fabs(opt->optimal_value() - target));
    MetricReport greedy = evaluate_exact(inst, *always_first_policy());
    reg(greedy);
    worst = std::max(worst, std::fabs(greedy.pbm - target));
    min_eor = std::min(min_eor, greedy.eor);
  }
  bool pass = worst <= 1e-12 && min_eor >= 2.0 / 3.0 - 1e-12;
  return {12, pass,
          fmt("pair chain n=1..3: optimal PbM==2^-n and greedy PbM==2^-n (worst dev %.2e), "
              "greedy min EoR=%.6f (need >= 2/3)",
              worst, min_eor)};
}

Row c13_mass_boost() {
  const double x = 0.05;
  Instance base = gen_example2(3);
  Instance boosted = bernoulli_boost(base, x, 0);
  MetricReport target_rep = evaluate_exact(boosted, *select_element_policy(0));
  reg(target_rep);
  double boosted_eor = optimal_policy(boosted, Objective::EoR)->optimal_value();
  double base_eor = optimal_policy(base, Objective::EoR)->optimal_value();
  bool pass = target_rep.roe >= 0.5 - 1e-9 && boosted_eor <= x + base_eor + 1e-9;
  return {13, pass,
          fmt("boost x=%.2f on 3-pair chain: take-target RoE=%.6f (need >= 0.5), optimal EoR "
              "%.6f <= %.6f + x",
              x, target_rep.roe, boosted_eor, base_eor)};
}

Row c14_ratio_mass_lemma() {
  double min_margin = std::numeric_limits<double>::infinity();
  for (const MetricReport& rep : g_registry) {
    double half = rep.eor / 2.0;
    double mass = 0.0;
    for (const auto& [ratio, p] : rep.ratio_distribution)
      if (ratio >= half - 1e-12) mass += p;
    min_margin = std::min(min_margin, mass - half);
  }
  bool pass = min_margin >= -1e-9;
  return {14, pass,
          fmt("ratio-mass lemma over %zu exact reports: min Pr[ratio >= EoR/2] - EoR/2 = %.3e "
              "(need >= -1e-9)",
              g_registry.size(), min_margin)};
}

Row c15_secretary() {
  double exact = secretary_win_probability_exact(4, 1);
  double mc = secretary_win_probability_mc(100, 36, 1000000, 9001);
  bool pass = std::fabs(exact - 11.0 / 24.0) <= 1e-12 && std::fabs(mc - 0.371) <= 0.005;
  return {15, pass,
          fmt("secretary: exact(4,1)=%.12f vs 11/24 (dev %.2e), MC(100,36,1e6)=%.4f within "
              "0.371 +- 0.005",
              exact, exact - 11.0 / 24.0, mc)};
}

Row c16_risk_spike() {
  const double eps = 0.25;
  Instance inst = gen_risk(eps);
  MetricReport rep = evaluate_exact(inst, *select_element_policy(1), 2.0 / eps);
  reg(rep);
  bool pass = std::fabs(rep.expected_utility - 2.0) <= 1e-12 &&
              rep.roe <= std::sqrt(eps) / 2.0 + 1e-9 && rep.eor <= std::sqrt(eps) + 1e-9;
  return {16, pass,
          fmt("risk spike at eps=0.25: pick-second E[util cap 8]=%.12f (target 2), RoE=%.6f "
              "<= 0.25, EoR=%.6f <= 0.5",
              rep.expected_utility, rep.roe, rep.eor)};
}

Row c17_per_element_catch() {
  Instance inst = gen_pbmp_pairs(4, 8);
  double catch_pair = pbm_p(inst, *catch_max_pair_policy(inst), 100000, 31);
  double rand_pair = pbm_p(inst, *random_pair_policy(4), 100000, 32);
  bool pass = catch_pair <= 0.27 && rand_pair <= 0.27;
  return {17, pass,
          fmt("per-element catch floor on 4 pairs (1e5 trials): catch-then-pair=%.4f, "
              "random-pair=%.4f (both <= 1/4 + 0.02)",
              catch_pair, rand_pair)};
}

Row c18_single_sample_floor() {
  double min_margin = std::numeric_limits<double>::infinity();
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Instance inst = random_mixed_instance(seed);
    auto sub = sample_threshold_subroutine(inst);
    bool alpha_exact = false;
    double alpha = measure_sample_alpha(inst, sub, 0.5, 200000, 5000 + seed, &alpha_exact);
    ReductionParams params =
        ReductionParams::defaults(std::min(1.0, std::max(alpha, 1e-9)));
    auto red = single_sample_roe_to_eor_policy(inst, sub, params, RngStream::keyed(77, seed, 0));
    MetricReport rep = evaluate_auto(inst, *red, 200000, 6000 + seed);
    double floor = alpha / 144.0;
    min_margin = std::min(min_margin, rep.eor - floor);
    g_single_sample_lines.push_back(
        fmt("  seed=%llu alpha=%.4f%s eor=%.4f%s eor/(alpha/144)=%.1f",
            (unsigned long long)seed, alpha, alpha_exact ? "" : "~", rep.eor,
            rep.mode == EvalMode::Exact ? "" : "~", floor > 0 ? rep.eor / floor : 0.0));
  }
  bool pass = min_margin >= -1e-9;
  return {18, pass,
          fmt("single-sample composite on 100 mixed instances: min EoR-alpha/144 margin=%.3e "
              "(need >= -1e-9), per-instance ratios below",
              min_margin)};
}

template <typename F>
void run(int id, F&& f) {
  Row row;
  try {
    row = f();
  } catch (const std::exception& ex) {
    row = {id, false, fmt("threw: %s", ex.what())};
  }
  g_rows.push_back(row);
}

}  // namespace

int main() {
  run(1, c1_half_mean_threshold);
  run(2, c2_single_item_roe_ceiling);
  run(3, c3_quantile_stopping_eor);
  run(4, c4_geometric_tower);
  run(5, c5_two_box_knife_edge);
  run(6, c6_inverse_ratio_blowup);
  run(7, c7_roe_to_eor_floor);
  run(8, c8_eor_to_roe_floor);
  run(9, c9_threshold_split);
  run(10, c10_self_bounding_audit);
  run(11, c11_scaled_tail_bounds);
  run(12, c12_pair_chain_pbm);
  run(13, c13_mass_boost);
  run(15, c15_secretary);
  run(16, c16_risk_spike);
  run(17, c17_per_element_catch);
  run(18, c18_single_sample_floor);
  run(14, c14_ratio_mass_lemma);  // last: consumes every exact report registered above

  std::sort(g_rows.begin(), g_rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
  printf("single-sample per-instance floors (~ marks Monte Carlo estimates):\n");
  for (const std::string& line : g_single_sample_lines) printf("%s\n", line.c_str());
  printf("\n");

  int passed = 0;
  for (const Row& row : g_rows) {
    printf("%s [%2d] %s\n", row.pass ? "PASS" : "FAIL", row.id, row.text.c_str());
    passed += row.pass ? 1 : 0;
  }
  printf("acceptance: %d/18 criteria passed\n", passed);
  return passed == 18 ? 0 : 1;
}
