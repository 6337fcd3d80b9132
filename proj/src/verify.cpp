#include "prophet_lab/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "prophet_lab/analysis.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"

namespace prophet_lab {

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

std::vector<CheckResult> run_verify_suite(const std::string& suite, uint64_t seed) {
  std::vector<CheckResult> out;
  auto add = [&](const char* name, const std::function<void(CheckResult&)>& body) {
    CheckResult r;
    r.name = name;
    try {
      body(r);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = ex.what();
    }
    out.push_back(std::move(r));
  };
  const bool all = suite == "all";

  if (all || suite == "distributions") {
    add("truncate-renormalizes", [](CheckResult& r) {
      DiscreteDistribution d({{0.0, 0.5}, {2.0, 0.25}, {4.0, 0.25}});
      DiscreteDistribution t = truncate(d, {2.0, 0.0});
      r.pass = t.size() == 2 && close(t.prob(0), 2.0 / 3.0, 1e-12) &&
               close(t.prob(1), 1.0 / 3.0, 1e-12) && t.value(1) == 2.0;
      r.detail = fmt("kept mass %.6g at %.6g", t.prob(1), t.value(1));
    });
    add("gamma-solver-atom-coin", [](CheckResult& r) {
      ProductDistribution pd{{DiscreteDistribution({{1.0, 1.0}})}};
      RandomizedThreshold thr = solve_gamma_threshold(pd, 0.25);
      double q = no_exceed_prob(pd.per_element[0], thr);
      r.pass = thr.tau == 1.0 && close(thr.accept_prob_at_atom, 0.75, 1e-9) &&
               close(q, 0.25, 1e-9);
      r.detail = fmt("tau=%.6g a=%.6g", thr.tau, thr.accept_prob_at_atom);
    });
    add("gamma-solver-support-hit", [](CheckResult& r) {
      DiscreteDistribution d({{0.0, 0.5}, {1.0, 0.5}});
      ProductDistribution pd{{d, d}};
      RandomizedThreshold thr = solve_gamma_threshold(pd, 0.25);
      r.pass = thr.tau == 0.0 && thr.accept_prob_at_atom == 0.0;
      r.detail = fmt("tau=%.6g a=%.6g", thr.tau, thr.accept_prob_at_atom);
    });
    add("expected-max-two-routes", [seed](CheckResult& r) {
      Instance inst = random_single_choice_instance(seed);
      double fast = expected_max(inst.dist);
      double slow = expected_max_enumerated(inst.dist);
      r.pass = close(fast, slow, 1e-12 * std::max(1.0, std::abs(slow)));
      r.detail = fmt("cdf route %.12g, enumeration %.12g", fast, slow);
    });
    add("sampling-frequency", [seed](CheckResult& r) {
      DiscreteDistribution d = DiscreteDistribution::bernoulli_value(0.0, 1.0, 0.3);
      const long long trials = 200000;
      long long hits = 0;
      for (long long t = 0; t < trials; ++t) {
        RngStream s = RngStream::keyed(seed, static_cast<uint64_t>(t), 0);
        if (d.sample(s) == 1.0) ++hits;
      }
      double p = static_cast<double>(hits) / trials;
      double band = 4.0 * std::sqrt(0.3 * 0.7 / trials);
      r.pass = close(p, 0.3, band);
      r.detail = fmt("freq %.4f vs 0.3 +- %.4f", p, band);
    });
  }

  if (all || suite == "feasibility") {
    add("optimum-lex-tiebreak", [](CheckResult& r) {
      auto fam = FeasibilityFamily::k_uniform(2, 2);
      OptimumResult a = offline_optimum(fam, {0.0, 5.0});
      auto fam3 = FeasibilityFamily::k_uniform(3, 2);
      OptimumResult b = offline_optimum(fam3, {5.0, 0.0, 0.0});
      r.pass = a.set == std::vector<int>{0, 1} && b.set == std::vector<int>{0};
      r.detail = "zero-weight completions resolved toward smaller indices";
    });
    add("nested-antichain-rejected", [](CheckResult& r) {
      try {
        FeasibilityFamily::explicit_dc(2, {{0}, {0, 1}});
        r.pass = false;
        r.detail = "nested maximal sets were accepted";
      } catch (const MalformedFamily&) {
        r.pass = true;
        r.detail = "MalformedFamily raised";
      }
    });
    add("partition-optimum", [](CheckResult& r) {
      auto fam = FeasibilityFamily::partition(3, {{0, 1}, {2}});
      OptimumResult o = offline_optimum(fam, {1.0, 3.0, 2.0});
      r.pass = o.value == 5.0 && (o.set == std::vector<int>{1, 2});
      r.detail = fmt("block maxima total %.6g (want %.6g)", o.value, 5.0);
    });
    add("subsets-stay-feasible", [seed](CheckResult& r) {
      FeasibilityFamily fam = random_explicit_dc_family(seed);
      r.pass = true;
      int tested = 0;
      for (const auto& m : fam.maximal_sets()) {
        const int sz = static_cast<int>(m.size());
        for (int mask = 0; mask < (1 << sz); ++mask) {
          std::vector<int> subset;
          for (int i = 0; i < sz; ++i)
            if (mask & (1 << i)) subset.push_back(m[i]);
          if (!is_feasible(fam, subset)) r.pass = false;
          ++tested;
        }
      }
      r.detail = fmt("%.0f subsets of %.0f maximal sets", static_cast<double>(tested),
                     static_cast<double>(fam.maximal_sets().size()));
    });
  }

  if (all || suite == "instances") {
    add("json-round-trip", [](CheckResult& r) {
      Instance inst = gen_example2(2);
      std::string s1 = instance_to_json(inst);
      std::string s2 = instance_to_json(instance_from_json(s1));
      r.pass = s1 == s2;
      r.detail = r.pass ? "serialized form is a fixed point" : "round trip changed bytes";
    });
    add("generator-language", [](CheckResult& r) {
      Instance inst = make_generator("example1(eps=0.5)");
      const DiscreteDistribution& d = inst.d(1);
      r.pass = inst.n() == 2 && d.size() == 2 && d.value(1) == 4.0 &&
               close(d.prob(1), 0.5, 1e-12);
      r.detail = fmt("second box tops out at %.6g w.p. %.6g", d.value(1), d.prob(1));
    });
    add("mpower-overflow-guard", [](CheckResult& r) {
      try {
        gen_mpower(200, 1e6);
        r.pass = false;
        r.detail = "no overflow raised for M^199";
      } catch (const Overflow&) {
        r.pass = true;
        r.detail = "Overflow raised";
      }
    });
    add("boost-splits-target", [](CheckResult& r) {
      Instance boosted = bernoulli_boost(gen_example2(1), 0.05, 0);
      const DiscreteDistribution& d = boosted.d(0);
      // Base sum of means is 2, so the heavy atom lands at 1 + 2/0.05.
      r.pass = d.size() == 2 && close(d.prob(0), 0.95, 1e-12) && d.value(0) == 1.0 &&
               close(d.value(1), 41.0, 1e-9) && close(d.prob(1), 0.05, 1e-12);
      r.detail = fmt("atoms at 1 and %.6g, heavy mass %.6g", d.value(1), d.prob(1));
    });
  }

  if (all || suite == "policies") {
    add("threshold-is-strict", [](CheckResult& r) {
      Instance inst = make_instance("unit", FeasibilityFamily::single_choice(1),
                                    {DiscreteDistribution::point_mass(1.0)}, {0});
      double at = evaluate_exact(inst, *fixed_threshold_policy(1.0)).expected_value;
      double below = evaluate_exact(inst, *fixed_threshold_policy(0.5)).expected_value;
      r.pass = at == 0.0 && below == 1.0;
      r.detail = fmt("value %.6g at the bar, %.6g below it", at, below);
    });
    add("eor-threshold-family-guard", [](CheckResult& r) {
      Instance inst = random_mixed_instance(1);  // kind 1: k-uniform
      try {
        eor_threshold_policy(inst);
        r.pass = false;
        r.detail = "k-uniform instance accepted";
      } catch (const WrongFamily&) {
        r.pass = true;
        r.detail = "WrongFamily raised";
      }
    });
    add("optimal-dominates-heuristics", [seed](CheckResult& r) {
      Instance inst = random_single_choice_instance(seed, 4, 3);
      double best = evaluate_exact(inst, *optimal_policy(inst, Objective::EoR)).eor;
      double naive = evaluate_exact(inst, *always_first_policy()).eor;
      double half = evaluate_exact(
                        inst, *fixed_threshold_policy(expected_max(inst.dist) / 2.0))
                        .eor;
      r.pass = best >= naive - 1e-9 && best >= half - 1e-9;
      r.detail = fmt("optimal %.6g vs best heuristic %.6g", best, std::max(naive, half));
    });
    add("policy-language", [](CheckResult& r) {
      Instance inst = gen_example2(1);
      PolicyPtr p = parse_policy("fixed_threshold(T=1.25)", inst);
      bool unknown_caught = false;
      try {
        parse_policy("no_such_policy", inst);
      } catch (const BadParams&) {
        unknown_caught = true;
      }
      r.pass = p->name() == "fixed_threshold(T=1.25)" && unknown_caught;
      r.detail = "parsed " + p->name();
    });
  }

  if (all || suite == "evaluation") {
    add("exact-vs-monte-carlo", [seed](CheckResult& r) {
      Instance inst = random_mixed_instance(seed % 97);
      auto pol = always_first_policy();
      MetricReport ex = evaluate_exact(inst, *pol);
      MetricReport mc = evaluate_monte_carlo(inst, *pol, 40000, seed);
      double tol = 5.0 * std::max(mc.ci_ev, 1e-3);
      r.pass = close(ex.expected_value, mc.expected_value, tol);
      r.detail = fmt("exact %.6g, sampled %.6g", ex.expected_value, mc.expected_value);
    });
    add("closed-form-vs-enumeration", [seed](CheckResult& r) {
      Instance inst = random_single_choice_instance(seed + 1, 4, 3);
      RandomizedThreshold thr{expected_max(inst.dist) / 2.0, 0.0};
      MetricReport cf = single_choice_threshold_metrics(inst, thr);
      MetricReport en = evaluate_exact(inst, *fixed_threshold_policy(thr.tau));
      r.pass = close(cf.expected_value, en.expected_value, 1e-9) &&
               close(cf.eor, en.eor, 1e-9) && close(cf.pbm, en.pbm, 1e-9);
      r.detail = fmt("eor %.9g vs %.9g", cf.eor, en.eor);
    });
    add("event-probabilities", [](CheckResult& r) {
      DiscreteDistribution d({{0.0, 0.5}, {1.0, 0.5}});
      Instance two = make_instance("iid2", FeasibilityFamily::single_choice(2), {d, d}, {0, 1});
      EventProbs ep = event_probabilities(two, 0.25);
      r.pass = close(ep.p_core, 0.25, 1e-9) && close(ep.p_tail, 0.5, 1e-9);
      r.detail = fmt("core %.6g, single-exceedance %.6g", ep.p_core, ep.p_tail);
    });
    add("ratio-mass-accounting", [seed](CheckResult& r) {
      Instance inst = random_mixed_instance(seed % 31);
      MetricReport rep = evaluate_exact(inst, *always_first_policy());
      double mass = 0.0, mean = 0.0;
      for (auto [ratio, p] : rep.ratio_distribution) {
        mass += p;
        mean += ratio * p;
      }
      r.pass = close(mass, 1.0, 1e-9) && close(mean, rep.eor, 1e-9);
      r.detail = fmt("mass %.12g, mean %.12g", mass, mean);
    });
    add("secretary-formula-vs-enumeration", [](CheckResult& r) {
      double ex = secretary_win_probability_exact(6, 2);
      double fo = secretary_win_probability_formula(6, 2);
      r.pass = close(ex, fo, 1e-12);
      r.detail = fmt("enumeration %.12g, formula %.12g", ex, fo);
    });
  }

  if (all || suite == "analysis") {
    add("self-bounding-k-uniform", [seed](CheckResult& r) {
      SelfBoundingReport rep =
          check_self_bounding(FeasibilityFamily::k_uniform(5, 2), 1.0, 200, seed);
      r.pass = rep.pass;
      r.detail = fmt("worst upper %.3g, worst sum %.3g", rep.worst.upper, rep.worst.sum);
    });
    add("blm-tails", [seed](CheckResult& r) {
      BlmReport rep = blm_tail_check(gen_example2(4), 0.5, {0.5, 1.0, 2.0}, 20000, seed);
      r.pass = rep.pass;
      r.detail = fmt("E[g]=%.4g over %.0f rows", rep.e_g, static_cast<double>(rep.rows.size()));
    });
  }

  if (all || suite == "reductions") {
    add("roe-to-eor-floor", [](CheckResult& r) {
      ReductionParams p;
      p.c = ReductionParams::required_c(p.delta, p.k, 1e-3);
      ReductionAudit audit = reduction_audit(gen_example2(2), p);
      r.pass = audit.claims_ok;
      r.detail = fmt("eor %.6g, branch floor at least %.6g", audit.eor, audit.floor_overall);
    });
    add("eor-to-roe-floor", [seed](CheckResult& r) {
      Instance inst = random_single_choice_instance(seed + 2, 4, 3);
      auto sub = optimal_policy(inst, Objective::EoR);
      double alpha = evaluate_exact(inst, *sub).eor;
      PolicyPtr comp = eor_to_roe_policy(inst, sub, alpha);
      double roe = evaluate_exact(inst, *comp).roe;
      r.pass = roe >= alpha / 68.0 - 1e-9;
      r.detail = fmt("roe %.6g vs floor %.6g", roe, alpha / 68.0);
    });
    add("single-sample-floor", [seed](CheckResult& r) {
      Instance inst = random_single_choice_instance(seed + 3, 3, 3);
      PolicyPtr sub = sample_threshold_subroutine(inst);
      double alpha = measure_sample_alpha(inst, sub, 0.5, 0, seed);
      ReductionParams p = ReductionParams::defaults(std::max(alpha, 1e-6));
      PolicyPtr comp = single_sample_roe_to_eor_policy(inst, sub, p,
                                                       RngStream::keyed(seed, 9, 9));
      double eor = evaluate_exact(inst, *comp).eor;
      r.pass = eor >= alpha / 144.0 - 1e-9;
      r.detail = fmt("eor %.6g vs floor %.6g", eor, alpha / 144.0);
    });
  }

  if (out.empty()) throw BadParams("unknown verify suite: " + suite);
  return out;
}

}  // namespace prophet_lab
