#include <cmath>
#include <vector>

#include "doctest.h"
#include "prophet_lab/analysis.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"

using namespace prophet_lab;

TEST_CASE("roe_to_eor clears alpha/12 on mixed random instances") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Instance inst = random_mixed_instance(seed);
    CAPTURE(inst.label);
    ReductionAudit audit = reduction_audit(inst, ReductionParams{});
    CHECK(audit.claims_ok);
    CHECK(audit.eor >= audit.alpha / 12.0 - 1e-9);
    CHECK(audit.floor_overall <= audit.alpha / 12.0 + 1e-12);
  }
}

TEST_CASE("eor_to_roe clears alpha/68 on mixed random instances") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Instance inst = random_mixed_instance(seed);
    CAPTURE(inst.label);
    auto sub = optimal_policy(inst, Objective::EoR);
    double alpha = evaluate_exact(inst, *sub).eor;
    PolicyPtr red = eor_to_roe_policy(inst, sub, alpha);
    MetricReport rep = evaluate_exact(inst, *red);
    CHECK(rep.roe >= alpha / 68.0 - 1e-9);
  }
}

TEST_CASE("single-sample composite on one paired block") {
  Instance inst = gen_example2(1);
  PolicyPtr sub = sample_threshold_subroutine(inst);

  bool exact = false;
  double alpha = measure_sample_alpha(inst, sub, 0.5, 1000, 3, &exact);
  CHECK(exact);
  CHECK(alpha == doctest::Approx(0.5).epsilon(1e-12));

  PolicyPtr red = single_sample_roe_to_eor_policy(inst, sub, ReductionParams::defaults(alpha),
                                                  RngStream::keyed(9, 9, 9));
  MetricReport rep = evaluate_exact(inst, *red);
  // Heads wins only when the sample misses the 2 and the real box pays it;
  // tails replays the sample bars. Enumerated by hand over the eight
  // (coin, sample, weight) combinations.
  CHECK(rep.eor == doctest::Approx(7.0 / 16.0).epsilon(1e-12));
  CHECK(rep.eor >= alpha / 144.0 - 1e-9);
}

TEST_CASE("single-sample floor holds with measured alpha on random instances") {
  for (uint64_t seed : {1, 4, 6}) {
    Instance inst = random_single_choice_instance(seed, 4, 2);
    CAPTURE(inst.label);
    PolicyPtr sub = sample_threshold_subroutine(inst);
    bool exact = false;
    double alpha = measure_sample_alpha(inst, sub, 0.5, 200000, 17, &exact);
    CHECK(exact);  // small joint support, probe stays enumerable
    PolicyPtr red = single_sample_roe_to_eor_policy(
        inst, sub, ReductionParams::defaults(std::min(1.0, std::max(alpha, 1e-6))),
        RngStream::keyed(seed, 1, 2));
    MetricReport rep = evaluate_exact(inst, *red);
    CHECK(rep.eor >= alpha / 144.0 - 1e-9);
  }
}

TEST_CASE("eor_to_roe falls back to the subroutine under a flat max") {
  // 70 blocks make E[f] large while the best single box stays near 2, so the
  // half-E[max] bar would be hopeless and the composite must delegate.
  Instance inst = gen_example2(70);
  PolicyPtr sub = per_block_threshold_policy(inst);
  MetricReport sub_rep = evaluate_monte_carlo(inst, *sub, 4000, 21);
  double alpha = sub_rep.eor;
  PolicyPtr red = eor_to_roe_policy(inst, sub, alpha);
  MetricReport red_rep = evaluate_monte_carlo(inst, *red, 4000, 21);
  CHECK(red_rep.expected_value == sub_rep.expected_value);  // verbatim delegation
  CHECK(red_rep.roe == sub_rep.roe);
  CHECK(red_rep.roe >= alpha / 68.0 - 1e-9);
}

TEST_CASE("exact ratio mass at half the mean") {
  // E[ratio] = a with ratio <= 1 forces Pr[ratio >= a/2] >= a/2.
  for (uint64_t seed = 0; seed < 6; ++seed) {
    Instance inst = random_mixed_instance(seed);
    for (const PolicyPtr& pol :
         {always_first_policy(), fixed_threshold_policy(expected_max(inst.dist) / 2.0)}) {
      MetricReport rep = evaluate_exact(inst, *pol);
      double mass = 0.0;
      for (auto [ratio, p] : rep.ratio_distribution)
        if (ratio >= rep.eor / 2.0 - 1e-12) mass += p;
      CHECK(mass >= rep.eor / 2.0 - 1e-9);
    }
  }
}

TEST_CASE("gamma split obeys the single-exceedance lemma") {
  for (uint64_t seed = 20; seed < 25; ++seed) {
    Instance inst = random_mixed_instance(seed);
    for (double gamma : {0.25, 0.5, std::exp(-1.0)}) {
      EventProbs ev = event_probabilities(inst, gamma);
      CHECK(ev.p_core == doctest::Approx(gamma).epsilon(1e-9));
      CHECK(ev.p_tail >= gamma * std::log(1.0 / gamma) - 1e-9);
    }
  }
}
