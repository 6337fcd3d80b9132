#include <cmath>
#include <cstdlib>
#include <limits>

#include "doctest.h"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"

using namespace prophet_lab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RecklessPolicy final : OnlinePolicy {
  RecklessPolicy() : OnlinePolicy("reckless") {}
  bool accept(const TrialContext&) const override { return true; }
};

struct CoyPolicy final : OnlinePolicy {
  CoyPolicy() : OnlinePolicy("coy") {}
  bool accept(const TrialContext& ctx) const override {
    return ctx.selected->can_add(ctx.element);
  }
  bool randomness_declared() const override { return false; }
};

void check_same_metrics(const MetricReport& a, const MetricReport& b) {
  CHECK(a.expected_value == doctest::Approx(b.expected_value).epsilon(1e-11));
  CHECK(a.expected_opt == doctest::Approx(b.expected_opt).epsilon(1e-11));
  CHECK(a.roe == doctest::Approx(b.roe).epsilon(1e-11));
  CHECK(a.eor == doctest::Approx(b.eor).epsilon(1e-11));
  CHECK(a.pbm == doctest::Approx(b.pbm).epsilon(1e-11));
  if (std::isinf(a.eoir) || std::isinf(b.eoir)) {
    CHECK(std::isinf(a.eoir));
    CHECK(std::isinf(b.eoir));
  } else {
    CHECK(a.eoir == doctest::Approx(b.eoir).epsilon(1e-11));
  }
}

}  // namespace

TEST_CASE("closed form agrees with full enumeration") {
  for (uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8}) {
    Instance inst = random_single_choice_instance(seed);
    CAPTURE(inst.label);
    double emax = expected_max(inst.dist);
    for (double frac : {0.3, 0.7}) {
      RandomizedThreshold thr{frac * emax, 0.0};
      MetricReport closed = single_choice_threshold_metrics(inst, thr);
      MetricReport brute = evaluate_exact(inst, *fixed_threshold_policy(thr.tau));
      check_same_metrics(closed, brute);
      CHECK(std::isnan(closed.pbm_p));
      CHECK_FALSE(closed.notes.empty());
    }
    // Randomized tie-breaking at the atom goes through the coin lanes.
    PolicyPtr pol = eor_threshold_policy(inst);
    MetricReport closed = single_choice_threshold_metrics(inst, *pol->threshold_rule());
    MetricReport brute = evaluate_exact(inst, *pol);
    check_same_metrics(closed, brute);
  }
}

TEST_CASE("monte carlo converges to the exact metrics") {
  Instance inst = random_mixed_instance(1);
  PolicyPtr pol = always_first_policy();
  MetricReport ex = evaluate_exact(inst, *pol);
  MetricReport mc = evaluate_monte_carlo(inst, *pol, 40000, 5);
  CHECK(mc.mode == EvalMode::MonteCarlo);
  CHECK(mc.trials == 40000);
  CHECK(mc.seed == 5);
  CHECK(std::abs(mc.expected_value - ex.expected_value) <= 3.0 * mc.ci_ev);
  CHECK(std::abs(mc.eor - ex.eor) <= 3.0 * mc.ci_eor);
  CHECK(std::abs(mc.pbm - ex.pbm) <= 3.0 * mc.ci_pbm);
  CHECK(mc.ci_ev > 0.0);

  MetricReport again = evaluate_monte_carlo(inst, *pol, 40000, 5);
  CHECK(again.expected_value == mc.expected_value);
  CHECK(again.eor == mc.eor);
}

TEST_CASE("monte carlo results do not depend on the thread count") {
  Instance inst = random_single_choice_instance(2);
  PolicyPtr pol = eor_threshold_policy(inst);  // coin lanes exercise lane streams
  setenv("PROPHET_LAB_THREADS", "1", 1);
  MetricReport one = evaluate_monte_carlo(inst, *pol, 20000, 3);
  setenv("PROPHET_LAB_THREADS", "7", 1);
  MetricReport seven = evaluate_monte_carlo(inst, *pol, 20000, 3);
  unsetenv("PROPHET_LAB_THREADS");
  CHECK(one.expected_value == seven.expected_value);
  CHECK(one.eor == seven.eor);
  CHECK(one.pbm == seven.pbm);
  CHECK(one.pbm_p == seven.pbm_p);
  CHECK(one.ci_ev == seven.ci_ev);
}

TEST_CASE("infeasible accepts and undeclared randomness are rejected") {
  Instance inst = gen_example1(0.5);
  RecklessPolicy reckless;
  CHECK_THROWS_AS(evaluate_exact(inst, reckless), PolicyBug);
  CHECK_THROWS_AS(evaluate_monte_carlo(inst, reckless, 100, 1), PolicyBug);

  CoyPolicy coy;
  CHECK_THROWS_AS(evaluate_exact(inst, coy), UndeclaredRandomness);
  MetricReport mc = evaluate_monte_carlo(inst, coy, 5000, 1);
  MetricReport ex = evaluate_exact(inst, *always_first_policy());
  CHECK(std::abs(mc.expected_value - ex.expected_value) <= 3.0 * mc.ci_ev);

  CHECK_THROWS_AS(evaluate_exact(inst, *always_first_policy(), kInf, 1), TooLarge);
}

TEST_CASE("ratio conventions at the degenerate corners") {
  Instance zeros = make_instance("zeros", FeasibilityFamily::single_choice(2),
                                 {DiscreteDistribution::point_mass(0.0),
                                  DiscreteDistribution::point_mass(0.0)});
  MetricReport z = evaluate_exact(zeros, *always_first_policy());
  CHECK(z.roe == 1.0);   // E[f] = 0
  CHECK(z.eor == 1.0);   // f = 0 pointwise
  CHECK(z.eoir == 1.0);
  CHECK(z.pbm == 1.0);

  Instance one = make_instance("one", FeasibilityFamily::single_choice(1),
                               {DiscreteDistribution::point_mass(1.0)});
  MetricReport m = evaluate_exact(one, *fixed_threshold_policy(5.0));
  CHECK(m.expected_value == 0.0);
  CHECK(m.roe == 0.0);
  CHECK(m.eor == 0.0);
  CHECK(std::isinf(m.eoir));  // a = 0 < f
  CHECK(m.pbm == 0.0);
  REQUIRE(m.ratio_distribution.size() == 1);
  CHECK(m.ratio_distribution[0].first == 0.0);
  CHECK(m.ratio_distribution[0].second == 1.0);

  Instance coin = make_instance("coin", FeasibilityFamily::single_choice(1),
                                {DiscreteDistribution::bernoulli_value(0.0, 1.0, 0.5)});
  MetricReport c = evaluate_exact(coin, *always_first_policy());
  CHECK(c.eor == 1.0);  // takes the only box, so a = f even at 0
  CHECK(c.pbm == 1.0);
  CHECK(c.eoir == 1.0);
}

TEST_CASE("ratio distribution carries the full mass") {
  Instance inst = random_mixed_instance(2);
  MetricReport r = evaluate_exact(inst, *always_first_policy());
  double mass = 0.0, mean = 0.0;
  for (auto [ratio, p] : r.ratio_distribution) {
    CHECK(ratio >= 0.0);
    CHECK(ratio <= 1.0 + 1e-12);
    mass += p;
    mean += ratio * p;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(r.eor).epsilon(1e-11));
  CHECK(r.eoir >= 1.0 / r.eor - 1e-9);  // E[X] E[1/X] >= 1
}

TEST_CASE("auto mode picks enumeration, closed form, monte carlo in that order") {
  Instance small = gen_example1(0.5);
  MetricReport a = evaluate_auto(small, *fixed_threshold_policy(1.25), 1000, 1);
  CHECK(a.mode == EvalMode::Exact);

  Instance big = gen_mpower(25, 10.0);  // joint support 2^24 > 1e7
  PolicyPtr thr = fixed_threshold_policy(expected_max(big.dist) / 2.0);
  MetricReport b = evaluate_auto(big, *thr, 1000, 1);
  CHECK(b.mode == EvalMode::Exact);
  CHECK(b.policy_name == thr->name());
  CHECK(std::isnan(b.pbm_p));

  MetricReport c = evaluate_auto(big, *always_first_policy(), 2000, 1);
  CHECK(c.mode == EvalMode::MonteCarlo);
  CHECK(c.trials == 2000);
}

TEST_CASE("event probabilities split core and single exceedance") {
  Instance iid = make_instance("iid", FeasibilityFamily::single_choice(2),
                               {DiscreteDistribution::bernoulli_value(0.0, 1.0, 0.25),
                                DiscreteDistribution::bernoulli_value(0.0, 1.0, 0.25)});
  EventProbs ev = event_probabilities(iid, 0.5625);
  CHECK(ev.p_core == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(ev.p_tail == doctest::Approx(0.375).epsilon(1e-12));  // exactly one of two
  CHECK(ev.p_tail >= 0.5625 * std::log(1.0 / 0.5625) - 1e-9);
}

TEST_CASE("core expectation conditions below the threshold") {
  Instance inst = gen_example2(1);
  bool exact = false;
  double w = core_expectation(inst, {1.5, 0.0}, 1000, 100, 1, &exact);
  CHECK(exact);
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expected optimum picks the right route per family") {
  bool exact = false;
  CHECK(expected_optimum(gen_example2(2), 1000000, 1000, 1, &exact) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(exact);

  Instance ku = make_instance(
      "ku", FeasibilityFamily::k_uniform(3, 2),
      {DiscreteDistribution::point_mass(1.0), DiscreteDistribution::point_mass(2.0),
       DiscreteDistribution::point_mass(3.0)});
  CHECK(expected_optimum(ku, 1000000, 1000, 1, &exact) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(exact);

  CHECK(expected_optimum(gen_pbmp_pairs(2, 2), 1000000, 1000, 1, &exact) ==
        doctest::Approx(2.625).epsilon(1e-12));
  CHECK(exact);

  // Tiny cap forces the sampling route on an enumeration-unfriendly family.
  Instance pairs = gen_pbmp_pairs(2, 2);
  double mc = expected_optimum(pairs, 2, 200000, 11, &exact);
  CHECK_FALSE(exact);
  CHECK(mc == doctest::Approx(2.625).epsilon(0.02));
}

TEST_CASE("per-element match probability on a blocked instance") {
  Instance inst = gen_example2(1);
  PolicyPtr pol = always_first_policy();
  CHECK(pbm_p(inst, *pol, 0, 0) == 0.0);  // never holds the random box when it pays 2
  MetricReport r = evaluate_exact(inst, *pol);
  CHECK(r.pbm == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.pbm_p == 0.0);
}

TEST_CASE("utility caps bend the value stream") {
  Instance inst = gen_risk(0.25);
  PolicyPtr third = select_element_policy(2);
  MetricReport r = evaluate_exact(inst, *third, 8.0);
  CHECK(r.utility_cap == 8.0);
  CHECK(r.expected_value == doctest::Approx(8.0).epsilon(1e-12));    // 32 at quarter odds
  CHECK(r.expected_utility == doctest::Approx(2.0).epsilon(1e-12));  // capped at 8
  CHECK(expected_utility(inst, *third, 8.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("secretary win probabilities") {
  CHECK(secretary_win_probability_exact(4, 1) == doctest::Approx(11.0 / 24.0).epsilon(1e-12));
  CHECK(secretary_win_probability_formula(4, 1) ==
        doctest::Approx(11.0 / 24.0).epsilon(1e-12));
  CHECK(secretary_win_probability_exact(8, 3) ==
        doctest::Approx(secretary_win_probability_formula(8, 3)).epsilon(1e-12));
  CHECK(secretary_win_probability_formula(5, 0) == doctest::Approx(0.2).epsilon(1e-12));

  double formula = secretary_win_probability_formula(100, 36);
  double mc = secretary_win_probability_mc(100, 36, 200000, 2);
  CHECK(std::abs(mc - formula) <= 0.005);

  CHECK_THROWS_AS(secretary_win_probability_formula(4, 4), BadParams);
  CHECK_THROWS_AS(secretary_win_probability_exact(12, 3), TooLarge);  // 10! cap
}

TEST_CASE("reports carry their identity") {
  Instance inst = gen_example1(0.5);
  PolicyPtr pol = always_first_policy();
  MetricReport r = evaluate_exact(inst, *pol);
  CHECK(r.instance_label == inst.label);
  CHECK(r.policy_name == "always_first");
  CHECK(r.mode == EvalMode::Exact);
  CHECK(r.roe == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.eor == doctest::Approx(0.625).epsilon(1e-12));
}
