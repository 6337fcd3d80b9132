#include <cmath>
#include <vector>

#include "doctest.h"
#include "prophet_lab/analysis.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/instances.hpp"

using namespace prophet_lab;

TEST_CASE("self-bounding differences on a single-choice family") {
  auto fam = FeasibilityFamily::single_choice(2);
  SelfBoundingViolation v = self_bounding_violations(fam, 1.0, {0.6, 0.8});
  CHECK(v.lower == 0.0);
  CHECK(v.upper == 0.0);
  CHECK(v.sum == 0.0);

  // Weights above tau break the one-step bound; the checker must see it.
  SelfBoundingViolation bad = self_bounding_violations(fam, 1.0, {2.5, 0.0});
  CHECK(bad.upper == doctest::Approx(1.5).epsilon(1e-12));

  CHECK_THROWS_AS(self_bounding_violations(fam, 0.0, {0.5, 0.5}), BadParams);
  CHECK_THROWS_AS(self_bounding_violations(fam, 1.0, {0.5}), BadParams);
}

TEST_CASE("downward-closed families are self-bounding at every tau") {
  struct Case {
    FeasibilityFamily family;
    double tau;
  };
  std::vector<Case> cases;
  cases.push_back({FeasibilityFamily::single_choice(4), 1.0});
  cases.push_back({FeasibilityFamily::k_uniform(6, 3), 2.0});
  cases.push_back({FeasibilityFamily::partition(6, {{0, 1}, {2, 3}, {4, 5}}), 0.5});
  cases.push_back({gen_pbmp_pairs(2, 2).family, 1.75});
  for (uint64_t seed : {3, 4, 5}) cases.push_back({random_explicit_dc_family(seed), 1.0});

  for (const auto& c : cases) {
    SelfBoundingReport rep = check_self_bounding(c.family, c.tau, 300, 7);
    CHECK(rep.points == 300);
    CHECK(rep.pass);
    CHECK(rep.worst.lower <= 1e-9);
    CHECK(rep.worst.upper <= 1e-9);
    CHECK(rep.worst.sum <= 1e-9);
  }
}

TEST_CASE("tail bounds hold empirically on the paired-blocks instance") {
  Instance inst = gen_example2(4);
  BlmReport rep = blm_tail_check(inst, 0.5, {0.5, 1.0, 3.0}, 20000, 11);
  CHECK(rep.threshold.tau == 2.0);
  double q = std::pow(0.5, 0.25);  // per-random-box no-exceedance factor
  CHECK(rep.threshold.accept_prob_at_atom == doctest::Approx(2.0 - 2.0 * q).epsilon(1e-9));
  double p2 = (q - 0.5) / q;  // P[2] after conditioning below the threshold
  CHECK(rep.e_g == doctest::Approx(2.0 * (1.0 + p2)).epsilon(1e-9));
  CHECK(rep.trials == 20000);
  // Three upper rows, plus lower rows only for z below E[g].
  CHECK(rep.rows.size() == 5);
  int uppers = 0;
  for (const BlmRow& row : rep.rows) {
    CHECK(row.ok);
    CHECK(row.bound > 0.0);
    CHECK(row.slack >= 0.0);  // zero when no trial lands in the tail
    if (row.upper_tail) ++uppers;
  }
  CHECK(uppers == 3);
  CHECK(rep.pass);
}

TEST_CASE("tail check refuses a zero threshold") {
  Instance degenerate = make_instance("zero", FeasibilityFamily::single_choice(1),
                                      {DiscreteDistribution::point_mass(0.0)});
  CHECK_THROWS_AS(blm_tail_check(degenerate, 0.5, {0.5}, 100, 1), BadParams);
}

TEST_CASE("reduction audit, superstar branch") {
  Instance inst = gen_example2(2);
  ReductionAudit audit = reduction_audit(inst, ReductionParams{});
  double s2 = std::sqrt(2.0);
  CHECK(audit.threshold.tau == 2.0);
  CHECK(audit.threshold.accept_prob_at_atom == doctest::Approx(2.0 - s2).epsilon(1e-12));
  CHECK(audit.core_value == doctest::Approx(4.0 - s2).epsilon(1e-12));
  CHECK(audit.alpha == doctest::Approx(2.0 / (4.0 - s2)).epsilon(1e-12));
  CHECK(audit.superstar_branch);  // W <= c tau
  CHECK(audit.c == doctest::Approx(audit.c_required).epsilon(1e-12));
  CHECK(audit.c_required ==
        doctest::Approx(ReductionParams::required_c(2.0, 3.0, audit.alpha)).epsilon(1e-12));

  // Catching the first coin-approved 2: derived by enumerating the four
  // block-value combinations against the tie coins.
  double a = 2.0 - s2;
  double expected_eor = (2.0 * (2.0 / 3.0) * a + (s2 - 1.0)) / 4.0;
  CHECK(audit.eor == doctest::Approx(expected_eor).epsilon(1e-12));

  CHECK(audit.floor_superstar ==
        doctest::Approx(0.5 * std::log(2.0) / (audit.c + 1.0)).epsilon(1e-12));
  CHECK(audit.floor_combinatorial ==
        doctest::Approx(0.25 / 3.0 * audit.alpha).epsilon(1e-12));
  CHECK(audit.floor_overall == std::min(audit.floor_superstar, audit.floor_combinatorial));
  CHECK(audit.eor >= audit.floor_overall - 1e-9);
  CHECK(audit.claims_ok);
}

TEST_CASE("reduction audit, combinatorial branch") {
  std::vector<DiscreteDistribution> d;
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < 8; ++i) {
    d.push_back(DiscreteDistribution::bernoulli_value(0.0, 1.0, 0.5));
    blocks.push_back({i});
  }
  Instance inst = make_instance("eight_coins", FeasibilityFamily::partition(8, blocks),
                                std::move(d));
  ReductionAudit audit = reduction_audit(inst, ReductionParams{});
  CHECK(audit.threshold.tau == 1.0);
  double q = std::pow(2.0, -0.125);
  double p1 = (q - 0.5) / q;
  CHECK(audit.core_value == doctest::Approx(8.0 * p1).epsilon(1e-9));
  CHECK(audit.alpha == doctest::Approx(1.0).epsilon(1e-12));  // the core sub takes every box
  CHECK_FALSE(audit.superstar_branch);  // W > c tau = (8/3) ln 3

  CHECK(audit.p_exceed == doctest::Approx(std::pow(p1, 8)).epsilon(1e-9));
  CHECK(audit.exceed_bound == doctest::Approx(audit.alpha / 3.0).epsilon(1e-12));
  CHECK(audit.p_exceed <= audit.exceed_bound);
  CHECK(audit.cond_bound ==
        doctest::Approx((2.0 / 3.0) * audit.alpha * audit.core_value).epsilon(1e-12));
  CHECK(audit.cond_value >= audit.cond_bound);
  CHECK(audit.floor_overall == audit.floor_combinatorial);  // claims give the larger floor
  CHECK(audit.eor >= audit.floor_overall - 1e-9);
  CHECK(audit.claims_ok);
}

TEST_CASE("reduction audit refuses oversized cores") {
  std::vector<DiscreteDistribution> d(
      21, DiscreteDistribution::bernoulli_value(0.0, 1.0, 0.5));
  Instance inst =
      make_instance("wide", FeasibilityFamily::single_choice(21), std::move(d));
  CHECK_THROWS_AS(reduction_audit(inst, ReductionParams{}), TooLarge);
}
