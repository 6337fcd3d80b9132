#ifndef PROPHET_LAB_ANALYSIS_HPP
#define PROPHET_LAB_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "prophet_lab/distributions.hpp"
#include "prophet_lab/feasibility.hpp"
#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"

namespace prophet_lab {

// Violations of the self-bounding property for g(w) = f(w)/tau with weights
// in [0, tau]: dropping one coordinate may not raise g (lower), may not cost
// more than 1 (upper), and the drops may not sum past g itself (sum). All are
// zero for downward-closed families modulo float noise.
struct SelfBoundingViolation {
  double lower = 0.0;
  double upper = 0.0;
  double sum = 0.0;
};

SelfBoundingViolation self_bounding_violations(const FeasibilityFamily& family, double tau,
                                               const std::vector<double>& w);

struct SelfBoundingReport {
  int points = 0;
  SelfBoundingViolation worst;  // componentwise maxima over the sampled points
  bool pass = false;            // every component <= 1e-9
};

// Samples `num_points` weight vectors uniformly from [0, tau]^n and reports
// the worst violation seen.
SelfBoundingReport check_self_bounding(const FeasibilityFamily& family, double tau,
                                       int num_points, uint64_t seed);

struct BlmRow {
  double z = 0.0;
  bool upper_tail = true;  // Pr[g >= E[g] + z]; otherwise Pr[g <= E[g] - z]
  double empirical = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // four binomial standard errors
  bool ok = false;
};

struct BlmReport {
  RandomizedThreshold threshold;
  double e_g = 0.0;  // E[f(core)/tau]
  long long trials = 0;
  std::vector<BlmRow> rows;
  bool pass = false;
};

// Empirical check of the concentration bounds for g = f(core)/tau at the
// gamma-solved threshold: upper tail against exp(-3z^2/(6 E[g] + 2z)), lower
// tail against exp(-z^2/(2 E[g])) for z < E[g]. A row passes when the
// empirical mass stays within four standard errors of its bound.
BlmReport blm_tail_check(const Instance& inst, double gamma, const std::vector<double>& z_grid,
                         long long trials, uint64_t seed);

// One full accounting of the RoE-to-EoR composite on an instance: the branch
// taken, the measured alpha of the optimal-RoE subroutine on the core, the
// two intermediate claims behind the combinatorial branch, and the exact EoR
// against its guaranteed floor.
struct ReductionAudit {
  RandomizedThreshold threshold;
  double core_value = 0.0;  // W = E[f] on the core instance
  bool superstar_branch = false;
  double alpha = 1.0;  // conditional RoE of the subroutine on the core
  double c = 0.0;      // effective c (raised to the constraint if needed)
  double c_required = 0.0;

  double p_exceed = 0.0;      // Pr[f > delta W] on the core
  double exceed_bound = 0.0;  // alpha / k
  double cond_value = 0.0;    // E[a_sub | f <= delta W] on the core
  double cond_bound = 0.0;    // (1 - (delta-1)/k) alpha W

  double eor = 0.0;  // exact EoR of the composite on the original instance
  double floor_superstar = 0.0;      // gamma ln(1/gamma) / (c+1)
  double floor_combinatorial = 0.0;  // (gamma/delta)((k-delta)/k) alpha
  double floor_overall = 0.0;
  bool claims_ok = false;
};

// Builds the composite with an optimal-RoE subroutine on the core, measures
// everything exactly (core joint support capped at 1e6; TooLarge beyond), and
// asserts each claim with 1e-9 slack. params.alpha and params.c are replaced
// by the measured alpha and the matching constraint.
ReductionAudit reduction_audit(const Instance& inst, const ReductionParams& params);

}  // namespace prophet_lab

#endif
