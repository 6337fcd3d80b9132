#ifndef PROPHET_LAB_EVALUATION_HPP
#define PROPHET_LAB_EVALUATION_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"

namespace prophet_lab {

enum class EvalMode { Exact, MonteCarlo };

// Conventions: ratio := 1 when f(w) = 0; inverse ratio := +inf when a = 0 < f;
// RoE := 1 when E[f] = 0. PbM counts outcomes with |a - f| <= 1e-12 max(1, f).
struct MetricReport {
  std::string instance_label;
  std::string policy_name;
  EvalMode mode = EvalMode::Exact;
  long long trials = 0;  // outcomes enumerated (exact) or sampled (MC)
  uint64_t seed = 0;

  double expected_value = 0.0;  // E[a]
  double expected_opt = 0.0;    // E[f]
  double roe = 0.0;
  double eor = 0.0;
  double eoir = 0.0;
  double pbm = 0.0;
  double pbm_p = 0.0;  // min over elements of Pr[e in ALG | e in OPT]
  double expected_utility = 0.0;
  double utility_cap = 0.0;

  // Exact mode: support of a/f with probabilities, ascending, summing to 1.
  std::vector<std::pair<double, double>> ratio_distribution;

  // 95% normal-approximation half-widths; zero in exact mode. The roe and
  // eoir widths are first-order propagations of the mean CIs.
  double ci_ev = 0, ci_eopt = 0, ci_roe = 0, ci_eor = 0, ci_eoir = 0, ci_pbm = 0, ci_pbm_p = 0;

  std::string notes;
};

// Integrates policy value over the joint support of weights and declared
// lanes. Throws TooLarge above `outcome_cap` and UndeclaredRandomness if the
// policy cannot be integrated.
MetricReport evaluate_exact(const Instance& inst, const OnlinePolicy& policy,
                            double utility_cap = std::numeric_limits<double>::infinity(),
                            long long outcome_cap = 10000000);

// Counter-based seeded trials; identical results for any thread count.
// Thread count is capped by the PROPHET_LAB_THREADS environment variable.
MetricReport evaluate_monte_carlo(const Instance& inst, const OnlinePolicy& policy,
                                  long long trials, uint64_t seed,
                                  double utility_cap = std::numeric_limits<double>::infinity());

// Exact when the outcome count fits; otherwise the single-choice closed form
// when the policy is a threshold rule; otherwise Monte Carlo.
MetricReport evaluate_auto(const Instance& inst, const OnlinePolicy& policy,
                           long long mc_trials, uint64_t seed,
                           double utility_cap = std::numeric_limits<double>::infinity());

// Closed-form exact metrics for "accept the first exceedance of thr" on a
// single-choice instance of any size (pbm_p is not produced: NaN).
MetricReport single_choice_threshold_metrics(const Instance& inst,
                                             const RandomizedThreshold& thr);

struct EventProbs {
  RandomizedThreshold threshold;
  double p_core = 0.0;  // no element exceeds
  double p_tail = 0.0;  // exactly one element exceeds
};
// Exact closed forms at the gamma-solved threshold; p_core == gamma by
// construction (within solver tolerance).
EventProbs event_probabilities(const Instance& inst, double gamma);

// E[f(w core)] for the instance truncated at thr: closed forms for
// single-choice and partition, joint enumeration up to exact_cap otherwise,
// then Monte Carlo with mc_trials draws (seeded); *exact reports which.
double core_expectation(const Instance& inst, const RandomizedThreshold& thr,
                        long long exact_cap = 1000000, long long mc_trials = 100000,
                        uint64_t seed = 17, bool* exact = nullptr);

// E[f(w)] with the same dispatch as core_expectation.
double expected_optimum(const Instance& inst, long long exact_cap = 1000000,
                        long long mc_trials = 100000, uint64_t seed = 17,
                        bool* exact = nullptr);

// Pr[e in ALG | e in OPT] minimized over elements with Pr[e in OPT] > 0.
// trials = 0 requests exact evaluation.
double pbm_p(const Instance& inst, const OnlinePolicy& policy, long long trials,
             uint64_t seed);

// E[min(a, cap)], exact where the support fits.
double expected_utility(const Instance& inst, const OnlinePolicy& policy, double cap);

// Secretary win probabilities with n distinct values in random order.
double secretary_win_probability_formula(int n, int r);
double secretary_win_probability_exact(int n, int r);  // permutation enumeration, n <= 10
double secretary_win_probability_mc(int n, int r, long long trials, uint64_t seed);

// Worker cap from PROPHET_LAB_THREADS (default: hardware concurrency, <= 16).
int max_threads();

// Harness tie rule: a matches f when |a - f| <= 1e-12 max(1, f).
bool value_matches_opt(double a, double f);

}  // namespace prophet_lab

#endif
