#ifndef PROPHET_LAB_POLICIES_HPP
#define PROPHET_LAB_POLICIES_HPP

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prophet_lab/distributions.hpp"
#include "prophet_lab/feasibility.hpp"
#include "prophet_lab/instances.hpp"

namespace prophet_lab {

// What a policy sees when element `element` arrives with weight `weight`.
// `lanes` carries the realized values of the policy's declared randomness,
// in the order given by lanes().
struct TrialContext {
  int step = 0;
  int element = 0;
  double weight = 0.0;
  const SelectionTracker* selected = nullptr;
  std::span<const int> prefix_elements;
  std::span<const double> prefix_weights;
  std::span<const double> lanes;
};

// Stateless online selection rule. A policy must never accept an element the
// current selection cannot absorb; the harness treats such an accept as a bug.
// All policy objects are immutable after construction and safe to share
// across threads.
class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;

  virtual bool accept(const TrialContext& ctx) const = 0;

  // Distributions of the policy's internal randomness. Exact evaluation
  // integrates over their joint support; Monte Carlo samples them per trial.
  virtual const std::vector<DiscreteDistribution>& lanes() const;

  // Set when the policy is exactly "accept the first exceedance of thr" on a
  // single-choice instance, enabling the closed-form evaluator.
  virtual std::optional<RandomizedThreshold> threshold_rule() const { return std::nullopt; }

  // False marks a policy whose randomness is not captured by lanes(); exact
  // evaluation refuses such policies.
  virtual bool randomness_declared() const { return true; }

  const std::string& name() const { return name_; }

 protected:
  explicit OnlinePolicy(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

using PolicyPtr = std::shared_ptr<const OnlinePolicy>;

// Accepts the first feasible weight strictly above T (every feasible
// exceedance under multi-choice families).
PolicyPtr fixed_threshold_policy(double T);

// Single-choice rule that accepts the first weight exceeding the threshold
// solved from Pr[no exceedance] = 1/e; atom ties are resolved by per-element
// coins with the solved acceptance probability. WrongFamily otherwise.
PolicyPtr eor_threshold_policy(const Instance& inst);

// Accepts whenever feasible.
PolicyPtr always_first_policy();

// Accepts exactly the given ground element (when feasible).
PolicyPtr select_element_policy(int element);

// Classical secretary rule: observe the first r arrivals, then accept the
// first weight beating everything seen so far.
PolicyPtr secretary_policy(int n, int r);

// Partition families only: within each block, accept the first weight
// strictly above E[block max]/2.
PolicyPtr per_block_threshold_policy(const Instance& inst);

// Accepts elements of the given (deterministic, random) pair on a pair
// instance with ground set {0..2p-1} and pairs {i, p+i}.
PolicyPtr select_pair_policy(int pair, int n_pairs);
// Picks the pair uniformly at random (declared lane).
PolicyPtr random_pair_policy(int n_pairs);
// Runs a 1/e max-catching threshold over all boxes and keeps the one caught.
PolicyPtr catch_max_pair_policy(const Instance& inst);

enum class Objective { RoE, EoR, PbM };
std::string objective_name(Objective obj);

// Backward-induction optimum for the given objective over deterministic
// adaptive policies. The decision tree (joint weight support) is capped at
// 1e6 leaves; TooLarge beyond that.
class OptimalPolicy;
std::shared_ptr<const OptimalPolicy> optimal_policy(const Instance& inst, Objective obj);

class OptimalPolicy : public OnlinePolicy {
 public:
  bool accept(const TrialContext& ctx) const override;
  // Exact objective value achieved on the instance it was built for.
  double optimal_value() const;
  Objective objective() const;
  ~OptimalPolicy() override;

 private:
  friend std::shared_ptr<const OptimalPolicy> optimal_policy(const Instance&, Objective);
  struct Impl;
  explicit OptimalPolicy(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// Knobs shared by the ratio reductions. Defaults: gamma=1/2, delta=2, k=3,
// c = (8/3) ln(3/alpha), the smallest c the superstar constraint allows.
struct ReductionParams {
  double gamma = 0.5;
  double delta = 2.0;
  double k = 3.0;
  double c = 0.0;
  double alpha = 1.0;

  static double required_c(double delta, double k, double alpha);
  static ReductionParams defaults(double alpha);
  void validate() const;  // BadParams on violation
};

// RoE-to-EoR composite. The subroutine must be a policy for the truncated
// (core) instance; its conditional performance there is the alpha that the
// guarantee min{gamma ln(1/gamma)/(c+1), alpha/12} refers to.
PolicyPtr roe_to_eor_policy(const Instance& inst, PolicyPtr core_subroutine,
                            const ReductionParams& params);

// EoR-to-RoE composite: one high bar when the max is within a factor 34 of
// its share of E[f], otherwise the subroutine verbatim. Guarantee alpha/68.
PolicyPtr eor_to_roe_policy(const Instance& inst, PolicyPtr subroutine, double alpha);

// Single-sample variant: a fair coin picks between "beat the best sample
// strictly" and a sample-driven subroutine. The sample vector is declared
// randomness (lane i+1 is element i's sample); `rng` only seeds the fallback
// realization used if a caller invokes the policy without lanes.
PolicyPtr single_sample_roe_to_eor_policy(const Instance& inst, PolicyPtr sample_subroutine,
                                          const ReductionParams& params, RngStream rng);

// Sample-driven subroutine: reads lanes [0, n) as the sample vector and beats
// family-appropriate sample statistics (max overall, k-th largest, per-block
// max).
PolicyPtr sample_threshold_subroutine(const Instance& inst);

// Conditional RoE of a sample-driven subroutine on the core event at `gamma`,
// with samples drawn from the original laws. This is the measured alpha for
// the single-sample reduction.
double measure_sample_alpha(const Instance& inst, PolicyPtr sample_subroutine, double gamma,
                            long long mc_trials, uint64_t seed, bool* exact = nullptr);

// Policy mini-language, e.g. "fixed_threshold(T=1.25)", "optimal_roe",
// "roe_to_eor(sub=optimal_roe,gamma=0.5,delta=2,k=3)". Composite specs build
// their subroutines recursively and measure alpha when it is not supplied.
PolicyPtr parse_policy(const std::string& spec, const Instance& inst);

}  // namespace prophet_lab

#endif
