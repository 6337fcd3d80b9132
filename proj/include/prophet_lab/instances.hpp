#ifndef PROPHET_LAB_INSTANCES_HPP
#define PROPHET_LAB_INSTANCES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "prophet_lab/distributions.hpp"
#include "prophet_lab/feasibility.hpp"

namespace prophet_lab {

// A prophet-inequality instance: independent weight distributions over a
// ground set, a downward-closed feasibility constraint, and an arrival order.
struct Instance {
  std::string label;
  FeasibilityFamily family;
  ProductDistribution dist;
  std::vector<int> arrival_order;  // permutation of 0..n-1

  int n() const { return family.ground_size(); }
  const DiscreteDistribution& d(int e) const { return dist.per_element[e]; }
};

Instance make_instance(std::string label, FeasibilityFamily family,
                       std::vector<DiscreteDistribution> dists,
                       std::vector<int> arrival_order = {});

// Two boxes: a sure 1 and a long shot worth (1+2*eps)/eps with probability eps.
Instance gen_example1(double eps);
// n pairs (sure 1, fifty-fifty 0-or-2), one box per pair, pair members adjacent
// in the arrival order.
Instance gen_example2(int n_pairs);
// Two boxes: a sure 1 and eps^2-or-1/eps^2; the fallback is tiny, not zero.
Instance gen_example3(double eps);
// Two boxes: a sure 1 and 0-or-1/eps; caps every single-choice policy's RoE
// at 1/(2-eps).
Instance gen_roe_ub(double eps);
// Geometric tower: box 1 is a sure 1, box i pays M^(i-1) with probability 1/n.
// Throws Overflow when M^(n-1) > 1e300.
Instance gen_mpower(int n, double M);
// Three boxes (1, 0-or-1/eps, 0-or-2/eps^2) with utility cap 2/eps in the label.
Instance gen_risk(double eps);
// n deterministic boxes worth 1 arriving first, then n boxes uniform on a grid
// inside (1,2); feasible sets pick from at most one (deterministic, random) pair.
Instance gen_pbmp_pairs(int n_pairs, int grid);

// Replaces the target element's law: each atom v splits into v (kept mass 1-x)
// and v + E[sum of all weights]/x (mass x).
Instance bernoulli_boost(const Instance& base, double x, int target_element);

// Conditional instance given that no weight exceeds thr.
Instance truncate_instance(const Instance& base, const RandomizedThreshold& thr);

// Seeded random instances used by test suites; all dyadic-grid values.
Instance random_single_choice_instance(uint64_t seed, int max_n = 6, int max_atoms = 4);
// Rotates single-choice / k-uniform / partition; joint support stays small
// enough for exact policy trees.
Instance random_mixed_instance(uint64_t seed);
FeasibilityFamily random_explicit_dc_family(uint64_t seed, int max_n = 8);

Instance shuffle_arrival_order(const Instance& base, uint64_t seed);

// Generator mini-language, e.g. "example2(n=5)" or
// "boost(base=example2(n=3), x=0.05, target=0)". Throws UnknownGenerator for
// unrecognized names and BadParams for bad arguments.
Instance make_generator(const std::string& spec);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& json_text);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace prophet_lab

#endif
