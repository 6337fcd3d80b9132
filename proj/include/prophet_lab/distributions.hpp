#ifndef PROPHET_LAB_DISTRIBUTIONS_HPP
#define PROPHET_LAB_DISTRIBUTIONS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "prophet_lab/rng.hpp"

namespace prophet_lab {

// Finite distribution on nonnegative values. Atoms are kept sorted by value,
// values strictly increasing, probabilities in (0,1] summing to 1 (1e-12).
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::vector<std::pair<double, double>> atoms);

  static DiscreteDistribution point_mass(double value);
  static DiscreteDistribution bernoulli_value(double lo, double hi, double p_hi);

  size_t size() const { return values_.size(); }
  double value(size_t i) const { return values_[i]; }
  double prob(size_t i) const { return probs_[i]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  double mean() const;
  double cdf(double x) const;         // Pr[w <= x]
  double prob_below(double x) const;  // Pr[w <  x]
  double prob_at(double x) const;     // Pr[w == x]
  double max_value() const { return values_.back(); }

  double sample(RngStream& rng) const;
  // Atom index for an exact support value; -1 if absent.
  int atom_index(double x) const;

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
};

// Independent product over the ground set, element i distributed as per_element[i].
struct ProductDistribution {
  std::vector<DiscreteDistribution> per_element;

  size_t size() const { return per_element.size(); }
  const DiscreteDistribution& operator[](size_t i) const { return per_element[i]; }
  // Product of per-element support sizes, saturating at cap+1.
  long long joint_support(long long cap) const;
};

// Threshold with a randomized tie rule: a weight w counts as exceeding when
// w > tau, or w == tau with probability accept_prob_at_atom.
struct RandomizedThreshold {
  double tau = 0.0;
  double accept_prob_at_atom = 0.0;
};

// Pr[w does not exceed thr] under the randomized tie rule.
double no_exceed_prob(const DiscreteDistribution& d, const RandomizedThreshold& thr);

// Conditional law of w given that it does not exceed thr. Throws ZeroMass when
// the conditioning event has zero probability.
DiscreteDistribution truncate(const DiscreteDistribution& d, const RandomizedThreshold& thr);

// E[max_e w_e] via the product-CDF identity over the union support.
double expected_max(const ProductDistribution& dist);
// Same quantity by enumerating the joint support; throws TooLarge above the cap.
double expected_max_enumerated(const ProductDistribution& dist, long long cap = 1000000);

// Smallest (tau, a) under the canonical order such that
// Pr[no element exceeds] == gamma: tau is the smallest union-support value where
// the product CDF reaches or crosses gamma, and a in [0,1] splits the atoms at
// tau to hit gamma exactly. Requires gamma in (0,1].
RandomizedThreshold solve_gamma_threshold(const ProductDistribution& dist, double gamma);

}  // namespace prophet_lab

#endif
