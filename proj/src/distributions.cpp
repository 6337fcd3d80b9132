#include "prophet_lab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prophet_lab/errors.hpp"

namespace prophet_lab {

DiscreteDistribution::DiscreteDistribution(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw BadParams("distribution needs at least one atom");
  std::sort(atoms.begin(), atoms.end());
  double total = 0.0;
  values_.reserve(atoms.size());
  probs_.reserve(atoms.size());
  for (const auto& [v, p] : atoms) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw BadParams("atom value must be finite and >= 0");
    if (!(p > 0.0) || p > 1.0) throw BadParams("atom probability must lie in (0,1]");
    if (!values_.empty() && v == values_.back())
      throw BadParams("atom values must be strictly increasing");
    values_.push_back(v);
    probs_.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw BadParams("atom probabilities must sum to 1");
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return DiscreteDistribution({{value, 1.0}});
}

DiscreteDistribution DiscreteDistribution::bernoulli_value(double lo, double hi, double p_hi) {
  if (p_hi <= 0.0) return point_mass(lo);
  if (p_hi >= 1.0) return point_mass(hi);
  return DiscreteDistribution({{lo, 1.0 - p_hi}, {hi, p_hi}});
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
  return m;
}

double DiscreteDistribution::cdf(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < values_.size() && values_[i] <= x; ++i) s += probs_[i];
  return s;
}

double DiscreteDistribution::prob_below(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < values_.size() && values_[i] < x; ++i) s += probs_[i];
  return s;
}

double DiscreteDistribution::prob_at(double x) const {
  int i = atom_index(x);
  return i < 0 ? 0.0 : probs_[i];
}

double DiscreteDistribution::sample(RngStream& rng) const {
  double u = rng.next_unit();
  double cum = 0.0;
  for (size_t i = 0; i + 1 < values_.size(); ++i) {
    cum += probs_[i];
    if (u < cum) return values_[i];
  }
  return values_.back();
}

int DiscreteDistribution::atom_index(double x) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it == values_.end() || *it != x) return -1;
  return static_cast<int>(it - values_.begin());
}

long long ProductDistribution::joint_support(long long cap) const {
  long long prod = 1;
  for (const auto& d : per_element) {
    prod *= static_cast<long long>(d.size());
    if (prod > cap) return cap + 1;
  }
  return prod;
}

double no_exceed_prob(const DiscreteDistribution& d, const RandomizedThreshold& thr) {
  return d.prob_below(thr.tau) + (1.0 - thr.accept_prob_at_atom) * d.prob_at(thr.tau);
}

DiscreteDistribution truncate(const DiscreteDistribution& d, const RandomizedThreshold& thr) {
  std::vector<std::pair<double, double>> atoms;
  double total = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    double v = d.value(i);
    double p = v < thr.tau  ? d.prob(i)
               : v == thr.tau ? (1.0 - thr.accept_prob_at_atom) * d.prob(i)
                              : 0.0;
    if (p > 0.0) {
      atoms.emplace_back(v, p);
      total += p;
    }
  }
  if (total <= 0.0) throw ZeroMass("conditioning event has zero probability");
  for (auto& [v, p] : atoms) p /= total;
  return DiscreteDistribution(std::move(atoms));
}

namespace {

std::vector<double> union_support(const ProductDistribution& dist) {
  std::vector<double> u;
  for (const auto& d : dist.per_element)
    u.insert(u.end(), d.values().begin(), d.values().end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

double product_cdf(const ProductDistribution& dist, double x) {
  double g = 1.0;
  for (const auto& d : dist.per_element) g *= d.cdf(x);
  return g;
}

}  // namespace

double expected_max(const ProductDistribution& dist) {
  if (dist.per_element.empty()) throw BadParams("expected_max of an empty product");
  std::vector<double> u = union_support(dist);
  double e = 0.0;
  double prev = 0.0;
  for (double v : u) {
    double g = product_cdf(dist, v);
    e += v * (g - prev);
    prev = g;
  }
  return e;
}

double expected_max_enumerated(const ProductDistribution& dist, long long cap) {
  if (dist.per_element.empty()) throw BadParams("expected_max of an empty product");
  if (dist.joint_support(cap) > cap)
    throw TooLarge("joint support exceeds " + std::to_string(cap));
  double e = 0.0;
  auto rec = [&](auto&& self, size_t i, double p, double m) -> void {
    if (i == dist.per_element.size()) {
      e += p * m;
      return;
    }
    const auto& d = dist.per_element[i];
    for (size_t j = 0; j < d.size(); ++j)
      self(self, i + 1, p * d.prob(j), std::max(m, d.value(j)));
  };
  rec(rec, 0, 1.0, 0.0);
  return e;
}

RandomizedThreshold solve_gamma_threshold(const ProductDistribution& dist, double gamma) {
  if (dist.per_element.empty()) throw BadParams("empty product");
  if (!(gamma > 0.0) || gamma > 1.0) throw BadParams("gamma must lie in (0,1]");
  std::vector<double> u = union_support(dist);
  size_t i = 0;
  while (product_cdf(dist, u[i]) < gamma) ++i;  // G(u.back()) == 1 >= gamma
  double tau = u[i];
  if (product_cdf(dist, tau) == gamma) return {tau, 0.0};

  // Split the atoms at tau: h(a) = prod_e (Pr[w_e < tau] + (1-a) Pr[w_e == tau])
  // decreases from G(tau) > gamma at a=0 to G(tau-) < gamma at a=1.
  auto h = [&](double a) {
    double g = 1.0;
    for (const auto& d : dist.per_element)
      g *= d.prob_below(tau) + (1.0 - a) * d.prob_at(tau);
    return g;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = h(mid);
    if (v == gamma) return {tau, mid};
    (v > gamma ? lo : hi) = mid;
  }
  return {tau, 0.5 * (lo + hi)};
}

}  // namespace prophet_lab
