#include "prophet_lab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "prophet_lab/errors.hpp"
#include "prophet_lab/spec_parse.hpp"

namespace prophet_lab {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::vector<int> identity_order(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Raw positive draws scaled so the probabilities sum to exactly 1.
std::vector<double> random_probs(RngStream& rng, int m) {
  std::vector<double> raw(m);
  double total = 0.0;
  for (double& r : raw) {
    r = 0.05 + rng.next_unit();
    total += r;
  }
  std::vector<double> p(m);
  double partial = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    p[i] = raw[i] / total;
    partial += p[i];
  }
  p[m - 1] = 1.0 - partial;
  return p;
}

// Distinct values from the dyadic grid {k/8 : 1 <= k <= 80}.
std::vector<double> random_values(RngStream& rng, int m, bool allow_zero) {
  std::set<int> ks;
  while (static_cast<int>(ks.size()) < m) ks.insert(1 + static_cast<int>(rng.next_below(80)));
  std::vector<double> v;
  for (int k : ks) v.push_back(k / 8.0);
  if (allow_zero && m > 1 && rng.next_unit() < 0.25) v.front() = 0.0;
  return v;
}

DiscreteDistribution random_dist(RngStream& rng, int atoms, bool allow_zero) {
  std::vector<double> v = random_values(rng, atoms, allow_zero);
  std::vector<double> p = random_probs(rng, atoms);
  std::vector<std::pair<double, double>> a;
  for (int i = 0; i < atoms; ++i) a.emplace_back(v[i], p[i]);
  return DiscreteDistribution(std::move(a));
}

}  // namespace

Instance make_instance(std::string label, FeasibilityFamily family,
                       std::vector<DiscreteDistribution> dists,
                       std::vector<int> arrival_order) {
  int n = family.ground_size();
  if (static_cast<int>(dists.size()) != n)
    throw BadParams("need one distribution per ground element");
  if (arrival_order.empty()) arrival_order = identity_order(n);
  if (static_cast<int>(arrival_order.size()) != n)
    throw BadParams("arrival order length mismatch");
  std::vector<char> seen(n, 0);
  for (int e : arrival_order) {
    if (e < 0 || e >= n) throw IndexOutOfRange("arrival order entry " + std::to_string(e));
    if (seen[e]++) throw BadParams("arrival order repeats element " + std::to_string(e));
  }
  return {std::move(label), std::move(family), {std::move(dists)}, std::move(arrival_order)};
}

Instance gen_example1(double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw BadParams("example1 needs eps in (0,1]");
  std::vector<DiscreteDistribution> d;
  d.push_back(DiscreteDistribution::point_mass(1.0));
  d.push_back(DiscreteDistribution::bernoulli_value(0.0, (1.0 + 2.0 * eps) / eps, eps));
  return make_instance("example1(eps=" + num(eps) + ")", FeasibilityFamily::single_choice(2),
                       std::move(d));
}

Instance gen_example2(int n_pairs) {
  if (n_pairs < 1) throw BadParams("example2 needs at least one pair");
  std::vector<DiscreteDistribution> d;
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n_pairs; ++i) {
    d.push_back(DiscreteDistribution::point_mass(1.0));
    d.push_back(DiscreteDistribution::bernoulli_value(0.0, 2.0, 0.5));
    blocks.push_back({2 * i, 2 * i + 1});
  }
  return make_instance("example2(n=" + std::to_string(n_pairs) + ")",
                       FeasibilityFamily::partition(2 * n_pairs, std::move(blocks)),
                       std::move(d));
}

Instance gen_example3(double eps) {
  if (!(eps > 0.0) || eps >= 1.0) throw BadParams("example3 needs eps in (0,1)");
  std::vector<DiscreteDistribution> d;
  d.push_back(DiscreteDistribution::point_mass(1.0));
  d.push_back(DiscreteDistribution::bernoulli_value(eps * eps, 1.0 / (eps * eps), eps));
  return make_instance("example3(eps=" + num(eps) + ")", FeasibilityFamily::single_choice(2),
                       std::move(d));
}

Instance gen_roe_ub(double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw BadParams("roe_ub needs eps in (0,1]");
  std::vector<DiscreteDistribution> d;
  d.push_back(DiscreteDistribution::point_mass(1.0));
  d.push_back(DiscreteDistribution::bernoulli_value(0.0, 1.0 / eps, eps));
  return make_instance("roe_ub(eps=" + num(eps) + ")", FeasibilityFamily::single_choice(2),
                       std::move(d));
}

Instance gen_mpower(int n, double M) {
  if (n < 1) throw BadParams("mpower needs n >= 1");
  if (!(M > 1.0)) throw BadParams("mpower needs M > 1");
  if (static_cast<double>(n - 1) * std::log10(M) > 300.0)
    throw Overflow("top value M^(n-1) exceeds 1e300");
  std::vector<DiscreteDistribution> d;
  d.push_back(DiscreteDistribution::point_mass(1.0));
  for (int i = 1; i < n; ++i)
    d.push_back(DiscreteDistribution::bernoulli_value(0.0, std::pow(M, i), 1.0 / n));
  return make_instance("mpower(n=" + std::to_string(n) + ",M=" + num(M) + ")",
                       FeasibilityFamily::single_choice(n), std::move(d));
}

Instance gen_risk(double eps) {
  if (!(eps > 0.0) || eps >= 1.0) throw BadParams("risk needs eps in (0,1)");
  std::vector<DiscreteDistribution> d;
  d.push_back(DiscreteDistribution::point_mass(1.0));
  d.push_back(DiscreteDistribution::bernoulli_value(0.0, 1.0 / eps, std::sqrt(eps)));
  d.push_back(DiscreteDistribution::bernoulli_value(0.0, 2.0 / (eps * eps), eps));
  return make_instance("risk(eps=" + num(eps) + ",cap=" + num(2.0 / eps) + ")",
                       FeasibilityFamily::single_choice(3), std::move(d));
}

Instance gen_pbmp_pairs(int n_pairs, int grid) {
  if (n_pairs < 1 || n_pairs > 15) throw BadParams("pbmp_pairs needs 1 <= n <= 15");
  if (grid < 1) throw BadParams("pbmp_pairs needs grid >= 1");
  std::vector<DiscreteDistribution> d;
  for (int i = 0; i < n_pairs; ++i) d.push_back(DiscreteDistribution::point_mass(1.0));
  std::vector<std::pair<double, double>> atoms;
  double partial = 0.0;
  for (int j = 0; j < grid; ++j) {
    double p = j + 1 < grid ? 1.0 / grid : 1.0 - partial;
    partial += p;
    atoms.emplace_back(1.0 + (j + 0.5) / grid, p);
  }
  DiscreteDistribution box(atoms);
  std::vector<std::vector<int>> maximal;
  for (int i = 0; i < n_pairs; ++i) {
    d.push_back(box);
    maximal.push_back({i, n_pairs + i});
  }
  return make_instance(
      "pbmp_pairs(n=" + std::to_string(n_pairs) + ",grid=" + std::to_string(grid) + ")",
      FeasibilityFamily::explicit_dc(2 * n_pairs, std::move(maximal)), std::move(d));
}

Instance bernoulli_boost(const Instance& base, double x, int target_element) {
  if (!(x > 0.0) || x > 1.0) throw BadParams("boost needs x in (0,1]");
  if (target_element < 0 || target_element >= base.n())
    throw IndexOutOfRange("boost target " + std::to_string(target_element));
  double sum_means = 0.0;
  for (const auto& d : base.dist.per_element) sum_means += d.mean();
  double lift = sum_means / x;
  std::map<double, double> merged;
  const DiscreteDistribution& t = base.d(target_element);
  for (size_t i = 0; i < t.size(); ++i) {
    if (x < 1.0) merged[t.value(i)] += t.prob(i) * (1.0 - x);
    merged[t.value(i) + lift] += t.prob(i) * x;
  }
  std::vector<std::pair<double, double>> atoms(merged.begin(), merged.end());
  std::vector<DiscreteDistribution> d = base.dist.per_element;
  d[target_element] = DiscreteDistribution(std::move(atoms));
  return make_instance(base.label + "+boost(x=" + num(x) +
                           ",target=" + std::to_string(target_element) + ")",
                       base.family, std::move(d), base.arrival_order);
}

Instance truncate_instance(const Instance& base, const RandomizedThreshold& thr) {
  std::vector<DiscreteDistribution> d;
  for (const auto& dist : base.dist.per_element) d.push_back(truncate(dist, thr));
  return make_instance(base.label + "|core(tau=" + num(thr.tau) + ")", base.family, std::move(d),
                       base.arrival_order);
}

Instance random_single_choice_instance(uint64_t seed, int max_n, int max_atoms) {
  if (max_n < 2 || max_atoms < 1) throw BadParams("random instance bounds too small");
  RngStream rng = RngStream::keyed(seed, 0xA5C, 0);
  int n = 2 + static_cast<int>(rng.next_below(max_n - 1));
  std::vector<DiscreteDistribution> d;
  for (int e = 0; e < n; ++e)
    d.push_back(random_dist(rng, 1 + static_cast<int>(rng.next_below(max_atoms)), e > 0));
  return make_instance("rand_sc(seed=" + std::to_string(seed) + ")",
                       FeasibilityFamily::single_choice(n), std::move(d));
}

Instance random_mixed_instance(uint64_t seed) {
  RngStream rng = RngStream::keyed(seed, 0x314, 0);
  int kind = static_cast<int>(seed % 3);
  FeasibilityFamily family = FeasibilityFamily::single_choice(1);
  int n = 0, max_atoms = 3, min_atoms = 2;
  if (kind == 0) {
    n = 3 + static_cast<int>(rng.next_below(4));
    family = FeasibilityFamily::single_choice(n);
    min_atoms = 1;
    max_atoms = 4;
  } else if (kind == 1) {
    n = 4 + static_cast<int>(rng.next_below(3));
    family = FeasibilityFamily::k_uniform(n, 2 + static_cast<int>(rng.next_below(2)));
  } else {
    n = 4 + static_cast<int>(rng.next_below(3));
    std::vector<std::vector<int>> blocks;
    int e = 0;
    while (e < n) {
      int size = std::min<int>(n - e, 2 + static_cast<int>(rng.next_below(2)));
      if (n - e - size == 1) size = n - e;  // no singleton remainder unless forced
      std::vector<int> b;
      for (int i = 0; i < size; ++i) b.push_back(e++);
      blocks.push_back(std::move(b));
    }
    family = FeasibilityFamily::partition(n, std::move(blocks));
  }
  std::vector<DiscreteDistribution> d;
  for (int e = 0; e < n; ++e) {
    int atoms = min_atoms + static_cast<int>(rng.next_below(max_atoms - min_atoms + 1));
    d.push_back(random_dist(rng, atoms, e > 0));
  }
  return make_instance("rand_mix(seed=" + std::to_string(seed) + ")", std::move(family),
                       std::move(d));
}

FeasibilityFamily random_explicit_dc_family(uint64_t seed, int max_n) {
  if (max_n < 3 || max_n > 30) throw BadParams("explicit family bound out of range");
  RngStream rng = RngStream::keyed(seed, 0xDC, 0);
  int n = 3 + static_cast<int>(rng.next_below(max_n - 2));
  int count = 1 + static_cast<int>(rng.next_below(4));
  std::vector<uint64_t> masks;
  for (int i = 0; i < count; ++i)
    masks.push_back(1 + rng.next_below((1ULL << n) - 1));
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<uint64_t> kept;
  for (uint64_t m : masks) {
    bool dominated = false;
    for (uint64_t other : masks)
      if (other != m && (m & ~other) == 0) dominated = true;
    if (!dominated) kept.push_back(m);
  }
  std::vector<std::vector<int>> sets;
  for (uint64_t m : kept) {
    std::vector<int> s;
    for (int e = 0; e < n; ++e)
      if (m & (1ULL << e)) s.push_back(e);
    sets.push_back(std::move(s));
  }
  return FeasibilityFamily::explicit_dc(n, std::move(sets));
}

Instance shuffle_arrival_order(const Instance& base, uint64_t seed) {
  RngStream rng = RngStream::keyed(seed, 0x0AD, 1);
  std::vector<int> order = base.arrival_order;
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
    std::swap(order[i], order[rng.next_below(i + 1)]);
  return make_instance(base.label + "|shuffled(seed=" + std::to_string(seed) + ")", base.family,
                       base.dist.per_element, std::move(order));
}

Instance make_generator(const std::string& spec) {
  CallSpec call = parse_call(spec);
  const std::string& g = call.name;
  if (g == "example1") return gen_example1(call.require_double("eps"));
  if (g == "example2") return gen_example2(call.require_int("n"));
  if (g == "example3") return gen_example3(call.require_double("eps"));
  if (g == "roe_ub") return gen_roe_ub(call.require_double("eps"));
  if (g == "mpower") return gen_mpower(call.require_int("n"), call.require_double("M"));
  if (g == "risk") return gen_risk(call.require_double("eps"));
  if (g == "pbmp_pairs")
    return gen_pbmp_pairs(call.require_int("n"), call.require_int("grid"));
  if (g == "boost")
    return bernoulli_boost(make_generator(call.require_string("base")),
                           call.require_double("x"), call.require_int("target"));
  if (g == "rand_sc")
    return random_single_choice_instance(call.require_int("seed"), call.get_int("max_n", 6),
                                         call.get_int("max_atoms", 4));
  if (g == "rand_mix") return random_mixed_instance(call.require_int("seed"));
  throw UnknownGenerator("no generator named '" + g + "'");
}

namespace {

using nlohmann::json;

json family_to_json(const FeasibilityFamily& f) {
  json j;
  switch (f.kind()) {
    case FeasibilityFamily::Kind::SingleChoice:
      j["variant"] = "single_choice";
      break;
    case FeasibilityFamily::Kind::KUniform:
      j["variant"] = "k_uniform";
      j["k"] = f.k();
      break;
    case FeasibilityFamily::Kind::Partition:
      j["variant"] = "partition";
      j["blocks"] = f.blocks();
      break;
    case FeasibilityFamily::Kind::ExplicitDC:
      j["variant"] = "explicit_dc";
      j["maximal_sets"] = f.maximal_sets();
      break;
  }
  return j;
}

FeasibilityFamily family_from_json(const json& j, int n) {
  std::string variant = j.at("variant").get<std::string>();
  if (variant == "single_choice") return FeasibilityFamily::single_choice(n);
  if (variant == "k_uniform") return FeasibilityFamily::k_uniform(n, j.at("k").get<int>());
  if (variant == "partition")
    return FeasibilityFamily::partition(n, j.at("blocks").get<std::vector<std::vector<int>>>());
  if (variant == "explicit_dc")
    return FeasibilityFamily::explicit_dc(
        n, j.at("maximal_sets").get<std::vector<std::vector<int>>>());
  throw BadParams("unknown family variant '" + variant + "'");
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  j["label"] = inst.label;
  j["family"] = family_to_json(inst.family);
  j["arrival_order"] = inst.arrival_order;
  json dists = json::array();
  for (const auto& d : inst.dist.per_element) {
    json atoms = json::array();
    for (size_t i = 0; i < d.size(); ++i) atoms.push_back({d.value(i), d.prob(i)});
    dists.push_back({{"atoms", atoms}});
  }
  j["distributions"] = dists;
  return j.dump(2);
}

Instance instance_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw BadParams(std::string("invalid instance JSON: ") + e.what());
  }
  try {
    std::vector<DiscreteDistribution> dists;
    for (const auto& dj : j.at("distributions")) {
      std::vector<std::pair<double, double>> atoms;
      for (const auto& aj : dj.at("atoms"))
        atoms.emplace_back(aj.at(0).get<double>(), aj.at(1).get<double>());
      dists.push_back(DiscreteDistribution(std::move(atoms)));
    }
    int n = static_cast<int>(dists.size());
    FeasibilityFamily family = family_from_json(j.at("family"), n);
    std::vector<int> order;
    if (j.contains("arrival_order")) order = j.at("arrival_order").get<std::vector<int>>();
    std::string label = j.value("label", "unlabeled");
    return make_instance(std::move(label), std::move(family), std::move(dists),
                         std::move(order));
  } catch (const json::exception& e) {
    throw BadParams(std::string("invalid instance JSON: ") + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BadParams("cannot open '" + path + "' for writing");
  out << instance_to_json(inst) << "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadParams("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace prophet_lab
