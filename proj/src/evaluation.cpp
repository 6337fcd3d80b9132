#include "prophet_lab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "prophet_lab/errors.hpp"

namespace prophet_lab {

bool value_matches_opt(double a, double f) {
  return std::abs(a - f) <= 1e-12 * std::max(1.0, f);
}

int max_threads() {
  if (const char* env = std::getenv("PROPHET_LAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return std::clamp<int>(static_cast<int>(hw), 1, 16);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_of(double a, double f) { return f == 0.0 ? 1.0 : a / f; }

double inverse_ratio_of(double a, double f) {
  if (a == 0.0) return f == 0.0 ? 1.0 : kInf;
  return f / a;
}

struct Moments {
  double sum = 0.0, sumsq = 0.0;
  void add(double x, double weight) {
    sum += weight * x;
    sumsq += weight * x * x;
  }
  double ci(long long trials) const {
    if (trials < 2) return 0.0;
    double mean = sum / trials;
    double var = std::max(0.0, sumsq / trials - mean * mean);
    return 1.96 * std::sqrt(var / trials);
  }
};

}  // namespace

MetricReport evaluate_exact(const Instance& inst, const OnlinePolicy& policy,
                            double utility_cap, long long outcome_cap) {
  if (!policy.randomness_declared())
    throw UndeclaredRandomness("policy '" + policy.name() + "' cannot be integrated exactly");
  const int n = inst.n();
  const auto& lanes = policy.lanes();
  long long wj = inst.dist.joint_support(outcome_cap);
  ProductDistribution lane_dist{lanes};
  long long lj = lanes.empty() ? 1 : lane_dist.joint_support(outcome_cap);
  if (wj > outcome_cap || lj > outcome_cap || wj * lj > outcome_cap)
    throw TooLarge("outcome count exceeds " + std::to_string(outcome_cap));

  MetricReport rep;
  rep.instance_label = inst.label;
  rep.policy_name = policy.name();
  rep.mode = EvalMode::Exact;
  rep.trials = wj * lj;
  rep.utility_cap = utility_cap;

  std::vector<double> w(n, 0.0);
  std::vector<double> arrival_w(n, 0.0);
  std::vector<double> lane_vals(lanes.size(), 0.0);
  std::vector<double> opt_in(n, 0.0), both(n, 0.0);
  std::map<double, double> ratio_dist;
  SelectionTracker tracker(inst.family);
  bool eoir_inf = false;
  double eoir_fin = 0.0;

  // Innermost: one fully realized outcome.
  auto run_policy = [&](double p, const OptimumResult& opt) {
    tracker.reset();
    for (int t = 0; t < n; ++t) {
      int e = inst.arrival_order[t];
      TrialContext ctx;
      ctx.step = t;
      ctx.element = e;
      ctx.weight = w[e];
      ctx.selected = &tracker;
      ctx.prefix_elements = std::span<const int>(inst.arrival_order.data(), t);
      ctx.prefix_weights = std::span<const double>(arrival_w.data(), t);
      ctx.lanes = std::span<const double>(lane_vals.data(), lane_vals.size());
      if (policy.accept(ctx)) {
        if (!tracker.can_add(e))
          throw PolicyBug("policy '" + policy.name() + "' accepted an infeasible element");
        tracker.add(e, w[e]);
      }
    }
    double a = tracker.total();
    double f = opt.value;
    rep.expected_value += p * a;
    double r = ratio_of(a, f);
    rep.eor += p * r;
    ratio_dist[r] += p;
    if (value_matches_opt(a, f)) rep.pbm += p;
    double ir = inverse_ratio_of(a, f);
    if (ir == kInf)
      eoir_inf = true;
    else
      eoir_fin += p * ir;
    rep.expected_utility += p * std::min(a, utility_cap);
    for (int e : opt.set) {
      opt_in[e] += p;
      if (tracker.contains(e)) both[e] += p;
    }
  };

  auto lane_rec = [&](auto&& self, size_t i, double p, const OptimumResult& opt) -> void {
    if (i == lanes.size()) {
      run_policy(p, opt);
      return;
    }
    const DiscreteDistribution& d = lanes[i];
    for (size_t j = 0; j < d.size(); ++j) {
      lane_vals[i] = d.value(j);
      self(self, i + 1, p * d.prob(j), opt);
    }
  };

  auto weight_rec = [&](auto&& self, int t, double p) -> void {
    if (t == n) {
      OptimumResult opt = offline_optimum(inst.family, w);
      rep.expected_opt += p * opt.value;
      lane_rec(lane_rec, 0, p, opt);
      return;
    }
    int e = inst.arrival_order[t];
    const DiscreteDistribution& d = inst.d(e);
    for (size_t j = 0; j < d.size(); ++j) {
      w[e] = d.value(j);
      arrival_w[t] = d.value(j);
      self(self, t + 1, p * d.prob(j));
    }
  };
  weight_rec(weight_rec, 0, 1.0);

  rep.eoir = eoir_inf ? kInf : eoir_fin;
  rep.roe = rep.expected_opt > 0.0 ? rep.expected_value / rep.expected_opt : 1.0;
  rep.pbm_p = 1.0;
  for (int e = 0; e < n; ++e)
    if (opt_in[e] > 0.0) rep.pbm_p = std::min(rep.pbm_p, both[e] / opt_in[e]);
  rep.ratio_distribution.assign(ratio_dist.begin(), ratio_dist.end());
  return rep;
}

namespace {

struct ChunkAccum {
  Moments ev, eopt, eor, eoir, util;
  double pbm = 0.0;
  long long eoir_inf = 0;
  std::vector<long long> opt_in, both;
  long long count = 0;
};

}  // namespace

MetricReport evaluate_monte_carlo(const Instance& inst, const OnlinePolicy& policy,
                                  long long trials, uint64_t seed, double utility_cap) {
  if (trials < 1) throw BadParams("need at least one trial");
  const int n = inst.n();
  const auto& lanes = policy.lanes();

  constexpr long long kChunk = 4096;
  long long n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<ChunkAccum> chunks(n_chunks);

  auto run_chunk = [&](long long ci) {
    ChunkAccum& acc = chunks[ci];
    acc.opt_in.assign(n, 0);
    acc.both.assign(n, 0);
    std::vector<double> w(n), arrival_w(n), lane_vals(lanes.size());
    SelectionTracker tracker(inst.family);
    long long lo = ci * kChunk, hi = std::min(trials, lo + kChunk);
    for (long long t = lo; t < hi; ++t) {
      for (int e = 0; e < n; ++e) {
        RngStream s = RngStream::keyed(seed, static_cast<uint64_t>(t), static_cast<uint64_t>(e));
        w[e] = inst.d(e).sample(s);
      }
      for (size_t j = 0; j < lanes.size(); ++j) {
        RngStream s =
            RngStream::keyed(seed, static_cast<uint64_t>(t), static_cast<uint64_t>(n + j));
        lane_vals[j] = lanes[j].sample(s);
      }
      for (int i = 0; i < n; ++i) arrival_w[i] = w[inst.arrival_order[i]];
      tracker.reset();
      for (int i = 0; i < n; ++i) {
        int e = inst.arrival_order[i];
        TrialContext ctx;
        ctx.step = i;
        ctx.element = e;
        ctx.weight = w[e];
        ctx.selected = &tracker;
        ctx.prefix_elements = std::span<const int>(inst.arrival_order.data(), i);
        ctx.prefix_weights = std::span<const double>(arrival_w.data(), i);
        ctx.lanes = std::span<const double>(lane_vals.data(), lane_vals.size());
        if (policy.accept(ctx)) {
          if (!tracker.can_add(e))
            throw PolicyBug("policy '" + policy.name() + "' accepted an infeasible element");
          tracker.add(e, w[e]);
        }
      }
      double a = tracker.total();
      OptimumResult opt = offline_optimum(inst.family, w);
      double f = opt.value;
      acc.ev.add(a, 1.0);
      acc.eopt.add(f, 1.0);
      acc.eor.add(ratio_of(a, f), 1.0);
      double ir = inverse_ratio_of(a, f);
      if (ir == kInf)
        ++acc.eoir_inf;
      else
        acc.eoir.add(ir, 1.0);
      if (value_matches_opt(a, f)) acc.pbm += 1.0;
      acc.util.add(std::min(a, utility_cap), 1.0);
      for (int e : opt.set) {
        ++acc.opt_in[e];
        if (tracker.contains(e)) ++acc.both[e];
      }
      ++acc.count;
    }
  };

  int workers = static_cast<int>(std::min<long long>(max_threads(), n_chunks));
  if (workers <= 1) {
    for (long long ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&, wkr] {
        try {
          for (long long ci = wkr; ci < n_chunks; ci += workers) run_chunk(ci);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  // Deterministic combine in chunk order.
  ChunkAccum total;
  total.opt_in.assign(n, 0);
  total.both.assign(n, 0);
  for (const ChunkAccum& c : chunks) {
    total.ev.sum += c.ev.sum;
    total.ev.sumsq += c.ev.sumsq;
    total.eopt.sum += c.eopt.sum;
    total.eopt.sumsq += c.eopt.sumsq;
    total.eor.sum += c.eor.sum;
    total.eor.sumsq += c.eor.sumsq;
    total.eoir.sum += c.eoir.sum;
    total.eoir.sumsq += c.eoir.sumsq;
    total.util.sum += c.util.sum;
    total.util.sumsq += c.util.sumsq;
    total.pbm += c.pbm;
    total.eoir_inf += c.eoir_inf;
    total.count += c.count;
    for (int e = 0; e < n; ++e) {
      total.opt_in[e] += c.opt_in[e];
      total.both[e] += c.both[e];
    }
  }

  MetricReport rep;
  rep.instance_label = inst.label;
  rep.policy_name = policy.name();
  rep.mode = EvalMode::MonteCarlo;
  rep.trials = trials;
  rep.seed = seed;
  rep.utility_cap = utility_cap;
  rep.expected_value = total.ev.sum / trials;
  rep.expected_opt = total.eopt.sum / trials;
  rep.roe = rep.expected_opt > 0.0 ? rep.expected_value / rep.expected_opt : 1.0;
  rep.eor = total.eor.sum / trials;
  rep.eoir = total.eoir_inf > 0 ? kInf : total.eoir.sum / trials;
  rep.pbm = total.pbm / trials;
  rep.expected_utility = total.util.sum / trials;
  rep.ci_ev = total.ev.ci(trials);
  rep.ci_eopt = total.eopt.ci(trials);
  rep.ci_eor = total.eor.ci(trials);
  rep.ci_eoir = total.eoir_inf > 0 ? 0.0 : total.eoir.ci(trials);
  rep.ci_pbm = 1.96 * std::sqrt(std::max(0.0, rep.pbm * (1.0 - rep.pbm)) / trials);
  if (rep.expected_value > 0.0 && rep.expected_opt > 0.0)
    rep.ci_roe = rep.roe * std::sqrt(std::pow(rep.ci_ev / rep.expected_value, 2) +
                                     std::pow(rep.ci_eopt / rep.expected_opt, 2));
  rep.pbm_p = 1.0;
  long long worst_n = 0;
  for (int e = 0; e < n; ++e) {
    if (total.opt_in[e] > 0) {
      double r = static_cast<double>(total.both[e]) / total.opt_in[e];
      if (r < rep.pbm_p) {
        rep.pbm_p = r;
        worst_n = total.opt_in[e];
      }
    }
  }
  if (worst_n > 0)
    rep.ci_pbm_p = 1.96 * std::sqrt(std::max(0.0, rep.pbm_p * (1.0 - rep.pbm_p)) / worst_n);
  return rep;
}

MetricReport single_choice_threshold_metrics(const Instance& inst,
                                             const RandomizedThreshold& thr) {
  if (inst.family.kind() != FeasibilityFamily::Kind::SingleChoice)
    throw WrongFamily("threshold closed form requires a single-choice instance");
  const int n = inst.n();

  // Union support, with 0 so an empty max has a bucket.
  std::vector<double> u{0.0};
  for (const auto& d : inst.dist.per_element)
    u.insert(u.end(), d.values().begin(), d.values().end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const size_t V = u.size();

  std::vector<const DiscreteDistribution*> arr;
  for (int t = 0; t < n; ++t) arr.push_back(&inst.d(inst.arrival_order[t]));

  std::vector<double> q(n);        // Pr[no exceedance]
  std::vector<double> zq(n);       // Pr[w == 0 and no exceedance]
  for (int t = 0; t < n; ++t) {
    q[t] = no_exceed_prob(*arr[t], thr);
    double p0 = arr[t]->prob_at(0.0);
    zq[t] = 0.0 < thr.tau ? p0 : (thr.tau == 0.0 ? (1.0 - thr.accept_prob_at_atom) * p0 : 0.0);
  }

  // Per element: cdf over u unconditioned, and conditioned on no exceedance.
  std::vector<std::vector<double>> cdf(n, std::vector<double>(V));
  std::vector<std::vector<double>> cdf_cond(n, std::vector<double>(V));
  for (int t = 0; t < n; ++t) {
    for (size_t i = 0; i < V; ++i) {
      cdf[t][i] = arr[t]->cdf(u[i]);
      double kept = 0.0;  // Pr[w <= u[i] and no exceedance]
      for (size_t j = 0; j < arr[t]->size() && arr[t]->value(j) <= u[i]; ++j) {
        double v = arr[t]->value(j);
        if (v < thr.tau)
          kept += arr[t]->prob(j);
        else if (v == thr.tau)
          kept += (1.0 - thr.accept_prob_at_atom) * arr[t]->prob(j);
      }
      cdf_cond[t][i] = q[t] > 0.0 ? kept / q[t] : 1.0;
    }
  }

  MetricReport rep;
  rep.instance_label = inst.label;
  rep.policy_name = "threshold(tau=" + std::to_string(thr.tau) + ")";
  rep.mode = EvalMode::Exact;
  rep.utility_cap = kInf;
  rep.expected_opt = expected_max(inst.dist);
  std::map<double, double> ratio_dist;
  bool eoir_inf = false;
  double eoir_fin = 0.0;

  double prefix_q = 1.0;
  std::vector<double> cdf_r(V);
  for (int t = 0; t < n && prefix_q > 0.0; ++t) {
    // Distribution of the best competing weight, prefix conditioned on
    // non-exceedance, suffix unconditioned.
    for (size_t i = 0; i < V; ++i) {
      double g = 1.0;
      for (int j = 0; j < t; ++j) g *= cdf_cond[j][i];
      for (int j = t + 1; j < n; ++j) g *= cdf[j][i];
      cdf_r[i] = g;
    }
    for (size_t j = 0; j < arr[t]->size(); ++j) {
      double v = arr[t]->value(j);
      double pacc = v > thr.tau            ? arr[t]->prob(j)
                    : v == thr.tau          ? thr.accept_prob_at_atom * arr[t]->prob(j)
                                            : 0.0;
      if (pacc <= 0.0) continue;
      double base = prefix_q * pacc;
      double prev = 0.0;
      for (size_t i = 0; i < V; ++i) {
        double pr = std::max(0.0, cdf_r[i] - prev);
        prev = cdf_r[i];
        if (pr <= 0.0) continue;
        double p = base * pr;
        double r = u[i];
        double f = std::max(v, r);
        rep.expected_value += p * v;
        double rat = ratio_of(v, f);
        rep.eor += p * rat;
        ratio_dist[rat] += p;
        if (value_matches_opt(v, f)) rep.pbm += p;
        double ir = inverse_ratio_of(v, f);
        if (ir == kInf)
          eoir_inf = true;
        else
          eoir_fin += p * ir;
        rep.expected_utility += p * v;
      }
    }
    prefix_q *= q[t];
  }

  // No acceptance at all: ratio is 1 exactly when every weight is zero.
  double q_all = 1.0, p_zero = 1.0;
  for (int t = 0; t < n; ++t) {
    q_all *= q[t];
    p_zero *= zq[t];
  }
  double p_miss = std::max(0.0, q_all - p_zero);
  if (p_zero > 0.0) {
    rep.eor += p_zero;
    ratio_dist[1.0] += p_zero;
    rep.pbm += p_zero;
    eoir_fin += p_zero;
  }
  if (p_miss > 0.0) {
    ratio_dist[0.0] += p_miss;
    eoir_inf = true;
  }

  rep.eoir = eoir_inf ? kInf : eoir_fin;
  rep.roe = rep.expected_opt > 0.0 ? rep.expected_value / rep.expected_opt : 1.0;
  rep.pbm_p = std::numeric_limits<double>::quiet_NaN();
  rep.notes = "closed form; pbm_p not computed";
  rep.ratio_distribution.assign(ratio_dist.begin(), ratio_dist.end());
  return rep;
}

MetricReport evaluate_auto(const Instance& inst, const OnlinePolicy& policy,
                           long long mc_trials, uint64_t seed, double utility_cap) {
  const long long cap = 10000000;
  const auto& lanes = policy.lanes();
  long long wj = inst.dist.joint_support(cap);
  ProductDistribution lane_dist{lanes};
  long long lj = lanes.empty() ? 1 : lane_dist.joint_support(cap);
  if (wj <= cap && lj <= cap && wj * lj <= cap)
    return evaluate_exact(inst, policy, utility_cap, cap);
  if (inst.family.kind() == FeasibilityFamily::Kind::SingleChoice) {
    if (auto rule = policy.threshold_rule()) {
      MetricReport rep = single_choice_threshold_metrics(inst, *rule);
      rep.policy_name = policy.name();
      return rep;
    }
  }
  return evaluate_monte_carlo(inst, policy, mc_trials, seed, utility_cap);
}

EventProbs event_probabilities(const Instance& inst, double gamma) {
  EventProbs out;
  out.threshold = solve_gamma_threshold(inst.dist, gamma);
  const int n = inst.n();
  std::vector<double> q(n);
  for (int e = 0; e < n; ++e) q[e] = no_exceed_prob(inst.d(e), out.threshold);
  std::vector<double> pre(n + 1, 1.0), suf(n + 1, 1.0);
  for (int e = 0; e < n; ++e) pre[e + 1] = pre[e] * q[e];
  for (int e = n - 1; e >= 0; --e) suf[e] = suf[e + 1] * q[e];
  out.p_core = pre[n];
  for (int e = 0; e < n; ++e) out.p_tail += (1.0 - q[e]) * pre[e] * suf[e + 1];
  return out;
}

namespace {

double enumerate_expected_opt(const Instance& inst) {
  const int n = inst.n();
  std::vector<double> w(n, 0.0);
  double total = 0.0;
  auto rec = [&](auto&& self, int e, double p) -> void {
    if (e == n) {
      total += p * optimum_value(inst.family, w);
      return;
    }
    const DiscreteDistribution& d = inst.d(e);
    for (size_t j = 0; j < d.size(); ++j) {
      w[e] = d.value(j);
      self(self, e + 1, p * d.prob(j));
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

double mc_expected_opt(const Instance& inst, long long trials, uint64_t seed) {
  const int n = inst.n();
  std::vector<double> w(n);
  double total = 0.0;
  for (long long t = 0; t < trials; ++t) {
    for (int e = 0; e < n; ++e) {
      RngStream s = RngStream::keyed(seed, static_cast<uint64_t>(t), static_cast<uint64_t>(e));
      w[e] = inst.d(e).sample(s);
    }
    total += optimum_value(inst.family, w);
  }
  return total / trials;
}

}  // namespace

double expected_optimum(const Instance& inst, long long exact_cap, long long mc_trials,
                        uint64_t seed, bool* exact) {
  if (exact) *exact = true;
  switch (inst.family.kind()) {
    case FeasibilityFamily::Kind::SingleChoice:
      return expected_max(inst.dist);
    case FeasibilityFamily::Kind::Partition: {
      double total = 0.0;
      for (const auto& block : inst.family.blocks()) {
        ProductDistribution sub;
        for (int e : block) sub.per_element.push_back(inst.d(e));
        total += expected_max(sub);
      }
      return total;
    }
    default:
      break;
  }
  if (inst.dist.joint_support(exact_cap) <= exact_cap) return enumerate_expected_opt(inst);
  if (exact) *exact = false;
  return mc_expected_opt(inst, mc_trials, seed);
}

double core_expectation(const Instance& inst, const RandomizedThreshold& thr,
                        long long exact_cap, long long mc_trials, uint64_t seed, bool* exact) {
  Instance core = truncate_instance(inst, thr);
  return expected_optimum(core, exact_cap, mc_trials, seed, exact);
}

double pbm_p(const Instance& inst, const OnlinePolicy& policy, long long trials,
             uint64_t seed) {
  if (trials <= 0) return evaluate_exact(inst, policy).pbm_p;
  return evaluate_monte_carlo(inst, policy, trials, seed).pbm_p;
}

double expected_utility(const Instance& inst, const OnlinePolicy& policy, double cap) {
  return evaluate_auto(inst, policy, 200000, 12345, cap).expected_utility;
}

double secretary_win_probability_formula(int n, int r) {
  if (n < 1 || r < 0 || r >= n) throw BadParams("secretary needs 0 <= r < n");
  if (r == 0) return 1.0 / n;
  double s = 0.0;
  for (int i = r; i < n; ++i) s += 1.0 / i;
  return static_cast<double>(r) / n * s;
}

namespace {

bool secretary_wins(const std::vector<int>& ranks, int r) {
  int n = static_cast<int>(ranks.size());
  int best_seen = -1;
  for (int i = 0; i < r; ++i) best_seen = std::max(best_seen, ranks[i]);
  for (int i = r; i < n; ++i) {
    if (ranks[i] > best_seen) return ranks[i] == n - 1;
    best_seen = std::max(best_seen, ranks[i]);
  }
  return false;
}

}  // namespace

double secretary_win_probability_exact(int n, int r) {
  if (n < 1 || r < 0 || r >= n) throw BadParams("secretary needs 0 <= r < n");
  if (n > 10) throw TooLarge("permutation enumeration supports n <= 10");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  long long wins = 0, total = 0;
  do {
    if (secretary_wins(perm, r)) ++wins;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(wins) / total;
}

double secretary_win_probability_mc(int n, int r, long long trials, uint64_t seed) {
  if (n < 1 || r < 0 || r >= n) throw BadParams("secretary needs 0 <= r < n");
  if (trials < 1) throw BadParams("need at least one trial");
  long long wins = 0;
  std::vector<int> perm(n);
  for (long long t = 0; t < trials; ++t) {
    RngStream s = RngStream::keyed(seed, static_cast<uint64_t>(t), 0);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[s.next_below(static_cast<uint64_t>(i) + 1)]);
    if (secretary_wins(perm, r)) ++wins;
  }
  return static_cast<double>(wins) / trials;
}

}  // namespace prophet_lab
