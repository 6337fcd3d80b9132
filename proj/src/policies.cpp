#include "prophet_lab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/spec_parse.hpp"

namespace prophet_lab {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

// One Bernoulli(a) lane per element that has an atom exactly at tau, when the
// tie rule is genuinely random. Returns per-element lane indices (-1: none).
std::vector<int> build_coin_lanes(const ProductDistribution& dist, const RandomizedThreshold& thr,
                                  std::vector<DiscreteDistribution>& lanes) {
  std::vector<int> lane_of(dist.size(), -1);
  double a = thr.accept_prob_at_atom;
  if (a > 0.0 && a < 1.0) {
    for (size_t e = 0; e < dist.size(); ++e) {
      if (dist[e].prob_at(thr.tau) > 0.0) {
        lane_of[e] = static_cast<int>(lanes.size());
        lanes.push_back(DiscreteDistribution({{0.0, 1.0 - a}, {1.0, a}}));
      }
    }
  }
  return lane_of;
}

bool exceeds_with_coins(const RandomizedThreshold& thr, const std::vector<int>& lane_of, int e,
                        double w, std::span<const double> lanes) {
  if (w > thr.tau) return true;
  if (w != thr.tau) return false;
  if (thr.accept_prob_at_atom <= 0.0) return false;
  if (thr.accept_prob_at_atom >= 1.0) return true;
  return lanes[lane_of[e]] == 1.0;
}

}  // namespace

const std::vector<DiscreteDistribution>& OnlinePolicy::lanes() const {
  static const std::vector<DiscreteDistribution> empty;
  return empty;
}

std::string objective_name(Objective obj) {
  switch (obj) {
    case Objective::RoE:
      return "roe";
    case Objective::EoR:
      return "eor";
    case Objective::PbM:
      return "pbm";
  }
  return "?";
}

namespace {

class FixedThresholdPolicy final : public OnlinePolicy {
 public:
  explicit FixedThresholdPolicy(double t)
      : OnlinePolicy("fixed_threshold(T=" + num(t) + ")"), t_(t) {
    if (!(t >= 0.0)) throw BadParams("threshold must be >= 0");
  }
  bool accept(const TrialContext& ctx) const override {
    return ctx.weight > t_ && ctx.selected->can_add(ctx.element);
  }
  std::optional<RandomizedThreshold> threshold_rule() const override {
    return RandomizedThreshold{t_, 0.0};
  }

 private:
  double t_;
};

class AlwaysFirstPolicy final : public OnlinePolicy {
 public:
  AlwaysFirstPolicy() : OnlinePolicy("always_first") {}
  bool accept(const TrialContext& ctx) const override {
    return ctx.selected->can_add(ctx.element);
  }
};

class SelectElementPolicy final : public OnlinePolicy {
 public:
  explicit SelectElementPolicy(int e)
      : OnlinePolicy("select_element(e=" + std::to_string(e) + ")"), e_(e) {
    if (e < 0) throw BadParams("element index must be >= 0");
  }
  bool accept(const TrialContext& ctx) const override {
    return ctx.element == e_ && ctx.selected->can_add(ctx.element);
  }

 private:
  int e_;
};

class SecretaryPolicy final : public OnlinePolicy {
 public:
  SecretaryPolicy(int n, int r)
      : OnlinePolicy("secretary(r=" + std::to_string(r) + ")"), r_(r) {
    if (n < 1 || r < 0 || r >= n) throw BadParams("secretary needs 0 <= r < n");
  }
  bool accept(const TrialContext& ctx) const override {
    if (ctx.step < r_) return false;
    double best = -std::numeric_limits<double>::infinity();
    for (double w : ctx.prefix_weights) best = std::max(best, w);
    return ctx.weight > best && ctx.selected->can_add(ctx.element);
  }

 private:
  int r_;
};

class EorThresholdPolicy final : public OnlinePolicy {
 public:
  explicit EorThresholdPolicy(const Instance& inst) : OnlinePolicy("eor_threshold") {
    if (inst.family.kind() != FeasibilityFamily::Kind::SingleChoice)
      throw WrongFamily("eor_threshold requires a single-choice instance");
    thr_ = solve_gamma_threshold(inst.dist, std::exp(-1.0));
    lane_of_ = build_coin_lanes(inst.dist, thr_, lanes_);
  }
  bool accept(const TrialContext& ctx) const override {
    if (!ctx.selected->empty()) return false;
    return exceeds_with_coins(thr_, lane_of_, ctx.element, ctx.weight, ctx.lanes) &&
           ctx.selected->can_add(ctx.element);
  }
  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }
  std::optional<RandomizedThreshold> threshold_rule() const override { return thr_; }

 private:
  RandomizedThreshold thr_;
  std::vector<int> lane_of_;
  std::vector<DiscreteDistribution> lanes_;
};

class PerBlockThresholdPolicy final : public OnlinePolicy {
 public:
  explicit PerBlockThresholdPolicy(const Instance& inst)
      : OnlinePolicy("per_block_threshold") {
    if (inst.family.kind() != FeasibilityFamily::Kind::Partition)
      throw WrongFamily("per_block_threshold requires a partition instance");
    block_of_.resize(inst.n());
    for (int e = 0; e < inst.n(); ++e) block_of_[e] = inst.family.block_of(e);
    for (const auto& block : inst.family.blocks()) {
      ProductDistribution sub;
      for (int e : block) sub.per_element.push_back(inst.d(e));
      thresholds_.push_back(expected_max(sub) / 2.0);
    }
  }
  bool accept(const TrialContext& ctx) const override {
    double t = thresholds_[block_of_[ctx.element]];
    return ctx.weight > t && ctx.selected->can_add(ctx.element);
  }

 private:
  std::vector<int> block_of_;
  std::vector<double> thresholds_;
};

class SelectPairPolicy final : public OnlinePolicy {
 public:
  SelectPairPolicy(int pair, int n_pairs)
      : OnlinePolicy("select_pair(pair=" + std::to_string(pair) + ")"),
        pair_(pair),
        n_pairs_(n_pairs) {
    if (n_pairs < 1 || pair < 0 || pair >= n_pairs) throw BadParams("pair index out of range");
  }
  bool accept(const TrialContext& ctx) const override {
    return (ctx.element == pair_ || ctx.element == n_pairs_ + pair_) &&
           ctx.selected->can_add(ctx.element);
  }

 private:
  int pair_;
  int n_pairs_;
};

class RandomPairPolicy final : public OnlinePolicy {
 public:
  explicit RandomPairPolicy(int n_pairs)
      : OnlinePolicy("random_pair"), n_pairs_(n_pairs) {
    if (n_pairs < 1) throw BadParams("need at least one pair");
    std::vector<std::pair<double, double>> atoms;
    double partial = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
      double p = i + 1 < n_pairs ? 1.0 / n_pairs : 1.0 - partial;
      partial += p;
      atoms.emplace_back(static_cast<double>(i), p);
    }
    lanes_.push_back(DiscreteDistribution(std::move(atoms)));
  }
  bool accept(const TrialContext& ctx) const override {
    int pair = static_cast<int>(ctx.lanes[0]);
    return (ctx.element == pair || ctx.element == n_pairs_ + pair) &&
           ctx.selected->can_add(ctx.element);
  }
  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }

 private:
  int n_pairs_;
  std::vector<DiscreteDistribution> lanes_;
};

class CatchMaxPairPolicy final : public OnlinePolicy {
 public:
  explicit CatchMaxPairPolicy(const Instance& inst) : OnlinePolicy("catch_max_pair") {
    thr_ = solve_gamma_threshold(inst.dist, std::exp(-1.0));
    lane_of_ = build_coin_lanes(inst.dist, thr_, lanes_);
  }
  bool accept(const TrialContext& ctx) const override {
    if (!ctx.selected->empty()) return false;
    return exceeds_with_coins(thr_, lane_of_, ctx.element, ctx.weight, ctx.lanes) &&
           ctx.selected->can_add(ctx.element);
  }
  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }

 private:
  RandomizedThreshold thr_;
  std::vector<int> lane_of_;
  std::vector<DiscreteDistribution> lanes_;
};

}  // namespace

PolicyPtr fixed_threshold_policy(double T) { return std::make_shared<FixedThresholdPolicy>(T); }
PolicyPtr always_first_policy() { return std::make_shared<AlwaysFirstPolicy>(); }
PolicyPtr select_element_policy(int element) {
  return std::make_shared<SelectElementPolicy>(element);
}
PolicyPtr secretary_policy(int n, int r) { return std::make_shared<SecretaryPolicy>(n, r); }
PolicyPtr eor_threshold_policy(const Instance& inst) {
  return std::make_shared<EorThresholdPolicy>(inst);
}
PolicyPtr per_block_threshold_policy(const Instance& inst) {
  return std::make_shared<PerBlockThresholdPolicy>(inst);
}
PolicyPtr select_pair_policy(int pair, int n_pairs) {
  return std::make_shared<SelectPairPolicy>(pair, n_pairs);
}
PolicyPtr random_pair_policy(int n_pairs) { return std::make_shared<RandomPairPolicy>(n_pairs); }
PolicyPtr catch_max_pair_policy(const Instance& inst) {
  return std::make_shared<CatchMaxPairPolicy>(inst);
}

// ---------------------------------------------------------------------------
// Optimal policy by backward induction.

struct OptimalPolicy::Impl {
  Instance inst;
  Objective obj;
  bool path_free;  // RoE decisions depend on (step, selection) only
  int n = 0;
  std::vector<const DiscreteDistribution*> step_dist;
  std::vector<long long> stride;  // mixed-radix path code, code < joint <= 1e6
  long long joint = 1;
  std::unordered_map<uint64_t, double> memo;
  std::vector<double> fcache;
  std::vector<char> fvalid;
  double root_value = 0.0;
  double expected_f = 0.0;
  double objective_value = 0.0;

  Impl(Instance i, Objective o) : inst(std::move(i)), obj(o), path_free(o == Objective::RoE) {
    n = inst.n();
    if (n > 32) throw TooLarge("optimal policy supports at most 32 elements");
    stride.resize(n);
    for (int t = 0; t < n; ++t) {
      const DiscreteDistribution& d = inst.d(inst.arrival_order[t]);
      step_dist.push_back(&d);
      stride[t] = joint;
      joint *= static_cast<long long>(d.size());
      if (joint > 1000000) throw TooLarge("decision tree exceeds 1e6 leaves");
    }
    if (!path_free) {
      fcache.assign(joint, 0.0);
      fvalid.assign(joint, 0);
    }
    root_value = value(0, 0, 0);
    if (obj == Objective::RoE) {
      std::vector<double> w(n, 0.0);
      expected_f = sum_f(0, 1.0, w);
      objective_value = expected_f > 0.0 ? root_value / expected_f : 1.0;
    } else {
      objective_value = root_value;
    }
  }

  static uint64_t pack(int t, long long code, uint32_t mask) {
    return (static_cast<uint64_t>(code) << 38) | (static_cast<uint64_t>(mask) << 6) |
           static_cast<uint64_t>(t);
  }

  double leaf(long long code, uint32_t mask) {
    if (path_free) return 0.0;
    double a = 0.0;
    std::vector<double> w(n, 0.0);
    for (int t = 0; t < n; ++t) {
      int e = inst.arrival_order[t];
      long long idx = (code / stride[t]) % static_cast<long long>(step_dist[t]->size());
      w[e] = step_dist[t]->value(idx);
      if (mask & (1u << e)) a += w[e];
    }
    if (!fvalid[code]) {
      fcache[code] = optimum_value(inst.family, w);
      fvalid[code] = 1;
    }
    double f = fcache[code];
    if (obj == Objective::PbM) return value_matches_opt(a, f) ? 1.0 : 0.0;
    return f == 0.0 ? 1.0 : a / f;
  }

  double value(int t, long long code, uint32_t mask) {
    uint64_t key = pack(t, code, mask);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    double v = 0.0;
    if (t == n) {
      v = leaf(code, mask);
    } else {
      int e = inst.arrival_order[t];
      const DiscreteDistribution& d = *step_dist[t];
      bool feasible = inst.family.can_add(mask, e);
      for (size_t j = 0; j < d.size(); ++j) {
        long long ccode = path_free ? 0 : code + static_cast<long long>(j) * stride[t];
        double best = value(t + 1, ccode, mask);
        if (feasible) {
          double acc = value(t + 1, ccode, mask | (1u << e));
          if (path_free) acc += d.value(j);
          best = std::max(best, acc);
        }
        v += d.prob(j) * best;
      }
    }
    memo.emplace(key, v);
    return v;
  }

  double sum_f(int t, double p, std::vector<double>& w) {
    if (t == n) return p * optimum_value(inst.family, w);
    int e = inst.arrival_order[t];
    const DiscreteDistribution& d = *step_dist[t];
    double s = 0.0;
    for (size_t j = 0; j < d.size(); ++j) {
      w[e] = d.value(j);
      s += sum_f(t + 1, p * d.prob(j), w);
    }
    w[e] = 0.0;
    return s;
  }

  double lookup(int t, long long code, uint32_t mask) const {
    auto it = memo.find(pack(t, code, mask));
    if (it == memo.end()) throw BadParams("optimal policy queried at an unreachable state");
    return it->second;
  }

  bool decide(const TrialContext& ctx) const {
    int t = ctx.step;
    if (t < 0 || t >= n || ctx.element != inst.arrival_order[t])
      throw BadParams("optimal policy replayed out of arrival order");
    uint32_t mask = static_cast<uint32_t>(ctx.selected->mask());
    if (!inst.family.can_add(mask, ctx.element)) return false;
    int j = step_dist[t]->atom_index(ctx.weight);
    if (j < 0) throw BadParams("weight not in the optimized instance's support");
    long long ccode = 0;
    if (!path_free) {
      ccode = static_cast<long long>(j) * stride[t];
      for (int i = 0; i < t; ++i) {
        int ji = step_dist[i]->atom_index(ctx.prefix_weights[i]);
        if (ji < 0) throw BadParams("prefix weight not in the optimized instance's support");
        ccode += static_cast<long long>(ji) * stride[i];
      }
    }
    double rej = lookup(t + 1, ccode, mask);
    double acc = lookup(t + 1, ccode, mask | (1u << ctx.element));
    if (path_free) acc += ctx.weight;
    return acc > rej;
  }
};

OptimalPolicy::OptimalPolicy(std::unique_ptr<Impl> impl)
    : OnlinePolicy("optimal_" + objective_name(impl->obj)), impl_(std::move(impl)) {}

OptimalPolicy::~OptimalPolicy() = default;

bool OptimalPolicy::accept(const TrialContext& ctx) const { return impl_->decide(ctx); }

double OptimalPolicy::optimal_value() const { return impl_->objective_value; }

Objective OptimalPolicy::objective() const { return impl_->obj; }

std::shared_ptr<const OptimalPolicy> optimal_policy(const Instance& inst, Objective obj) {
  auto impl = std::make_unique<OptimalPolicy::Impl>(inst, obj);
  return std::shared_ptr<const OptimalPolicy>(new OptimalPolicy(std::move(impl)));
}

// ---------------------------------------------------------------------------
// Ratio reductions.

double ReductionParams::required_c(double delta, double k, double alpha) {
  return (4.0 + 2.0 * delta) / (3.0 * (delta - 1.0) * (delta - 1.0)) * std::log(k / alpha);
}

ReductionParams ReductionParams::defaults(double alpha) {
  ReductionParams p;
  p.alpha = alpha;
  p.c = required_c(p.delta, p.k, alpha);
  p.validate();
  return p;
}

void ReductionParams::validate() const {
  if (!(gamma > 0.0) || gamma >= 1.0) throw BadParams("gamma must lie in (0,1)");
  if (!(delta > 1.0)) throw BadParams("delta must exceed 1");
  if (!(k > 2.0)) throw BadParams("k must exceed 2");
  if (!(alpha > 0.0) || alpha > 1.0) throw BadParams("alpha must lie in (0,1]");
  if (!(c > 0.0)) throw BadParams("c must be positive");
  if (c < required_c(delta, k, alpha) - 1e-12)
    throw BadParams("c below the superstar constraint (4+2d)/(3(d-1)^2) ln(k/alpha)");
}

namespace {

class RoeToEorPolicy final : public OnlinePolicy {
 public:
  RoeToEorPolicy(Instance inst, PolicyPtr sub, ReductionParams params)
      : OnlinePolicy(""), inst_(std::move(inst)), sub_(std::move(sub)), params_(params) {
    params_.validate();
    thr_ = solve_gamma_threshold(inst_.dist, params_.gamma);
    bool exact = false;
    w_core_ = core_expectation(inst_, thr_, 1000000, 100000, 20177, &exact);
    superstar_ = w_core_ <= params_.c * thr_.tau;
    lane_of_ = build_coin_lanes(inst_.dist, thr_, lanes_);
    sub_offset_ = static_cast<int>(lanes_.size());
    for (const auto& d : sub_->lanes()) lanes_.push_back(d);
    name_ = "roe_to_eor(sub=" + sub_->name() + ",gamma=" + num(params_.gamma) +
            ",delta=" + num(params_.delta) + ",k=" + num(params_.k) + ",c=" + num(params_.c) +
            ",alpha=" + num(params_.alpha) + ")";
    if (!exact) name_ += "[W~mc]";
  }

  bool accept(const TrialContext& ctx) const override {
    if (superstar_) {
      if (!ctx.selected->empty()) return false;
      return exceeds_with_coins(thr_, lane_of_, ctx.element, ctx.weight, ctx.lanes) &&
             ctx.selected->can_add(ctx.element);
    }
    for (int j = 0; j < ctx.step; ++j)
      if (exceeds_with_coins(thr_, lane_of_, ctx.prefix_elements[j], ctx.prefix_weights[j],
                             ctx.lanes))
        return false;  // an exceedance stops the core run for good
    if (exceeds_with_coins(thr_, lane_of_, ctx.element, ctx.weight, ctx.lanes)) return false;
    TrialContext sc = ctx;
    sc.lanes = ctx.lanes.subspan(sub_offset_);
    return sub_->accept(sc);
  }

  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }

  const RandomizedThreshold& threshold() const { return thr_; }
  double core_value() const { return w_core_; }
  bool superstar_branch() const { return superstar_; }

 private:
  Instance inst_;
  PolicyPtr sub_;
  ReductionParams params_;
  RandomizedThreshold thr_;
  double w_core_ = 0.0;
  bool superstar_ = false;
  std::vector<int> lane_of_;
  std::vector<DiscreteDistribution> lanes_;
  int sub_offset_ = 0;
};

class EorToRoePolicy final : public OnlinePolicy {
 public:
  EorToRoePolicy(Instance inst, PolicyPtr sub, double alpha)
      : OnlinePolicy(""), inst_(std::move(inst)), sub_(std::move(sub)), alpha_(alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw BadParams("alpha must lie in (0,1]");
    a_ = expected_max(inst_.dist);
    bool exact = false;
    ef_ = expected_optimum(inst_, 1000000, 100000, 31337, &exact);
    high_bar_ = a_ >= alpha_ * ef_ / 34.0;
    if (!high_bar_) lanes_ = sub_->lanes();
    name_ = "eor_to_roe(sub=" + sub_->name() + ",alpha=" + num(alpha_) + ")";
    if (!exact) name_ += "[Ef~mc]";
  }

  bool accept(const TrialContext& ctx) const override {
    if (high_bar_) {
      if (!ctx.selected->empty()) return false;
      return ctx.weight >= a_ / 2.0 && ctx.selected->can_add(ctx.element);
    }
    return sub_->accept(ctx);
  }

  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }

  bool high_bar_branch() const { return high_bar_; }
  double expected_max_value() const { return a_; }

 private:
  Instance inst_;
  PolicyPtr sub_;
  double alpha_;
  double a_ = 0.0;
  double ef_ = 0.0;
  bool high_bar_ = false;
  std::vector<DiscreteDistribution> lanes_;
};

class SampleThresholdPolicy final : public OnlinePolicy {
 public:
  explicit SampleThresholdPolicy(const Instance& inst)
      : OnlinePolicy("sample_threshold"), family_(inst.family), n_(inst.n()) {}

  bool accept(const TrialContext& ctx) const override {
    if (static_cast<int>(ctx.lanes.size()) < n_)
      throw BadParams("sample_threshold needs the n-sample lane block");
    std::span<const double> s = ctx.lanes.first(n_);
    double bar = 0.0;
    switch (family_.kind()) {
      case FeasibilityFamily::Kind::KUniform: {
        std::vector<double> v(s.begin(), s.end());
        std::nth_element(v.begin(), v.begin() + (family_.k() - 1), v.end(),
                         std::greater<double>());
        bar = v[family_.k() - 1];  // k-th largest sample
        break;
      }
      case FeasibilityFamily::Kind::Partition: {
        bar = 0.0;
        for (int e : family_.blocks()[family_.block_of(ctx.element)])
          bar = std::max(bar, s[e]);
        break;
      }
      default:
        bar = *std::max_element(s.begin(), s.end());
        break;
    }
    return ctx.weight >= bar && ctx.selected->can_add(ctx.element);
  }

 private:
  FeasibilityFamily family_;
  int n_;
};

class SingleSamplePolicy final : public OnlinePolicy {
 public:
  SingleSamplePolicy(Instance inst, PolicyPtr sub, ReductionParams params, RngStream rng)
      : OnlinePolicy(""), inst_(std::move(inst)), sub_(std::move(sub)) {
    params.validate();
    lanes_.push_back(DiscreteDistribution({{0.0, 0.5}, {1.0, 0.5}}));  // fair coin
    for (const auto& d : inst_.dist.per_element) lanes_.push_back(d);  // samples
    for (const auto& d : sub_->lanes()) lanes_.push_back(d);
    for (const auto& d : lanes_) fallback_.push_back(d.sample(rng));
    name_ = "single_sample_roe_to_eor(sub=" + sub_->name() + ")";
  }

  bool accept(const TrialContext& ctx) const override {
    std::span<const double> lanes =
        ctx.lanes.size() >= lanes_.size() ? ctx.lanes : std::span<const double>(fallback_);
    int n = inst_.n();
    if (lanes[0] == 1.0) {  // heads: beat the best sample strictly
      if (!ctx.selected->empty()) return false;
      double tau_hat = 0.0;
      for (int e = 0; e < n; ++e) tau_hat = std::max(tau_hat, lanes[1 + e]);
      return ctx.weight > tau_hat && ctx.selected->can_add(ctx.element);
    }
    TrialContext sc = ctx;
    sc.lanes = lanes.subspan(1);  // subroutine sees [samples..., own lanes]
    return sub_->accept(sc);
  }

  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }

 private:
  Instance inst_;
  PolicyPtr sub_;
  std::vector<DiscreteDistribution> lanes_;
  std::vector<double> fallback_;
};

// Evaluates a sample-driven policy on the core instance while the sample
// lanes keep the original laws.
class SampleAlphaProbe final : public OnlinePolicy {
 public:
  SampleAlphaProbe(const Instance& original, PolicyPtr sub)
      : OnlinePolicy("sample_alpha_probe(" + sub->name() + ")"), sub_(std::move(sub)) {
    for (const auto& d : original.dist.per_element) lanes_.push_back(d);
    for (const auto& d : sub_->lanes()) lanes_.push_back(d);
  }
  bool accept(const TrialContext& ctx) const override { return sub_->accept(ctx); }
  const std::vector<DiscreteDistribution>& lanes() const override { return lanes_; }

 private:
  PolicyPtr sub_;
  std::vector<DiscreteDistribution> lanes_;
};

}  // namespace

PolicyPtr roe_to_eor_policy(const Instance& inst, PolicyPtr core_subroutine,
                            const ReductionParams& params) {
  return std::make_shared<RoeToEorPolicy>(inst, std::move(core_subroutine), params);
}

PolicyPtr eor_to_roe_policy(const Instance& inst, PolicyPtr subroutine, double alpha) {
  return std::make_shared<EorToRoePolicy>(inst, std::move(subroutine), alpha);
}

PolicyPtr single_sample_roe_to_eor_policy(const Instance& inst, PolicyPtr sample_subroutine,
                                          const ReductionParams& params, RngStream rng) {
  return std::make_shared<SingleSamplePolicy>(inst, std::move(sample_subroutine), params, rng);
}

PolicyPtr sample_threshold_subroutine(const Instance& inst) {
  return std::make_shared<SampleThresholdPolicy>(inst);
}

double measure_sample_alpha(const Instance& inst, PolicyPtr sample_subroutine, double gamma,
                            long long mc_trials, uint64_t seed, bool* exact) {
  RandomizedThreshold thr = solve_gamma_threshold(inst.dist, gamma);
  Instance core = truncate_instance(inst, thr);
  SampleAlphaProbe probe(inst, std::move(sample_subroutine));
  MetricReport r = evaluate_auto(core, probe, mc_trials, seed);
  if (exact) *exact = r.mode == EvalMode::Exact;
  return r.expected_opt > 0.0 ? r.expected_value / r.expected_opt : 1.0;
}

PolicyPtr parse_policy(const std::string& spec, const Instance& inst) {
  CallSpec c = parse_call(spec);
  const std::string& p = c.name;
  if (p == "fixed_threshold") {
    double t = c.has("T") ? c.require_double("T") : expected_max(inst.dist) / 2.0;
    return fixed_threshold_policy(t);
  }
  if (p == "eor_threshold") return eor_threshold_policy(inst);
  if (p == "always_first") return always_first_policy();
  if (p == "select_element") return select_element_policy(c.require_int("e"));
  if (p == "secretary") return secretary_policy(inst.n(), c.require_int("r"));
  if (p == "per_block_threshold") return per_block_threshold_policy(inst);
  if (p == "optimal_roe") return optimal_policy(inst, Objective::RoE);
  if (p == "optimal_eor") return optimal_policy(inst, Objective::EoR);
  if (p == "optimal_pbm") return optimal_policy(inst, Objective::PbM);
  if (p == "optimal") {
    std::string obj = c.require_string("objective");
    if (obj == "roe") return optimal_policy(inst, Objective::RoE);
    if (obj == "eor") return optimal_policy(inst, Objective::EoR);
    if (obj == "pbm") return optimal_policy(inst, Objective::PbM);
    throw BadParams("objective must be roe|eor|pbm");
  }
  if (p == "sample_threshold") return sample_threshold_subroutine(inst);
  if (p == "select_pair") return select_pair_policy(c.require_int("pair"), inst.n() / 2);
  if (p == "random_pair") return random_pair_policy(inst.n() / 2);
  if (p == "catch_max_pair") return catch_max_pair_policy(inst);
  if (p == "roe_to_eor") {
    ReductionParams params;
    params.gamma = c.get_double("gamma", 0.5);
    params.delta = c.get_double("delta", 2.0);
    params.k = c.get_double("k", 3.0);
    RandomizedThreshold thr = solve_gamma_threshold(inst.dist, params.gamma);
    Instance core = truncate_instance(inst, thr);
    PolicyPtr sub = parse_policy(c.get_string("sub", "optimal_roe"), core);
    params.alpha = c.has("alpha") ? c.require_double("alpha")
                                  : std::min(1.0, evaluate_auto(core, *sub, 100000, 4242).roe);
    params.c = c.has("c") ? c.require_double("c")
                          : ReductionParams::required_c(params.delta, params.k, params.alpha);
    return roe_to_eor_policy(inst, std::move(sub), params);
  }
  if (p == "eor_to_roe") {
    PolicyPtr sub = parse_policy(c.get_string("sub", "optimal_eor"), inst);
    double alpha = c.has("alpha") ? c.require_double("alpha")
                                  : std::min(1.0, evaluate_auto(inst, *sub, 100000, 4242).eor);
    return eor_to_roe_policy(inst, std::move(sub), alpha);
  }
  if (p == "single_sample" || p == "single_sample_roe_to_eor") {
    PolicyPtr sub = parse_policy(c.get_string("sub", "sample_threshold"), inst);
    ReductionParams params;
    params.gamma = c.get_double("gamma", 0.5);
    params.delta = c.get_double("delta", 2.0);
    params.k = c.get_double("k", 3.0);
    params.alpha = c.get_double("alpha", 1.0);
    params.c = c.has("c") ? c.require_double("c")
                          : ReductionParams::required_c(params.delta, params.k, params.alpha);
    RngStream rng = RngStream::keyed(static_cast<uint64_t>(c.get_int("seed", 0)), 0x5a, 0);
    return single_sample_roe_to_eor_policy(inst, std::move(sub), params, rng);
  }
  throw BadParams("unknown policy '" + p + "'");
}

}  // namespace prophet_lab
