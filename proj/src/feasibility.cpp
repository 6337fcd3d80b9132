#include "prophet_lab/feasibility.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "prophet_lab/errors.hpp"

namespace prophet_lab {

namespace {

void require_ground(int n) {
  if (n < 1) throw BadParams("ground set must be nonempty");
}

void require_index(int e, int n) {
  if (e < 0 || e >= n)
    throw IndexOutOfRange("element " + std::to_string(e) + " outside ground set of size " +
                          std::to_string(n));
}

}  // namespace

FeasibilityFamily FeasibilityFamily::single_choice(int ground_size) {
  require_ground(ground_size);
  FeasibilityFamily f;
  f.kind_ = Kind::SingleChoice;
  f.n_ = ground_size;
  return f;
}

FeasibilityFamily FeasibilityFamily::k_uniform(int ground_size, int k) {
  require_ground(ground_size);
  if (k < 1 || k > ground_size) throw BadParams("k must lie in [1, ground size]");
  FeasibilityFamily f;
  f.kind_ = Kind::KUniform;
  f.n_ = ground_size;
  f.k_ = k;
  return f;
}

FeasibilityFamily FeasibilityFamily::partition(int ground_size,
                                               std::vector<std::vector<int>> blocks) {
  require_ground(ground_size);
  FeasibilityFamily f;
  f.kind_ = Kind::Partition;
  f.n_ = ground_size;
  f.block_of_.assign(ground_size, -1);
  f.block_mask_.assign(ground_size, 0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    std::sort(blocks[b].begin(), blocks[b].end());
    uint64_t mask = 0;
    for (int e : blocks[b]) {
      require_index(e, ground_size);
      if (f.block_of_[e] != -1) throw BadParams("element appears in two blocks");
      f.block_of_[e] = static_cast<int>(b);
      if (e < 64) mask |= 1ULL << e;
    }
    for (int e : blocks[b]) f.block_mask_[e] = mask;
  }
  for (int e = 0; e < ground_size; ++e)
    if (f.block_of_[e] == -1) throw BadParams("blocks must cover the ground set");
  f.blocks_ = std::move(blocks);
  return f;
}

FeasibilityFamily FeasibilityFamily::explicit_dc(int ground_size,
                                                 std::vector<std::vector<int>> maximal_sets) {
  require_ground(ground_size);
  if (ground_size > 30) throw BadParams("explicit families support at most 30 elements");
  FeasibilityFamily f;
  f.kind_ = Kind::ExplicitDC;
  f.n_ = ground_size;
  for (auto& s : maximal_sets) {
    std::sort(s.begin(), s.end());
    uint64_t mask = 0;
    for (int e : s) {
      require_index(e, ground_size);
      if (mask & (1ULL << e)) throw BadParams("duplicate element in a maximal set");
      mask |= 1ULL << e;
    }
    f.maximal_masks_.push_back(mask);
  }
  f.maximal_sets_ = std::move(maximal_sets);
  check_downward_closed(f);
  return f;
}

bool FeasibilityFamily::can_add(uint64_t mask, int e) const {
  switch (kind_) {
    case Kind::SingleChoice:
      return mask == 0;
    case Kind::KUniform:
      return std::popcount(mask) < k_;
    case Kind::Partition:
      return (mask & block_mask_[e]) == 0;
    case Kind::ExplicitDC: {
      uint64_t m2 = mask | (1ULL << e);
      for (uint64_t mx : maximal_masks_)
        if ((m2 & ~mx) == 0) return true;
      return false;
    }
  }
  return false;
}

std::string FeasibilityFamily::describe() const {
  switch (kind_) {
    case Kind::SingleChoice:
      return "single_choice";
    case Kind::KUniform:
      return "k_uniform(k=" + std::to_string(k_) + ")";
    case Kind::Partition:
      return "partition(" + std::to_string(blocks_.size()) + " blocks)";
    case Kind::ExplicitDC:
      return "explicit_dc(" + std::to_string(maximal_sets_.size()) + " maximal sets)";
  }
  return "?";
}

bool is_feasible(const FeasibilityFamily& family, const std::vector<int>& set) {
  for (int e : set) require_index(e, family.ground_size());
  std::vector<int> s = set;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  switch (family.kind()) {
    case FeasibilityFamily::Kind::SingleChoice:
      return s.size() <= 1;
    case FeasibilityFamily::Kind::KUniform:
      return static_cast<int>(s.size()) <= family.k();
    case FeasibilityFamily::Kind::Partition: {
      std::vector<int> used(family.blocks().size(), 0);
      for (int e : s)
        if (++used[family.block_of(e)] > 1) return false;
      return true;
    }
    case FeasibilityFamily::Kind::ExplicitDC: {
      uint64_t mask = 0;
      for (int e : s) mask |= 1ULL << e;
      for (const auto& mx : family.maximal_sets()) {
        uint64_t mm = 0;
        for (int e : mx) mm |= 1ULL << e;
        if ((mask & ~mm) == 0) return true;
      }
      return mask == 0;  // the empty set is always feasible
    }
  }
  return false;
}

bool check_downward_closed(const FeasibilityFamily& family) {
  if (family.kind() != FeasibilityFamily::Kind::ExplicitDC) return true;
  const auto& sets = family.maximal_sets();
  std::vector<uint64_t> masks;
  for (const auto& s : sets) {
    uint64_t m = 0;
    for (int e : s) m |= 1ULL << e;
    masks.push_back(m);
  }
  for (size_t i = 0; i < masks.size(); ++i)
    for (size_t j = 0; j < masks.size(); ++j)
      if (i != j && (masks[i] & ~masks[j]) == 0)
        throw MalformedFamily("maximal set " + std::to_string(i) +
                              " is contained in maximal set " + std::to_string(j));
  return true;
}

namespace {

bool can_add_vec(const FeasibilityFamily& fam, const std::vector<int>& sel, int e) {
  switch (fam.kind()) {
    case FeasibilityFamily::Kind::SingleChoice:
      return sel.empty();
    case FeasibilityFamily::Kind::KUniform:
      return static_cast<int>(sel.size()) < fam.k();
    case FeasibilityFamily::Kind::Partition:
      for (int s : sel)
        if (fam.block_of(s) == fam.block_of(e)) return false;
      return true;
    case FeasibilityFamily::Kind::ExplicitDC: {
      std::vector<int> v = sel;
      v.push_back(e);
      return is_feasible(fam, v);
    }
  }
  return false;
}

// Best achievable left-fold value over feasible supersets of sel (ascending)
// using additional elements with index >= from only.
double best_completion(const FeasibilityFamily& fam, const std::vector<double>& w,
                       const std::vector<int>& sel, double val, int from) {
  int n = fam.ground_size();
  switch (fam.kind()) {
    case FeasibilityFamily::Kind::SingleChoice: {
      if (!sel.empty()) return val;
      double best = val;
      for (int e = from; e < n; ++e) best = std::max(best, val + w[e]);
      return best;
    }
    case FeasibilityFamily::Kind::KUniform: {
      int r = fam.k() - static_cast<int>(sel.size());
      std::vector<int> cand;
      for (int e = from; e < n; ++e)
        if (w[e] > 0.0) cand.push_back(e);
      std::sort(cand.begin(), cand.end(),
                [&](int a, int b) { return w[a] != w[b] ? w[a] > w[b] : a < b; });
      if (static_cast<int>(cand.size()) > r) cand.resize(std::max(r, 0));
      std::sort(cand.begin(), cand.end());
      double s = val;
      for (int e : cand) s += w[e];
      return s;
    }
    case FeasibilityFamily::Kind::Partition: {
      std::vector<char> used(fam.blocks().size(), 0);
      for (int e : sel) used[fam.block_of(e)] = 1;
      std::vector<int> picks;
      for (size_t b = 0; b < fam.blocks().size(); ++b) {
        if (used[b]) continue;
        int best = -1;
        for (int e : fam.blocks()[b])
          if (e >= from && w[e] > 0.0 && (best == -1 || w[e] > w[best])) best = e;
        if (best != -1) picks.push_back(best);
      }
      std::sort(picks.begin(), picks.end());
      double s = val;
      for (int e : picks) s += w[e];
      return s;
    }
    case FeasibilityFamily::Kind::ExplicitDC: {
      uint64_t selmask = 0;
      for (int e : sel) selmask |= 1ULL << e;
      double best = val;
      for (const auto& mx : fam.maximal_sets()) {
        uint64_t mm = 0;
        for (int e : mx) mm |= 1ULL << e;
        if ((selmask & ~mm) != 0) continue;
        double s = val;
        for (int e : mx)
          if (e >= from && !(selmask & (1ULL << e)) && w[e] > 0.0) s += w[e];
        best = std::max(best, s);
      }
      return best;
    }
  }
  return val;
}

}  // namespace

double optimum_value(const FeasibilityFamily& family, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != family.ground_size())
    throw BadParams("weight vector size mismatch");
  return best_completion(family, w, {}, 0.0, 0);
}

OptimumResult offline_optimum(const FeasibilityFamily& family, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != family.ground_size())
    throw BadParams("weight vector size mismatch");
  double vstar = best_completion(family, w, {}, 0.0, 0);
  std::vector<int> sel;
  double val = 0.0;
  for (int e = 0; e < family.ground_size(); ++e) {
    if (val == vstar) break;
    if (!can_add_vec(family, sel, e)) continue;
    std::vector<int> trial = sel;
    trial.push_back(e);
    if (best_completion(family, w, trial, val + w[e], e + 1) == vstar) {
      sel = std::move(trial);
      val += w[e];
    }
  }
  return {std::move(sel), vstar};
}

SelectionTracker::SelectionTracker(const FeasibilityFamily& family) : fam_(&family) {
  if (family.kind() == FeasibilityFamily::Kind::Partition)
    block_counts_.assign(family.blocks().size(), 0);
}

bool SelectionTracker::can_add(int e) const {
  switch (fam_->kind()) {
    case FeasibilityFamily::Kind::SingleChoice:
      return count_ == 0;
    case FeasibilityFamily::Kind::KUniform:
      return count_ < fam_->k();
    case FeasibilityFamily::Kind::Partition:
      return block_counts_[fam_->block_of(e)] == 0;
    case FeasibilityFamily::Kind::ExplicitDC:
      return fam_->can_add(mask_, e);
  }
  return false;
}

void SelectionTracker::add(int e, double w) {
  selected_.push_back(e);
  if (e < 64) mask_ |= 1ULL << e;
  if (!block_counts_.empty()) ++block_counts_[fam_->block_of(e)];
  ++count_;
  total_ += w;
}

void SelectionTracker::reset() {
  selected_.clear();
  std::fill(block_counts_.begin(), block_counts_.end(), 0);
  mask_ = 0;
  count_ = 0;
  total_ = 0.0;
}

bool SelectionTracker::contains(int e) const {
  return std::find(selected_.begin(), selected_.end(), e) != selected_.end();
}

}  // namespace prophet_lab
