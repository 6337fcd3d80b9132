#ifndef PROPHET_LAB_FEASIBILITY_HPP
#define PROPHET_LAB_FEASIBILITY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace prophet_lab {

// Downward-closed constraint over ground set {0, ..., ground_size-1}.
// Variants: single choice, k-uniform, partition matroid with per-block
// capacity 1, and an explicit antichain of maximal feasible sets.
class FeasibilityFamily {
 public:
  enum class Kind { SingleChoice, KUniform, Partition, ExplicitDC };

  static FeasibilityFamily single_choice(int ground_size);
  static FeasibilityFamily k_uniform(int ground_size, int k);
  static FeasibilityFamily partition(int ground_size, std::vector<std::vector<int>> blocks);
  static FeasibilityFamily explicit_dc(int ground_size, std::vector<std::vector<int>> maximal_sets);

  Kind kind() const { return kind_; }
  int ground_size() const { return n_; }
  int k() const { return k_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<std::vector<int>>& maximal_sets() const { return maximal_sets_; }
  int block_of(int e) const { return block_of_[e]; }

  // True iff adding e keeps a feasible mask feasible. Masks are usable for
  // ground sets of at most 63 elements.
  bool can_add(uint64_t mask, int e) const;

  std::string describe() const;

 private:
  FeasibilityFamily() = default;

  Kind kind_ = Kind::SingleChoice;
  int n_ = 0;
  int k_ = 1;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
  std::vector<uint64_t> block_mask_;    // per element: mask of its block
  std::vector<std::vector<int>> maximal_sets_;
  std::vector<uint64_t> maximal_masks_;
};

bool is_feasible(const FeasibilityFamily& family, const std::vector<int>& set);

// Representation check: for ExplicitDC verifies the maximal sets form an
// antichain (throws MalformedFamily otherwise); structured variants pass.
bool check_downward_closed(const FeasibilityFamily& family);

struct OptimumResult {
  std::vector<int> set;  // lexicographically smallest optimal set, ascending
  double value = 0.0;
};

// Max-weight feasible set; ties broken toward the lexicographically smallest
// index sequence, so zero-weight padding is never included.
OptimumResult offline_optimum(const FeasibilityFamily& family, const std::vector<double>& w);

// Value of the best feasible set (no tie-break bookkeeping).
double optimum_value(const FeasibilityFamily& family, const std::vector<double>& w);

// Incremental selection state used by the evaluation harness and policies.
class SelectionTracker {
 public:
  explicit SelectionTracker(const FeasibilityFamily& family);

  bool can_add(int e) const;
  void add(int e, double w);
  void reset();

  const std::vector<int>& selected() const { return selected_; }
  double total() const { return total_; }
  uint64_t mask() const { return mask_; }
  bool empty() const { return selected_.empty(); }
  bool contains(int e) const;

 private:
  const FeasibilityFamily* fam_;
  std::vector<int> selected_;
  std::vector<int> block_counts_;
  uint64_t mask_ = 0;
  int count_ = 0;
  double total_ = 0.0;
};

}  // namespace prophet_lab

#endif
