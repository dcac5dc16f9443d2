#pragma once

#include <cstdint>
#include <vector>

#include "mixoram/permutation.hpp"

namespace mixoram {

// One layer applied to a record during an eviction: the mix that applied it, the round
// (1-based for parallel designs, 0 for cascades) and the slot the record occupied right after
// that mix's permutation, which is also the counter of any CTR wrap layer.
struct Hop {
  std::uint32_t mix = 0;
  std::uint32_t round = 0;
  std::uint64_t counter = 0;

  bool operator==(const Hop&) const = default;
};

struct Trace {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::vector<Hop> hops;  // in application order
};

// Slot movement of one eviction epoch, reconstructed from the permutation schedules.
class EpochRouting {
 public:
  // Cascade: perms[i] belongs to mix i and the mixes act in the given order.
  static EpochRouting cascade(std::vector<Permutation> perms, std::vector<std::uint32_t> order);
  // Parallel: local[l][j] is mix j's chunk permutation in round l+1, pub[l] the public one.
  static EpochRouting parallel(std::uint64_t n, std::uint32_t m,
                               std::vector<std::vector<Permutation>> local,
                               std::vector<Permutation> pub);

  std::uint64_t size() const { return n_; }
  bool is_parallel() const { return parallel_; }
  std::uint32_t rounds() const { return static_cast<std::uint32_t>(pub_.size()); }

  Trace trace_forward(std::uint64_t start) const;
  Trace trace_backward(std::uint64_t end) const;
  std::uint64_t forward(std::uint64_t start) const { return trace_forward(start).end; }

  // Composite slot map of the whole epoch.
  Permutation composite() const;

 private:
  std::uint64_t n_ = 0;
  std::uint32_t m_ = 0;
  bool parallel_ = false;
  std::vector<Permutation> cascade_perms_;
  std::vector<Permutation> cascade_inv_;
  std::vector<std::uint32_t> order_;
  std::vector<std::vector<Permutation>> local_;
  std::vector<std::vector<Permutation>> local_inv_;
  std::vector<Permutation> pub_;
  std::vector<Permutation> pub_inv_;
};

}  // namespace mixoram
