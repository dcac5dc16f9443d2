#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mixoram/permutation.hpp"
#include "mixoram/prg.hpp"

namespace mixoram {

enum class Design : std::uint8_t {
  kCascadeLayered = 0,
  kCascadeRebuild = 1,
  kParallelLayered = 2,
  kParallelRebuild = 3,
};

inline constexpr Design kAllDesigns[] = {Design::kCascadeLayered, Design::kCascadeRebuild,
                                         Design::kParallelLayered, Design::kParallelRebuild};

std::string_view to_string(Design d);
// Accepts "cascade-layered", "cascade-rebuild", "parallel-layered", "parallel-rebuild".
Design parse_design(std::string_view name);
inline bool is_parallel(Design d) {
  return d == Design::kParallelLayered || d == Design::kParallelRebuild;
}
inline bool is_rebuild(Design d) {
  return d == Design::kCascadeRebuild || d == Design::kParallelRebuild;
}

// Rounds per permutation phase. Parallel layered: ceil((m/2) ln(n/s)); parallel rebuild:
// ceil(2m ln n); cascades: m hops. Never below 1.
std::uint32_t round_count(Design d, std::uint64_t n, std::uint64_t s, std::uint32_t m);

struct Allocation {
  // Global slots held by the sender, grouped by destination mix, in permuted-list order.
  std::vector<std::vector<std::uint64_t>> per_destination;
  std::uint32_t round = 0;
  std::uint64_t epoch = 0;
};

// Public record allocation for mix idx: slot x of idx's chunk goes to mix pub[x] / (n/m).
Allocation public_allocation(const Permutation& pub, std::uint32_t m, std::uint32_t idx,
                             std::uint32_t round = 0, std::uint64_t epoch = 0);
Allocation public_allocation(ByteView pub_seed, std::uint64_t n, std::uint32_t m,
                             std::uint32_t idx, std::uint32_t round = 0, std::uint64_t epoch = 0);

double harmonic(std::uint64_t n);

// (2n/k) ln n
double krts_bound(std::uint64_t n, std::uint64_t k);
// (n/(2k)) ln(n/s)
double merge_bound(std::uint64_t n, std::uint64_t s, std::uint64_t k);

// One k-RTS round: k distinct positions, paired in draw order, each pair swapped on a fair coin.
// Returns the picked positions.
template <class Urbg>
std::vector<std::uint64_t> krts_round(std::span<std::uint64_t> cards, std::uint64_t k,
                                      Urbg& rng) {
  const std::uint64_t n = cards.size();
  std::vector<std::uint64_t> picked;
  picked.reserve(k);
  // Partial Fisher-Yates over an index pool keeps the k draws distinct.
  std::vector<std::uint64_t> pool(n);
  for (std::uint64_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint64_t i = 0; i < k; ++i) {
    auto j = i + uniform_below(rng, n - i);
    std::swap(pool[i], pool[j]);
    picked.push_back(pool[i]);
  }
  for (std::uint64_t i = 0; i + 1 < k; i += 2) {
    if (uniform_below(rng, 2) == 1) std::swap(cards[picked[i]], cards[picked[i + 1]]);
  }
  return picked;
}

// Marking process: every picked card is marked; returns the first round with all n marked.
template <class Urbg>
std::uint64_t krts_simulate(std::uint64_t n, std::uint64_t k, Urbg& rng,
                            std::vector<std::uint64_t>* marked_trace = nullptr) {
  if (k < 2 || k > n || k % 2 != 0) fail(Errc::kInvalidArgument, "k must be even with 2 <= k <= n");
  std::vector<std::uint64_t> cards(n);
  for (std::uint64_t i = 0; i < n; ++i) cards[i] = i;
  std::vector<bool> marked(n, false);
  std::uint64_t count = 0;
  for (std::uint64_t round = 1;; ++round) {
    auto picked = krts_round(std::span<std::uint64_t>(cards), k, rng);
    for (auto pos : picked) {
      auto card = cards[pos];
      if (!marked[card]) {
        marked[card] = true;
        ++count;
      }
    }
    if (marked_trace) marked_trace->push_back(count);
    if (count == n) return round;
  }
}

// Oblivious merge model: a 0/1 arrangement with s accessed records initially at positions
// [0, s); each round is one k-RTS step. Returns the final arrangement as a bitmask (n <= 64).
template <class Urbg>
std::uint64_t merge_simulate(std::uint64_t n, std::uint64_t s, std::uint64_t k,
                             std::uint64_t rounds, Urbg& rng) {
  if (n > 64) fail(Errc::kInvalidArgument, "merge model limited to n <= 64");
  std::vector<std::uint64_t> cells(n, 0);
  for (std::uint64_t i = 0; i < s; ++i) cells[i] = 1;
  for (std::uint64_t r = 0; r < rounds; ++r) krts_round(std::span<std::uint64_t>(cells), k, rng);
  std::uint64_t mask = 0;
  for (std::uint64_t i = 0; i < n; ++i) mask |= cells[i] << i;
  return mask;
}

// Sum of (w_i - 1/n)^2. Throws kNotAProbabilityVector if sum(w) differs from 1 by more than 1e-9.
double phi_potential(std::span<const double> weights);

// (1 - (m - m_a)(k - 1)/(n - 1))^t with k = n/m.
double phi_closed_form(std::uint64_t n, std::uint32_t m, std::uint32_t m_a, std::uint64_t t);
// ceil(2 (m/(m - m_a)) ln n)
std::uint64_t phi_target_rounds(std::uint64_t n, std::uint32_t m, std::uint32_t m_a);

}  // namespace mixoram
