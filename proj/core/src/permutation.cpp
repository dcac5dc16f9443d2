#include "mixoram/permutation.hpp"

#include <numeric>
#include <utility>

#include "mixoram/prg.hpp"

namespace mixoram {

bool is_bijection(std::span<const std::uint64_t> mapping) {
  std::vector<bool> seen(mapping.size(), false);
  for (auto v : mapping) {
    if (v >= mapping.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.mapping_.resize(n);
  std::iota(p.mapping_.begin(), p.mapping_.end(), 0);
  return p;
}

Permutation Permutation::from_mapping(std::vector<std::uint64_t> mapping, Bytes seed) {
  if (!is_bijection(mapping)) fail(Errc::kInvalidArgument, "mapping is not a bijection");
  Permutation p;
  p.mapping_ = std::move(mapping);
  p.seed_ = std::move(seed);
  return p;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.mapping_.resize(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) p.mapping_[mapping_[i]] = i;
  return p;
}

Permutation Permutation::then(const Permutation& next) const {
  if (next.size() != size()) fail(Errc::kSizeMismatch, "composing permutations of different size");
  Permutation p;
  p.mapping_.resize(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) p.mapping_[i] = next.mapping_[mapping_[i]];
  return p;
}

Permutation permutation_from_seed(ByteView seed, std::size_t n) {
  if (n == 0) fail(Errc::kInvalidArgument, "permutation size must be positive");
  Prg prg(seed);
  // Shuffle the arrangement, then read it back as a destination map.
  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    auto j = prg.uniform(i + 1);
    std::swap(order[i], order[j]);
  }
  // order[k] is the item that lands at position k.
  std::vector<std::uint64_t> mapping(n);
  for (std::size_t k = 0; k < n; ++k) mapping[order[k]] = k;
  return Permutation::from_mapping(std::move(mapping), Bytes(seed.begin(), seed.end()));
}

}  // namespace mixoram
