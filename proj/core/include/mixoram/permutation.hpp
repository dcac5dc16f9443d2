#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixoram/bytes.hpp"
#include "mixoram/error.hpp"

namespace mixoram {

// mapping[i] is the destination of the item currently at position i.
class Permutation {
 public:
  Permutation() = default;
  static Permutation identity(std::size_t n);
  // Throws kInvalidArgument if mapping is not a bijection on [0, n).
  static Permutation from_mapping(std::vector<std::uint64_t> mapping, Bytes seed = {});

  std::size_t size() const { return mapping_.size(); }
  std::uint64_t operator[](std::size_t i) const { return mapping_[i]; }
  const std::vector<std::uint64_t>& mapping() const { return mapping_; }
  const Bytes& seed() const { return seed_; }

  Permutation inverse() const;
  // Applies *this first, then next.
  Permutation then(const Permutation& next) const;

  template <class T>
  std::vector<T> apply(std::span<const T> items) const {
    if (items.size() != mapping_.size()) fail(Errc::kSizeMismatch, "permutation size mismatch");
    std::vector<T> out(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) out[mapping_[i]] = items[i];
    return out;
  }
  template <class T>
  std::vector<T> apply(const std::vector<T>& items) const {
    return apply(std::span<const T>(items));
  }

  bool operator==(const Permutation& o) const { return mapping_ == o.mapping_; }

 private:
  std::vector<std::uint64_t> mapping_;
  Bytes seed_;
};

// Fisher-Yates driven by the AES-CTR PRG keyed with seed.
Permutation permutation_from_seed(ByteView seed, std::size_t n);

inline Permutation invert(const Permutation& p) { return p.inverse(); }

bool is_bijection(std::span<const std::uint64_t> mapping);

}  // namespace mixoram
