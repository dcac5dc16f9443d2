#pragma once

#include <cstdint>
#include <limits>
#include <memory>

#include "mixoram/bytes.hpp"

namespace mixoram {

namespace detail {
class CtrStream;
}

// AES-CTR keystream keyed by a 16- or 32-byte seed, starting from a zero counter block.
// Also satisfies UniformRandomBitGenerator.
class Prg {
 public:
  using result_type = std::uint64_t;

  explicit Prg(ByteView seed);
  ~Prg();
  Prg(Prg&&) noexcept;
  Prg& operator=(Prg&&) noexcept;

  void fill(MutableByteView out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  // Unbiased draw from [0, bound) by rejection sampling; bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  std::unique_ptr<detail::CtrStream> stream_;
  Bytes buf_;
  std::size_t pos_ = 0;
};

// Unbiased draw from [0, bound) for any 64-bit generator.
template <class Urbg>
std::uint64_t uniform_below(Urbg& rng, std::uint64_t bound) {
  static_assert(Urbg::min() == 0 && Urbg::max() == std::numeric_limits<std::uint64_t>::max());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace mixoram
