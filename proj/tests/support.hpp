#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mixoram/bytes.hpp"
#include "mixoram/client.hpp"
#include "mixoram/group.hpp"
#include "mixoram/ports.hpp"
#include "mixoram/prg.hpp"
#include "mixoram/storage.hpp"

namespace mixoram::testing {

// Order-11 subgroup of Z_23^*, generated by 2. Small enough to enumerate every key.
struct ToyGroup {
  static constexpr std::uint64_t kP = 23;
  static constexpr std::uint64_t kQ = 11;

  struct Scalar {
    std::uint64_t v = 0;
    auto operator<=>(const Scalar&) const = default;
  };
  struct Element {
    std::uint64_t v = 1;
    auto operator<=>(const Element&) const = default;
  };

  static std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    b %= kP;
    while (e) {
      if (e & 1) r = r * b % kP;
      b = b * b % kP;
      e >>= 1;
    }
    return r;
  }

  Element generator() const { return {2}; }
  Element exp(const Element& base, const Scalar& e) const {
    if (base.v == 1 || e.v % kQ == 0) fail(Errc::kIdentityElement, "toy identity");
    return {pow_mod(base.v, e.v)};
  }
  Element exp_base(const Scalar& e) const { return exp(generator(), e); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return {a.v * b.v % kQ}; }
  Scalar one() const { return {1}; }
  bool is_zero(const Scalar& s) const { return s.v % kQ == 0; }
  Scalar random_scalar(Prg& rng) const { return {1 + rng.uniform(kQ - 1)}; }
  Scalar reduce_wide(ByteView d) const {
    std::uint64_t acc = 0;
    for (auto b : d) acc = (acc * 256 + b) % kQ;
    return {acc};
  }
  Bytes encode(const Element& e) const { return {static_cast<std::uint8_t>(e.v)}; }
};

inline Bytes fixed_seed(std::uint8_t tag, std::size_t len = 16) {
  Bytes s(len);
  for (std::size_t i = 0; i < len; ++i) s[i] = static_cast<std::uint8_t>(tag * 31 + i);
  return s;
}

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

// A client plus matching mixes' keys, enough to produce real instructions without a network.
struct InstructionFixture {
  Ristretto255 g;
  std::vector<RistrettoScalar> mix_keys;
  std::unique_ptr<Client> client;
  std::unique_ptr<Storage> storage;
  std::unique_ptr<LocalStore> store;

  InstructionFixture(Design d, std::uint64_t n, std::uint32_t m, std::size_t s,
                     std::uint64_t seed = 1) {
    std::vector<MixInfo> infos;
    for (std::uint32_t i = 0; i < m; ++i) {
      Prg rng(fixed_seed(static_cast<std::uint8_t>(seed * 17 + i)));
      mix_keys.push_back(g.random_scalar(rng));
      infos.push_back({g.exp_base(mix_keys.back()), {"mix", static_cast<std::uint16_t>(i)}});
    }
    ClientConfig cc;
    cc.design = d;
    cc.n = n;
    cc.payload_bytes = 32;
    cc.cache_slots = s;
    client = std::make_unique<Client>(cc, infos, fixed_seed(static_cast<std::uint8_t>(seed)));
    storage = std::make_unique<Storage>(n, cc.cell_bytes(), s);
    store = std::make_unique<LocalStore>(*storage);
    client->preprocess(std::vector<Bytes>(n, Bytes(cc.payload_bytes, 0)), *store);
  }
};

}  // namespace mixoram::testing
