#pragma once

#include <array>
#include <compare>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

#include "mixoram/bytes.hpp"
#include "mixoram/error.hpp"
#include "mixoram/hash.hpp"
#include "mixoram/prg.hpp"

namespace mixoram {

struct RistrettoScalar {
  std::array<std::uint8_t, 32> v{};
  auto operator<=>(const RistrettoScalar&) const = default;
};

struct RistrettoPoint {
  std::array<std::uint8_t, 32> v{};
  auto operator<=>(const RistrettoPoint&) const = default;
};

// ristretto255 via libsodium: prime order l = 2^252 + 27742317777372353535851937790883648493,
// 32-byte canonical encodings for both points and scalars.
class Ristretto255 {
 public:
  using Scalar = RistrettoScalar;
  using Element = RistrettoPoint;
  static constexpr std::size_t kElementBytes = 32;
  static constexpr std::size_t kScalarBytes = 32;

  Ristretto255();

  Element generator() const;
  // Throws kIdentityElement if base is not a valid non-identity point or the result is the identity.
  Element exp(const Element& base, const Scalar& e) const;
  Element exp_base(const Scalar& e) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar one() const;
  bool is_zero(const Scalar& s) const;
  Scalar random_scalar(Prg& rng) const;
  Scalar reduce_wide(ByteView digest64) const;
  bool is_valid(const Element& e) const;

  Bytes encode(const Element& e) const { return Bytes(e.v.begin(), e.v.end()); }
  Bytes encode(const Scalar& s) const { return Bytes(s.v.begin(), s.v.end()); }
  Element decode_element(ByteView in) const;
  Scalar decode_scalar(ByteView in) const;
};

template <class G>
concept PrimeOrderGroup = requires(const G& g, const typename G::Scalar& s,
                                   const typename G::Element& e, Prg& rng, ByteView bv) {
  { g.generator() } -> std::same_as<typename G::Element>;
  { g.exp(e, s) } -> std::same_as<typename G::Element>;
  { g.exp_base(s) } -> std::same_as<typename G::Element>;
  { g.mul(s, s) } -> std::same_as<typename G::Scalar>;
  { g.one() } -> std::same_as<typename G::Scalar>;
  { g.is_zero(s) } -> std::same_as<bool>;
  { g.random_scalar(rng) } -> std::same_as<typename G::Scalar>;
  { g.reduce_wide(bv) } -> std::same_as<typename G::Scalar>;
  { g.encode(e) } -> std::same_as<Bytes>;
};

template <PrimeOrderGroup G>
struct KeyPair {
  typename G::Scalar priv;
  typename G::Element pub;
};

template <PrimeOrderGroup G>
KeyPair<G> keygen(const G& g, Prg& rng) {
  auto priv = g.random_scalar(rng);
  return {priv, g.exp_base(priv)};
}

template <PrimeOrderGroup G>
typename G::Element agree(const G& g, const typename G::Scalar& own_private,
                          const typename G::Element& other_public) {
  return g.exp(other_public, own_private);
}

template <PrimeOrderGroup G>
DerivedSecrets derive(const G& g, const typename G::Element& ss, Kappa kappa) {
  return derive_secrets(g.encode(ss), kappa);
}

// Blinding hash: SHA-512 over a domain tag, a retry counter and the canonical encodings,
// reduced mod the group order; zero is rejected by bumping the counter.
template <PrimeOrderGroup G>
typename G::Scalar blinding_hash(const G& g,
                                 std::initializer_list<const typename G::Element*> inputs) {
  static constexpr char kTag[] = "mixoram/blind/v1";
  for (std::uint8_t ctr = 0;; ++ctr) {
    ByteWriter w;
    w.raw(as_bytes(kTag)).u8(ctr);
    for (const auto* e : inputs) w.blob(g.encode(*e));
    auto d = sha512(w.bytes());
    auto b = g.reduce_wide(d);
    if (!g.is_zero(b)) return b;
  }
}

template <PrimeOrderGroup G>
struct AlphaStep {
  typename G::Element alpha;
  typename G::Element ss;
};

template <PrimeOrderGroup G>
AlphaStep<G> blind_alpha_with(const G& g, const typename G::Element& prev_alpha,
                              const typename G::Element& prev_ss,
                              const typename G::Scalar& factor) {
  return {g.exp(prev_alpha, factor), g.exp(prev_ss, factor)};
}

template <PrimeOrderGroup G>
AlphaStep<G> blind_alpha(const G& g, const typename G::Element& prev_alpha,
                         const typename G::Element& prev_ss) {
  return blind_alpha_with(g, prev_alpha, prev_ss, blinding_hash(g, {&prev_alpha, &prev_ss}));
}

template <PrimeOrderGroup G>
struct BetaStep {
  typename G::Element beta;
  typename G::Element sk;
};

// context is the client public key for the rebuild variant, absent for the layered one.
template <PrimeOrderGroup G>
BetaStep<G> blind_beta(const G& g, const typename G::Element& prev_beta,
                       const typename G::Element& prev_sk,
                       const std::optional<typename G::Element>& context = std::nullopt) {
  auto b = context ? blinding_hash(g, {&*context, &prev_sk}) : blinding_hash(g, {&prev_sk});
  return {g.exp(prev_beta, b), g.exp(prev_sk, b)};
}

// Per-round (k, sigma) for one mix, computed with the mix's private key x from alpha_0 = g^z.
template <PrimeOrderGroup G>
std::vector<DerivedSecrets> mix_private_schedule(const G& g, const typename G::Element& alpha0,
                                                 const typename G::Scalar& x,
                                                 std::size_t rounds, Kappa kappa) {
  std::vector<DerivedSecrets> out;
  out.reserve(rounds);
  auto alpha = alpha0;
  auto ss = agree(g, x, alpha);
  for (std::size_t j = 0; j < rounds; ++j) {
    out.push_back(derive(g, ss, kappa));
    if (j + 1 == rounds) break;
    alpha = g.exp(alpha, blinding_hash(g, {&alpha, &ss}));
    ss = agree(g, x, alpha);
  }
  return out;
}

// The same schedule reconstructed by the client from z and the mix public key y.
template <PrimeOrderGroup G>
std::vector<DerivedSecrets> client_private_schedule(const G& g, const typename G::Scalar& z,
                                                    const typename G::Element& y,
                                                    std::size_t rounds, Kappa kappa) {
  std::vector<DerivedSecrets> out;
  out.reserve(rounds);
  auto chain = z;
  for (std::size_t j = 0; j < rounds; ++j) {
    auto alpha = g.exp_base(chain);
    auto ss = g.exp(y, chain);
    out.push_back(derive(g, ss, kappa));
    if (j + 1 == rounds) break;
    chain = g.mul(chain, blinding_hash(g, {&alpha, &ss}));
  }
  return out;
}

// Shared public seeds sigma_pub,j from beta_i,0 and the mix's own share m_i.
template <PrimeOrderGroup G>
std::vector<Bytes> mix_public_schedule(const G& g, const typename G::Element& beta0,
                                       const typename G::Scalar& own_share, std::size_t rounds,
                                       Kappa kappa,
                                       const std::optional<typename G::Element>& context) {
  std::vector<Bytes> out;
  out.reserve(rounds);
  auto beta = beta0;
  auto sk = g.exp(beta0, own_share);
  for (std::size_t j = 0; j < rounds; ++j) {
    out.push_back(derive(g, sk, kappa).perm_seed);
    if (j + 1 == rounds) break;
    auto next = blind_beta(g, beta, sk, context);
    beta = next.beta;
    sk = next.sk;
  }
  return out;
}

// Client view: sk_0 = g^(prod m_l).
template <PrimeOrderGroup G>
std::vector<Bytes> client_public_schedule(const G& g, const typename G::Scalar& share_product,
                                          std::size_t rounds, Kappa kappa,
                                          const std::optional<typename G::Element>& context) {
  std::vector<Bytes> out;
  out.reserve(rounds);
  auto sk = g.exp_base(share_product);
  for (std::size_t j = 0; j < rounds; ++j) {
    out.push_back(derive(g, sk, kappa).perm_seed);
    if (j + 1 == rounds) break;
    auto b = context ? blinding_hash(g, {&*context, &sk}) : blinding_hash(g, {&sk});
    sk = g.exp(sk, b);
  }
  return out;
}

}  // namespace mixoram
