#include "mixoram/group.hpp"

#include <sodium.h>

#include <algorithm>

namespace mixoram {

Ristretto255::Ristretto255() {
  if (sodium_init() < 0) fail(Errc::kCrypto, "libsodium initialisation failed");
}

Ristretto255::Element Ristretto255::generator() const { return exp_base(one()); }

Ristretto255::Element Ristretto255::exp(const Element& base, const Scalar& e) const {
  Element out;
  if (crypto_scalarmult_ristretto255(out.v.data(), e.v.data(), base.v.data()) != 0) {
    fail(Errc::kIdentityElement, "exponentiation produced or received the identity");
  }
  return out;
}

Ristretto255::Element Ristretto255::exp_base(const Scalar& e) const {
  Element out;
  if (crypto_scalarmult_ristretto255_base(out.v.data(), e.v.data()) != 0) {
    fail(Errc::kIdentityElement, "base exponentiation by zero");
  }
  return out;
}

Ristretto255::Scalar Ristretto255::mul(const Scalar& a, const Scalar& b) const {
  Scalar out;
  crypto_core_ristretto255_scalar_mul(out.v.data(), a.v.data(), b.v.data());
  return out;
}

Ristretto255::Scalar Ristretto255::one() const {
  Scalar s;
  s.v[0] = 1;
  return s;
}

bool Ristretto255::is_zero(const Scalar& s) const {
  return std::all_of(s.v.begin(), s.v.end(), [](std::uint8_t b) { return b == 0; });
}

Ristretto255::Scalar Ristretto255::random_scalar(Prg& rng) const {
  for (;;) {
    std::array<std::uint8_t, 64> wide{};
    rng.fill(wide);
    auto s = reduce_wide(wide);
    if (!is_zero(s)) return s;
  }
}

Ristretto255::Scalar Ristretto255::reduce_wide(ByteView digest64) const {
  if (digest64.size() != 64) fail(Errc::kSizeMismatch, "wide reduction needs 64 bytes");
  std::array<std::uint8_t, 64> buf{};
  std::copy(digest64.begin(), digest64.end(), buf.begin());
  Scalar out;
  crypto_core_ristretto255_scalar_reduce(out.v.data(), buf.data());
  return out;
}

bool Ristretto255::is_valid(const Element& e) const {
  if (crypto_core_ristretto255_is_valid_point(e.v.data()) != 1) return false;
  return std::any_of(e.v.begin(), e.v.end(), [](std::uint8_t b) { return b != 0; });
}

Ristretto255::Element Ristretto255::decode_element(ByteView in) const {
  if (in.size() != kElementBytes) fail(Errc::kSizeMismatch, "group element must be 32 bytes");
  Element e;
  std::copy(in.begin(), in.end(), e.v.begin());
  if (!is_valid(e)) fail(Errc::kIdentityElement, "not a valid non-identity group element");
  return e;
}

Ristretto255::Scalar Ristretto255::decode_scalar(ByteView in) const {
  if (in.size() != kScalarBytes) fail(Errc::kSizeMismatch, "scalar must be 32 bytes");
  std::array<std::uint8_t, 64> wide{};
  std::copy(in.begin(), in.end(), wide.begin());
  Scalar reduced;
  crypto_core_ristretto255_scalar_reduce(reduced.v.data(), wide.data());
  if (!std::equal(in.begin(), in.end(), reduced.v.begin())) {
    fail(Errc::kInvalidArgument, "non-canonical scalar encoding");
  }
  return reduced;
}

}  // namespace mixoram
