#pragma once

#include <array>
#include <cstdint>

#include "mixoram/bytes.hpp"

namespace mixoram {

std::array<std::uint8_t, 32> sha256(ByteView data);
std::array<std::uint8_t, 64> sha512(ByteView data);

// HKDF-SHA256 (RFC 5869). An empty salt is treated as HashLen zero bytes.
Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length);

enum class Kappa : std::uint16_t { k128 = 128, k256 = 256 };

// Throws kUnsupportedKappa for anything but 128 or 256.
Kappa kappa_from_bits(unsigned bits);
inline std::size_t kappa_bytes(Kappa k) { return static_cast<std::size_t>(k) / 8; }

struct DerivedSecrets {
  Bytes enc_key;
  Bytes perm_seed;

  bool operator==(const DerivedSecrets&) const = default;
};

// 2*kappa bits of HKDF output, key first then seed.
DerivedSecrets derive_secrets(ByteView shared_secret, Kappa kappa);

}  // namespace mixoram
