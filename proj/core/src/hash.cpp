#include "mixoram/hash.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>

#include <memory>
#include <string>

#include "mixoram/error.hpp"

namespace mixoram {
namespace {

template <std::size_t N>
std::array<std::uint8_t, N> digest(const EVP_MD* md, ByteView data) {
  std::array<std::uint8_t, N> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1 || len != N) {
    fail(Errc::kCrypto, "digest failed");
  }
  return out;
}

constexpr char kDeriveInfo[] = "mixoram/derive/v1";

}  // namespace

std::array<std::uint8_t, 32> sha256(ByteView data) { return digest<32>(EVP_sha256(), data); }
std::array<std::uint8_t, 64> sha512(ByteView data) { return digest<64>(EVP_sha512(), data); }

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length) {
  std::unique_ptr<EVP_KDF, decltype(&EVP_KDF_free)> kdf(EVP_KDF_fetch(nullptr, "HKDF", nullptr),
                                                       &EVP_KDF_free);
  if (!kdf) fail(Errc::kCrypto, "HKDF unavailable");
  std::unique_ptr<EVP_KDF_CTX, decltype(&EVP_KDF_CTX_free)> ctx(EVP_KDF_CTX_new(kdf.get()),
                                                               &EVP_KDF_CTX_free);
  char digest_name[] = "SHA256";
  OSSL_PARAM params[5];
  int n = 0;
  params[n++] = OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest_name, 0);
  params[n++] = OSSL_PARAM_construct_octet_string(
      OSSL_KDF_PARAM_KEY, const_cast<std::uint8_t*>(ikm.data()), ikm.size());
  if (!salt.empty()) {
    params[n++] = OSSL_PARAM_construct_octet_string(
        OSSL_KDF_PARAM_SALT, const_cast<std::uint8_t*>(salt.data()), salt.size());
  }
  params[n++] = OSSL_PARAM_construct_octet_string(
      OSSL_KDF_PARAM_INFO, const_cast<std::uint8_t*>(info.data()), info.size());
  params[n] = OSSL_PARAM_construct_end();
  Bytes out(length);
  if (EVP_KDF_derive(ctx.get(), out.data(), out.size(), params) != 1) {
    fail(Errc::kCrypto, "HKDF derive failed");
  }
  return out;
}

Kappa kappa_from_bits(unsigned bits) {
  if (bits == 128) return Kappa::k128;
  if (bits == 256) return Kappa::k256;
  fail(Errc::kUnsupportedKappa, "kappa must be 128 or 256, got " + std::to_string(bits));
}

DerivedSecrets derive_secrets(ByteView shared_secret, Kappa kappa) {
  const auto kb = kappa_bytes(kappa);
  if (kb != 16 && kb != 32) fail(Errc::kUnsupportedKappa, "kappa must be 128 or 256");
  auto okm = hkdf_sha256(shared_secret, {}, as_bytes(kDeriveInfo), 2 * kb);
  DerivedSecrets out;
  out.enc_key.assign(okm.begin(), okm.begin() + static_cast<std::ptrdiff_t>(kb));
  out.perm_seed.assign(okm.begin() + static_cast<std::ptrdiff_t>(kb), okm.end());
  return out;
}

}  // namespace mixoram
