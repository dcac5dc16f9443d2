#pragma once

// Thin RAII layer over OpenSSL EVP for the AES modes used in this library.

#include <openssl/evp.h>

#include <memory>

#include "mixoram/bytes.hpp"

namespace mixoram::detail {

enum class AesMode { kCtr, kCbcCts, kCfb128, kEcb };

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

// Fetched once per process; key length picks AES-128 or AES-256.
const EVP_CIPHER* aes_cipher(AesMode mode, std::size_t key_len);

// Runs the cipher over data in place. iv may be empty for ECB.
void aes_crypt(AesMode mode, ByteView key, ByteView iv, MutableByteView data, bool encrypt);

// Keyed CTR stream that can be re-seeded with a new IV without re-expanding the key.
class CtrStream {
 public:
  explicit CtrStream(ByteView key);
  void reset(ByteView iv16);
  void xor_stream(MutableByteView data);

 private:
  CipherCtx ctx_;
};

}  // namespace mixoram::detail
