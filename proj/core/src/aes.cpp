#include "aes.hpp"

#include <openssl/core_names.h>

#include <mutex>

#include "mixoram/error.hpp"

namespace mixoram::detail {
namespace {

struct CipherTable {
  EVP_CIPHER* ciphers[4][2] = {};

  CipherTable() {
    const char* names[4][2] = {{"AES-128-CTR", "AES-256-CTR"},
                               {"AES-128-CBC-CTS", "AES-256-CBC-CTS"},
                               {"AES-128-CFB", "AES-256-CFB"},
                               {"AES-128-ECB", "AES-256-ECB"}};
    for (int m = 0; m < 4; ++m) {
      for (int k = 0; k < 2; ++k) ciphers[m][k] = EVP_CIPHER_fetch(nullptr, names[m][k], nullptr);
    }
  }
  ~CipherTable() {
    for (auto& row : ciphers) {
      for (auto* c : row) EVP_CIPHER_free(c);
    }
  }
};

const CipherTable& table() {
  static const CipherTable t;
  return t;
}

}  // namespace

const EVP_CIPHER* aes_cipher(AesMode mode, std::size_t key_len) {
  int k = key_len == 16 ? 0 : key_len == 32 ? 1 : -1;
  if (k < 0) fail(Errc::kSizeMismatch, "AES key must be 16 or 32 bytes");
  const EVP_CIPHER* c = table().ciphers[static_cast<int>(mode)][k];
  if (c == nullptr) fail(Errc::kCrypto, "cipher unavailable in this OpenSSL build");
  return c;
}

void aes_crypt(AesMode mode, ByteView key, ByteView iv, MutableByteView data, bool encrypt) {
  if (data.empty()) return;
  const EVP_CIPHER* cipher = aes_cipher(mode, key.size());
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail(Errc::kCrypto, "EVP_CIPHER_CTX_new failed");
  OSSL_PARAM params[2] = {OSSL_PARAM_construct_end(), OSSL_PARAM_construct_end()};
  char cts_mode[] = "CS1";
  if (mode == AesMode::kCbcCts) {
    params[0] = OSSL_PARAM_construct_utf8_string(OSSL_CIPHER_PARAM_CTS_MODE, cts_mode, 0);
  }
  if (EVP_CipherInit_ex2(ctx.get(), cipher, key.data(), iv.empty() ? nullptr : iv.data(),
                         encrypt ? 1 : 0, params) != 1) {
    fail(Errc::kCrypto, "cipher init failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  int out_len = 0;
  if (EVP_CipherUpdate(ctx.get(), data.data(), &out_len, data.data(),
                       static_cast<int>(data.size())) != 1 ||
      static_cast<std::size_t>(out_len) != data.size()) {
    fail(Errc::kCrypto, "cipher update failed");
  }
}

CtrStream::CtrStream(ByteView key) : ctx_(EVP_CIPHER_CTX_new()) {
  if (!ctx_) fail(Errc::kCrypto, "EVP_CIPHER_CTX_new failed");
  const EVP_CIPHER* cipher = aes_cipher(AesMode::kCtr, key.size());
  if (EVP_EncryptInit_ex2(ctx_.get(), cipher, key.data(), nullptr, nullptr) != 1) {
    fail(Errc::kCrypto, "CTR init failed");
  }
}

void CtrStream::reset(ByteView iv16) {
  if (iv16.size() != 16) fail(Errc::kSizeMismatch, "CTR IV must be 16 bytes");
  if (EVP_EncryptInit_ex2(ctx_.get(), nullptr, nullptr, iv16.data(), nullptr) != 1) {
    fail(Errc::kCrypto, "CTR IV reset failed");
  }
}

void CtrStream::xor_stream(MutableByteView data) {
  if (data.empty()) return;
  int out_len = 0;
  if (EVP_EncryptUpdate(ctx_.get(), data.data(), &out_len, data.data(),
                        static_cast<int>(data.size())) != 1) {
    fail(Errc::kCrypto, "CTR update failed");
  }
}

}  // namespace mixoram::detail
