#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "mixoram/bytes.hpp"

namespace mixoram {

namespace detail {
class CtrStream;
}

// ---- Layered records ------------------------------------------------------

// Label width in bytes: ceil(log2(n) / 8), at least 1.
std::size_t label_bytes(std::uint64_t n);

struct LayeredFormat {
  std::size_t label_bytes = 1;
  std::size_t payload_bytes = 16;

  // payload_bytes must be a positive multiple of the AES block size (kConfigMismatch otherwise).
  static LayeredFormat for_database(std::uint64_t n, std::size_t payload_bytes);

  std::size_t body_bytes() const { return label_bytes + payload_bytes; }
  std::size_t cell_bytes() const { return label_bytes + body_bytes(); }
};

struct LayeredRecord {
  Bytes iv_token;  // label_bytes long
  Bytes body;      // label || payload, encrypted by every layer

  bool operator==(const LayeredRecord&) const = default;
};

LayeredRecord make_layered_record(const LayeredFormat& fmt, std::uint64_t label, ByteView payload,
                                  ByteView iv_token);
std::uint64_t record_label(const LayeredRecord& rec, const LayeredFormat& fmt);
Bytes record_payload(const LayeredRecord& rec, const LayeredFormat& fmt);
Bytes to_cell(const LayeredRecord& rec);
LayeredRecord layered_from_cell(ByteView cell, const LayeredFormat& fmt);

// body' = AES-CBC (ciphertext stealing, CS1) under iv = iv_token zero-padded to 16 bytes;
// iv_token' = iv_token XOR the leading bytes of E_k(first cipher block of body').
LayeredRecord layered_wrap(const LayeredRecord& rec, ByteView key);
LayeredRecord layered_unwrap(const LayeredRecord& rec, ByteView key);

// ---- Counter-mode onion layers ---------------------------------------------

enum class LayerPhase : std::uint8_t { kClient = 0, kEncDec = 1, kWrap = 2, kCache = 3 };

struct CtrNonce {
  std::uint32_t epoch = 0;
  LayerPhase phase = LayerPhase::kClient;
  std::uint64_t counter = 0;
};

// epoch u32 || phase u8 || counter u64 || 24-bit block counter starting at zero.
std::array<std::uint8_t, 16> nonce_block(const CtrNonce& nonce);

struct RebuildRecord {
  Bytes body;
  std::uint64_t index = 0;

  bool operator==(const RebuildRecord&) const = default;
};

// XOR with the keystream for (key, nonce). Throws kCounterOutOfRange if nonce.counter >= n.
RebuildRecord ctr_layer(const RebuildRecord& rec, ByteView key, const CtrNonce& nonce,
                        std::uint64_t n);

// Key-expanded CTR layer for applying one key to many records.
class CtrKey {
 public:
  explicit CtrKey(ByteView key);
  ~CtrKey();
  CtrKey(CtrKey&&) noexcept;
  CtrKey& operator=(CtrKey&&) noexcept;

  void apply(MutableByteView body, const CtrNonce& nonce);

 private:
  std::unique_ptr<detail::CtrStream> stream_;
};

// Record ciphering used by mixes and the client. The null mode is a test hook that turns
// every layer into the identity.
class RecordCipher {
 public:
  explicit RecordCipher(bool null_mode = false) : null_(null_mode) {}

  bool null_mode() const { return null_; }
  LayeredRecord wrap(const LayeredRecord& rec, ByteView key) const;
  LayeredRecord unwrap(const LayeredRecord& rec, ByteView key) const;
  void ctr(MutableByteView body, ByteView key, const CtrNonce& nonce) const;

 private:
  bool null_;
};

}  // namespace mixoram
