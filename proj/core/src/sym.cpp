#include "mixoram/sym.hpp"

#include <algorithm>
#include <bit>

#include "aes.hpp"
#include "mixoram/error.hpp"

namespace mixoram {
namespace {

constexpr std::size_t kBlock = 16;

void check_key(ByteView key) {
  if (key.size() != 16 && key.size() != 32) fail(Errc::kSizeMismatch, "key must be 16 or 32 bytes");
}

void check_shape(const LayeredRecord& rec) {
  if (rec.iv_token.empty() || rec.iv_token.size() > kBlock) {
    fail(Errc::kSizeMismatch, "iv token must be 1..16 bytes");
  }
  if (rec.body.size() < kBlock) fail(Errc::kSizeMismatch, "layered body shorter than one block");
}

std::array<std::uint8_t, kBlock> padded_iv(ByteView token) {
  std::array<std::uint8_t, kBlock> iv{};
  std::copy(token.begin(), token.end(), iv.begin());
  return iv;
}

}  // namespace

std::size_t label_bytes(std::uint64_t n) {
  if (n == 0) fail(Errc::kInvalidArgument, "database size must be positive");
  std::size_t bits = static_cast<std::size_t>(std::bit_width(n - 1));
  return std::max<std::size_t>(1, (bits + 7) / 8);
}

LayeredFormat LayeredFormat::for_database(std::uint64_t n, std::size_t payload_bytes) {
  if (payload_bytes == 0 || payload_bytes % kBlock != 0) {
    fail(Errc::kConfigMismatch, "payload size must be a positive multiple of 16 bytes");
  }
  LayeredFormat f;
  f.label_bytes = mixoram::label_bytes(n);
  f.payload_bytes = payload_bytes;
  return f;
}

LayeredRecord make_layered_record(const LayeredFormat& fmt, std::uint64_t label, ByteView payload,
                                  ByteView iv_token) {
  if (payload.size() != fmt.payload_bytes || iv_token.size() != fmt.label_bytes) {
    fail(Errc::kSizeMismatch, "payload or token length does not match the format");
  }
  LayeredRecord rec;
  rec.iv_token.assign(iv_token.begin(), iv_token.end());
  rec.body.reserve(fmt.body_bytes());
  put_be(rec.body, label, fmt.label_bytes);
  rec.body.insert(rec.body.end(), payload.begin(), payload.end());
  return rec;
}

std::uint64_t record_label(const LayeredRecord& rec, const LayeredFormat& fmt) {
  if (rec.body.size() != fmt.body_bytes()) fail(Errc::kSizeMismatch, "body length mismatch");
  return load_be(ByteView(rec.body).first(fmt.label_bytes));
}

Bytes record_payload(const LayeredRecord& rec, const LayeredFormat& fmt) {
  if (rec.body.size() != fmt.body_bytes()) fail(Errc::kSizeMismatch, "body length mismatch");
  return Bytes(rec.body.begin() + static_cast<std::ptrdiff_t>(fmt.label_bytes), rec.body.end());
}

Bytes to_cell(const LayeredRecord& rec) {
  Bytes cell(rec.iv_token);
  cell.insert(cell.end(), rec.body.begin(), rec.body.end());
  return cell;
}

LayeredRecord layered_from_cell(ByteView cell, const LayeredFormat& fmt) {
  if (cell.size() != fmt.cell_bytes()) fail(Errc::kSizeMismatch, "cell length mismatch");
  LayeredRecord rec;
  rec.iv_token.assign(cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(fmt.label_bytes));
  rec.body.assign(cell.begin() + static_cast<std::ptrdiff_t>(fmt.label_bytes), cell.end());
  return rec;
}

LayeredRecord layered_wrap(const LayeredRecord& rec, ByteView key) {
  check_key(key);
  check_shape(rec);
  LayeredRecord out = rec;
  auto iv = padded_iv(rec.iv_token);
  detail::aes_crypt(detail::AesMode::kCbcCts, key, iv, out.body, true);
  detail::aes_crypt(detail::AesMode::kCfb128, key, ByteView(out.body).first(kBlock), out.iv_token,
                    true);
  return out;
}

LayeredRecord layered_unwrap(const LayeredRecord& rec, ByteView key) {
  check_key(key);
  check_shape(rec);
  LayeredRecord out = rec;
  detail::aes_crypt(detail::AesMode::kCfb128, key, ByteView(rec.body).first(kBlock), out.iv_token,
                    false);
  auto iv = padded_iv(out.iv_token);
  detail::aes_crypt(detail::AesMode::kCbcCts, key, iv, out.body, false);
  return out;
}

std::array<std::uint8_t, 16> nonce_block(const CtrNonce& nonce) {
  std::array<std::uint8_t, 16> block{};
  store_be(MutableByteView(block).subspan(0, 4), nonce.epoch);
  block[4] = static_cast<std::uint8_t>(nonce.phase);
  store_be(MutableByteView(block).subspan(5, 8), nonce.counter);
  return block;
}

RebuildRecord ctr_layer(const RebuildRecord& rec, ByteView key, const CtrNonce& nonce,
                        std::uint64_t n) {
  check_key(key);
  if (nonce.counter >= n) fail(Errc::kCounterOutOfRange, "counter beyond database size");
  RebuildRecord out = rec;
  auto iv = nonce_block(nonce);
  detail::aes_crypt(detail::AesMode::kCtr, key, iv, out.body, true);
  return out;
}

CtrKey::CtrKey(ByteView key) : stream_(std::make_unique<detail::CtrStream>(key)) {}
CtrKey::~CtrKey() = default;
CtrKey::CtrKey(CtrKey&&) noexcept = default;
CtrKey& CtrKey::operator=(CtrKey&&) noexcept = default;

void CtrKey::apply(MutableByteView body, const CtrNonce& nonce) {
  auto iv = nonce_block(nonce);
  stream_->reset(iv);
  stream_->xor_stream(body);
}

LayeredRecord RecordCipher::wrap(const LayeredRecord& rec, ByteView key) const {
  if (null_) {
    check_shape(rec);
    return rec;
  }
  return layered_wrap(rec, key);
}

LayeredRecord RecordCipher::unwrap(const LayeredRecord& rec, ByteView key) const {
  if (null_) {
    check_shape(rec);
    return rec;
  }
  return layered_unwrap(rec, key);
}

void RecordCipher::ctr(MutableByteView body, ByteView key, const CtrNonce& nonce) const {
  if (null_) return;
  check_key(key);
  auto iv = nonce_block(nonce);
  detail::aes_crypt(detail::AesMode::kCtr, key, iv, body, true);
}

}  // namespace mixoram
