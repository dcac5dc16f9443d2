#include "mixoram/bytes.hpp"

#include "mixoram/error.hpp"

namespace mixoram {

void put_be(Bytes& out, std::uint64_t value, std::size_t width) {
  for (std::size_t i = width; i-- > 0;) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

void store_be(MutableByteView out, std::uint64_t value) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<std::uint8_t>(value);
    value >>= 8;
  }
}

std::uint64_t load_be(ByteView in) {
  std::uint64_t v = 0;
  for (auto b : in) v = (v << 8) | b;
  return v;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}
ByteWriter& ByteWriter::u16(std::uint16_t v) {
  put_be(buf_, v, 2);
  return *this;
}
ByteWriter& ByteWriter::u32(std::uint32_t v) {
  put_be(buf_, v, 4);
  return *this;
}
ByteWriter& ByteWriter::u64(std::uint64_t v) {
  put_be(buf_, v, 8);
  return *this;
}
ByteWriter& ByteWriter::raw(ByteView data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}
ByteWriter& ByteWriter::blob(ByteView data) {
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}
ByteWriter& ByteWriter::str(std::string_view s) { return blob(as_bytes(s)); }

ByteView ByteReader::raw(std::size_t len) {
  if (remaining() < len) fail(Errc::kMalformedFrame, "truncated input");
  auto out = data_.subspan(pos_, len);
  pos_ += len;
  return out;
}
std::uint8_t ByteReader::u8() { return raw(1)[0]; }
std::uint16_t ByteReader::u16() { return static_cast<std::uint16_t>(load_be(raw(2))); }
std::uint32_t ByteReader::u32() { return static_cast<std::uint32_t>(load_be(raw(4))); }
std::uint64_t ByteReader::u64() { return load_be(raw(8)); }
Bytes ByteReader::blob() {
  auto len = u32();
  auto v = raw(len);
  return Bytes(v.begin(), v.end());
}
std::string ByteReader::str() {
  auto b = blob();
  return std::string(b.begin(), b.end());
}
void ByteReader::expect_done() const {
  if (!done()) fail(Errc::kMalformedFrame, "trailing bytes");
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) fail(Errc::kInvalidArgument, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(Errc::kInvalidArgument, "bad hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void xor_into(MutableByteView dst, ByteView src) {
  if (dst.size() != src.size()) fail(Errc::kSizeMismatch, "xor operands differ in length");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

}  // namespace mixoram
