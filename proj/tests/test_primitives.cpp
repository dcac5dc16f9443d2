#include <gtest/gtest.h>

#include <map>
#include <random>

#include "mixoram/bytes.hpp"
#include "mixoram/hash.hpp"
#include "mixoram/prg.hpp"
#include "support.hpp"

using namespace mixoram;
using mixoram::testing::fixed_seed;

TEST(Hash, Sha256Abc) {
  auto d = sha256(as_bytes(std::string_view("abc")));
  EXPECT_EQ(to_hex(d), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, HkdfRfc5869Case1) {
  Bytes ikm(22, 0x0b);
  auto salt = from_hex("000102030405060708090a0b0c");
  auto info = from_hex("f0f1f2f3f4f5f6f7f8f9");
  auto okm = hkdf_sha256(ikm, salt, info, 42);
  EXPECT_EQ(to_hex(okm),
            "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865");
}

TEST(Hash, HkdfRfc5869Case3EmptySaltAndInfo) {
  Bytes ikm(22, 0x0b);
  auto okm = hkdf_sha256(ikm, {}, {}, 42);
  EXPECT_EQ(to_hex(okm),
            "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8");
}

TEST(Hash, DerivedSecretsSplitKeyAndSeed) {
  auto a = derive_secrets(fixed_seed(1), Kappa::k128);
  EXPECT_EQ(a.enc_key.size(), 16u);
  EXPECT_EQ(a.perm_seed.size(), 16u);
  EXPECT_NE(a.enc_key, a.perm_seed);
  auto b = derive_secrets(fixed_seed(1), Kappa::k256);
  EXPECT_EQ(b.enc_key.size(), 32u);
  EXPECT_EQ(derive_secrets(fixed_seed(1), Kappa::k128), a);
}

TEST(Hash, KappaParsing) {
  EXPECT_EQ(kappa_from_bits(128), Kappa::k128);
  EXPECT_EQ(kappa_from_bits(256), Kappa::k256);
  try {
    kappa_from_bits(192);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnsupportedKappa);
  }
}

// Reference values from an independent AES implementation.
TEST(Prg, MatchesAesCtrFromZeroCounter) {
  Prg prg(from_hex("000102030405060708090a0b0c0d0e0f"));
  EXPECT_EQ(to_hex(prg.bytes(48)),
            "c6a13b37878f5b826f4f8162a1c8d8797346139595c0b41e497bbde365f42d0a"
            "49d68753999ba68ce3897a686081b09d");
}

TEST(Prg, StreamIsIndependentOfReadSizes) {
  Prg a(fixed_seed(3)), b(fixed_seed(3));
  auto whole = a.bytes(3000);
  Bytes pieces;
  for (std::size_t n : {1, 7, 1024, 1500, 468}) {
    auto p = b.bytes(n);
    pieces.insert(pieces.end(), p.begin(), p.end());
  }
  EXPECT_EQ(whole, pieces);
}

TEST(Prg, UniformStaysInRangeAndCoversIt) {
  Prg prg(fixed_seed(4));
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 7000; ++i) {
    auto x = prg.uniform(7);
    ASSERT_LT(x, 7u);
    ++seen[x];
  }
  EXPECT_EQ(seen.size(), 7u);
  for (auto& [k, c] : seen) EXPECT_NEAR(c, 1000, 150) << k;
  EXPECT_THROW(prg.uniform(0), Error);
}

TEST(Prg, RejectsBadSeedLength) { EXPECT_THROW(Prg(Bytes(5)), Error); }

TEST(Bytes, WriterReaderRoundTrip) {
  ByteWriter w;
  w.u8(1).u16(0x0203).u32(0x04050607).u64(0x08090a0b0c0d0e0fULL).blob(from_hex("aabb")).str("hi");
  auto bytes = w.bytes();
  ByteReader r(bytes);
  EXPECT_EQ(r.u8(), 1);
  EXPECT_EQ(r.u16(), 0x0203);
  EXPECT_EQ(r.u32(), 0x04050607u);
  EXPECT_EQ(r.u64(), 0x08090a0b0c0d0e0fULL);
  EXPECT_EQ(r.blob(), from_hex("aabb"));
  EXPECT_EQ(r.str(), "hi");
  EXPECT_TRUE(r.done());
  EXPECT_THROW(r.u8(), Error);
}

TEST(Bytes, HexRejectsOddLengthAndNonHex) {
  EXPECT_EQ(to_hex(from_hex("00ff10")), "00ff10");
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
}

TEST(Bytes, BigEndianHelpers) {
  Bytes out;
  put_be(out, 0x0102, 3);
  EXPECT_EQ(to_hex(out), "000102");
  EXPECT_EQ(load_be(out), 0x0102u);
}
