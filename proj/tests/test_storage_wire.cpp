#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "mixoram/instruction.hpp"
#include "mixoram/storage.hpp"
#include "mixoram/wire.hpp"
#include "support.hpp"

using namespace mixoram;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::kCrypto;
}

}  // namespace

TEST(Storage, ReadWriteAndLogging) {
  Storage st(8, 4, 2);
  AccessContext ctx{3, 1, 2};
  st.db_write(5, Bytes{1, 2, 3, 4}, ctx);
  EXPECT_EQ(st.db_read(5, ctx), (Bytes{1, 2, 3, 4}));
  st.cache_write(1, Bytes{9, 9, 9, 9}, ctx);
  EXPECT_EQ(st.cache_fill(), 1u);
  auto log = st.export_view();
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0], (AccessEntry{AccessOp::kWrite, StoreArray::kDatabase, 5, 3, 1, 2, 4}));
  EXPECT_EQ(log[2].array, StoreArray::kCache);
  st.flush_cache();
  EXPECT_EQ(st.cache_fill(), 0u);
}

TEST(Storage, RejectsBadSlotsAndCells) {
  Storage st(4, 4, 1);
  EXPECT_EQ(code_of([&] { st.db_read(4, {}); }), Errc::kOutOfRange);
  EXPECT_EQ(code_of([&] { st.cache_read(1, {}); }), Errc::kOutOfRange);
  EXPECT_EQ(code_of([&] { st.db_write(0, Bytes{1, 2}, {}); }), Errc::kSizeMismatch);
}

TEST(Storage, SnapshotRoundTrip) {
  Storage st(6, 8, 2);
  std::mt19937_64 rng(1);
  for (std::uint64_t i = 0; i < 6; ++i) st.db_write(i, mixoram::testing::random_bytes(rng, 8), {});
  st.cache_write(0, mixoram::testing::random_bytes(rng, 8), {});
  st.set_epoch(7);
  auto path = std::filesystem::temp_directory_path() / "mixoram_snapshot_test.bin";
  st.save_snapshot(path);
  auto back = Storage::load_snapshot(path);
  EXPECT_EQ(back.size(), 6u);
  EXPECT_EQ(back.epoch(), 7u);
  EXPECT_EQ(back.raw_database(), st.raw_database());
  EXPECT_EQ(back.raw_cache(), st.raw_cache());

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
  }
  EXPECT_EQ(code_of([&] { Storage::load_snapshot(path); }), Errc::kBadSnapshot);
  std::filesystem::remove(path);
}

TEST(Wire, FrameRoundTripAndLayout) {
  Frame f{FrameType::kRecordBatch, 0x0102030405060708ull, Phase::kWrap, 0x0a0b, 7, Bytes{0xaa, 0xbb}};
  auto enc = encode_frame(f);
  ASSERT_EQ(enc.size(), kFrameHeaderBytes + 2);
  EXPECT_EQ(to_hex(enc), "0000000f02010203040506070803" "0a0b07aabb");
  EXPECT_EQ(decode_frame(enc), f);
  enc.pop_back();
  EXPECT_EQ(code_of([&] { decode_frame(enc); }), Errc::kMalformedFrame);
}

TEST(Wire, RejectsUnknownTypeAndPhase) {
  Frame f{FrameType::kAck, 1, Phase::kControl, 0, 1, {}};
  auto enc = encode_frame(f);
  auto bad_type = enc;
  bad_type[4] = 0x77;
  EXPECT_EQ(code_of([&] { decode_frame(bad_type); }), Errc::kMalformedFrame);
  auto bad_phase = enc;
  bad_phase[13] = 0x40;
  EXPECT_EQ(code_of([&] { decode_frame(bad_phase); }), Errc::kMalformedFrame);
}

TEST(Wire, BatchAndSlots) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<SlotCell> cells;
    const auto count = rng() % 20;
    for (std::uint64_t i = 0; i < count; ++i) cells.push_back({rng(), mixoram::testing::random_bytes(rng, 24)});
    ASSERT_EQ(decode_batch(encode_batch(cells)), cells);
  }
  std::vector<std::uint64_t> slots{0, 5, 1ull << 40};
  EXPECT_EQ(decode_slots(encode_slots(slots)), slots);
  std::vector<SlotCell> uneven{{0, Bytes(3)}, {1, Bytes(4)}};
  EXPECT_THROW(encode_batch(uneven), Error);
  auto truncated = encode_slots(slots);
  truncated.resize(truncated.size() - 1);
  EXPECT_THROW(decode_slots(truncated), Error);
}

TEST(Endpoint, ParseAndFormat) {
  auto e = parse_endpoint("127.0.0.1:9000");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 9000);
  EXPECT_EQ(to_string(e), "127.0.0.1:9000");
  EXPECT_THROW(parse_endpoint("nohost"), Error);
  EXPECT_THROW(parse_endpoint("h:70000"), Error);
}

TEST(Instruction, RoundTripForEveryDesign) {
  for (auto d : kAllDesigns) {
    mixoram::testing::InstructionFixture fx(d, 16, 2, 4);
    // Rebuild instructions after the first eviction carry the old-epoch fields too.
    for (int epoch = 0; epoch < 2; ++epoch) {
      auto instrs = fx.client->make_instructions({"db", 1});
      ASSERT_EQ(instrs.size(), 2u);
      for (auto& in : instrs) {
        EXPECT_NO_THROW(validate(in));
        auto back = decode_instruction(encode_instruction(in));
        EXPECT_EQ(encode_instruction(back), encode_instruction(in));
        EXPECT_EQ(back.mix_index, in.mix_index);
        EXPECT_EQ(back.rounds, in.rounds);
        EXPECT_EQ(back.design, d);
      }
      fx.client->finish_eviction();
    }
  }
}

TEST(Instruction, ValidateRejectsMissingFields) {
  mixoram::testing::InstructionFixture fx(Design::kParallelRebuild, 16, 2, 4);
  auto in = fx.client->make_instructions({"db", 1})[0];
  auto no_beta = in;
  no_beta.beta_new.reset();
  EXPECT_EQ(code_of([&] { validate(no_beta); }), Errc::kBadInstruction);
  auto bad_geom = in;
  bad_geom.n = 15;
  EXPECT_EQ(code_of([&] { validate(bad_geom); }), Errc::kBadInstruction);
  auto enc = encode_instruction(in);
  enc.resize(enc.size() / 2);
  EXPECT_THROW(decode_instruction(enc), Error);
}
