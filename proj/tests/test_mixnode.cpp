#include <gtest/gtest.h>

#include <functional>

#include "mixoram/mixnode.hpp"
#include "support.hpp"

using namespace mixoram;
using mixoram::testing::InstructionFixture;

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

std::vector<SlotCell> cells(std::uint64_t from, std::uint64_t count, std::size_t bytes) {
  std::vector<SlotCell> out;
  for (std::uint64_t i = 0; i < count; ++i) out.push_back({from + i, Bytes(bytes, 0x11)});
  return out;
}

}  // namespace

TEST(MixNode, BootstrapRejectsForeignAndZeroEpoch) {
  InstructionFixture fx(Design::kCascadeLayered, 16, 2, 4);
  auto instrs = fx.client->make_instructions({"db", 1});
  MixNode mix0(0, fx.mix_keys[0]);
  EXPECT_EQ(code_of([&] { mix0.bootstrap(instrs[1]); }), Errc::kBadInstruction);
  auto zero = instrs[0];
  zero.epoch = 0;
  EXPECT_EQ(code_of([&] { mix0.bootstrap(zero); }), Errc::kBadInstruction);
  EXPECT_NO_THROW(mix0.bootstrap(instrs[0]));
  EXPECT_THROW(MixNode(kStorageNode, fx.mix_keys[0]), Error);
}

TEST(MixNode, InstructionMustComeFromClient) {
  InstructionFixture fx(Design::kCascadeLayered, 16, 2, 4);
  auto instrs = fx.client->make_instructions({"db", 1});
  MixNode mix0(0, fx.mix_keys[0]);
  Frame f{FrameType::kInstruction, 1, Phase::kControl, 0, 1, encode_instruction(instrs[0])};
  EXPECT_EQ(code_of([&] { mix0.handle(f); }), Errc::kBadInstruction);
  f.from = kClientNode;
  auto out = mix0.handle(f);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, kStorageNode);
  EXPECT_EQ(out[0].frame.type, FrameType::kDbFetch);
}

TEST(MixNode, RebuildCascadeEnforcesPhaseOrder) {
  InstructionFixture fx(Design::kCascadeRebuild, 16, 2, 4);
  fx.client->make_instructions({"db", 1});
  fx.client->finish_eviction();
  auto instrs = fx.client->make_instructions({"db", 1});
  const auto bytes = instrs[0].cell_bytes;

  MixNode a(0, fx.mix_keys[0]);
  a.bootstrap(instrs[0]);
  EXPECT_EQ(code_of([&] { a.cascade_rebuild_phase(Phase::kEncDec, cells(0, 16, bytes)); }),
            Errc::kPhaseOrderViolation);
  EXPECT_EQ(code_of([&] { a.cascade_rebuild_phase(Phase::kWrap, cells(0, 16, bytes)); }),
            Errc::kPhaseOrderViolation);
  a.cascade_rebuild_phase(Phase::kUnwrap, cells(0, 16, bytes));
  EXPECT_EQ(code_of([&] { a.cascade_rebuild_phase(Phase::kUnwrap, cells(0, 16, bytes)); }),
            Errc::kPhaseOrderViolation);
  EXPECT_EQ(code_of([&] { a.cascade_rebuild_phase(Phase::kWrap, cells(0, 16, bytes)); }),
            Errc::kPhaseOrderViolation);
  a.cascade_rebuild_phase(Phase::kEncDec, cells(0, 16, bytes));
  EXPECT_NO_THROW(a.cascade_rebuild_phase(Phase::kWrap, cells(0, 16, bytes)));
  EXPECT_EQ(code_of([&] { a.cascade_rebuild_phase(Phase::kShuffle, cells(0, 16, bytes)); }),
            Errc::kPhaseOrderViolation);

  MixNode b(1, fx.mix_keys[1]);
  b.bootstrap(instrs[1]);
  EXPECT_EQ(code_of([&] { b.cascade_rebuild_phase(Phase::kUnwrap, cells(0, 15, bytes)); }),
            Errc::kSizeMismatch);
}

TEST(MixNode, SkippedEncDecIsRefusedUnlessConfigured) {
  InstructionFixture fx(Design::kCascadeRebuild, 16, 2, 4);
  fx.client->make_instructions({"db", 1});
  fx.client->finish_eviction();
  auto instrs = fx.client->make_instructions({"db", 1});
  const auto bytes = instrs[0].cell_bytes;
  MixOptions naive;
  naive.skip_encdec = true;
  MixNode a(0, fx.mix_keys[0], naive);
  a.bootstrap(instrs[0]);
  a.cascade_rebuild_phase(Phase::kUnwrap, cells(0, 16, bytes));
  EXPECT_EQ(code_of([&] { a.cascade_rebuild_phase(Phase::kEncDec, cells(0, 16, bytes)); }),
            Errc::kPhaseOrderViolation);
  EXPECT_NO_THROW(a.cascade_rebuild_phase(Phase::kWrap, cells(0, 16, bytes)));
}

TEST(MixNode, ParallelRoundChecksBarrierAndSizes) {
  InstructionFixture fx(Design::kParallelLayered, 16, 2, 4);
  auto instrs = fx.client->make_instructions({"db", 1});
  const auto bytes = instrs[0].cell_bytes;
  ASSERT_GE(instrs[0].rounds, 2u);
  MixNode mix0(0, fx.mix_keys[0]);
  mix0.bootstrap(instrs[0]);

  std::map<NodeId, std::vector<SlotCell>> short_batch{{kStorageNode, cells(0, 7, bytes)}};
  EXPECT_EQ(code_of([&] { mix0.parallel_round(Phase::kShuffle, 1, short_batch); }),
            Errc::kSizeMismatch);

  std::map<NodeId, std::vector<SlotCell>> own{{kStorageNode, cells(0, 8, bytes)}};
  auto out = mix0.parallel_round(Phase::kShuffle, 1, own);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].size() + out[1].size(), 8u);

  std::map<NodeId, std::vector<SlotCell>> half{{0, cells(0, 4, bytes)}};
  EXPECT_EQ(code_of([&] { mix0.parallel_round(Phase::kShuffle, 2, half); }), Errc::kMissingBatch);
  std::map<NodeId, std::vector<SlotCell>> both{{0, cells(0, 4, bytes)}, {1, cells(4, 4, bytes)}};
  EXPECT_EQ(code_of([&] { mix0.parallel_round(Phase::kShuffle, instrs[0].rounds + 1, both); }),
            Errc::kOutOfRange);
  std::map<NodeId, std::vector<SlotCell>> too_many{{0, cells(0, 4, bytes)}, {1, cells(4, 5, bytes)}};
  EXPECT_EQ(code_of([&] { mix0.parallel_round(Phase::kShuffle, 2, too_many); }),
            Errc::kSizeMismatch);
}

TEST(MixNode, StaleEpochFrameIsAnOrderViolation) {
  InstructionFixture fx(Design::kParallelLayered, 16, 2, 4);
  fx.client->make_instructions({"db", 1});
  fx.client->finish_eviction();
  auto instrs = fx.client->make_instructions({"db", 1});
  ASSERT_EQ(instrs[0].epoch, 2u);
  MixNode mix0(0, fx.mix_keys[0]);
  mix0.bootstrap(instrs[0]);
  Frame stale{FrameType::kRecordBatch, 1, Phase::kShuffle, 2, 1,
              encode_batch(cells(0, 4, instrs[0].cell_bytes))};
  EXPECT_EQ(code_of([&] { mix0.handle(stale); }), Errc::kPhaseOrderViolation);
  // Frames from a later epoch wait for their instruction instead.
  Frame early = stale;
  early.epoch = 3;
  EXPECT_TRUE(mix0.handle(early).empty());
}

TEST(MixNode, UnexpectedAckIsAnOrderViolation) {
  InstructionFixture fx(Design::kCascadeLayered, 16, 2, 4);
  auto instrs = fx.client->make_instructions({"db", 1});
  MixNode mix1(1, fx.mix_keys[1]);
  mix1.bootstrap(instrs[1]);
  Frame ack{FrameType::kAck, 1, Phase::kControl, 0, kStorageNode, {}};
  EXPECT_EQ(code_of([&] { mix1.handle(ack); }), Errc::kPhaseOrderViolation);
  Frame fetch{FrameType::kDbFetch, 1, Phase::kShuffle, 0, kClientNode, {}};
  EXPECT_EQ(code_of([&] { mix1.handle(fetch); }), Errc::kBadInstruction);
}
