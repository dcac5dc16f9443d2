#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "mixoram/client.hpp"
#include "mixoram/deployment.hpp"
#include "mixoram/harness.hpp"
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

std::vector<Bytes> payloads(std::uint64_t n, std::size_t b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Bytes> out;
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(mixoram::testing::random_bytes(rng, b));
  return out;
}

DeploymentConfig small(Design d, std::uint64_t seed = 3) {
  DeploymentConfig cfg;
  cfg.design = d;
  cfg.n = 16;
  cfg.payload_bytes = 32;
  cfg.cache_slots = 4;
  cfg.m = 2;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

class ClientPerDesign : public ::testing::TestWithParam<Design> {};

TEST_P(ClientPerDesign, CacheFillsAfterSAccesses) {
  Deployment dep(small(GetParam()));
  auto data = payloads(16, 32, 1);
  dep.preprocess(data);
  for (std::uint64_t v = 0; v < 4; ++v) EXPECT_EQ(dep.read(v), data[v]);
  EXPECT_TRUE(dep.client().cache_full());
  EXPECT_EQ(code_of([&] { dep.read(5); }), Errc::kCacheFull);
  dep.evict();
  EXPECT_EQ(dep.client().cache_fill(), 0u);
  EXPECT_EQ(dep.read(5), data[5]);
}

TEST_P(ClientPerDesign, RepeatedAccessFetchesAnUnreadSlot) {
  Deployment dep(small(GetParam()));
  auto data = payloads(16, 32, 2);
  dep.preprocess(data);
  AccessStats first, again;
  dep.client().access(AccessOp::kRead, 7, dep.store(), {}, &first);
  auto got = dep.client().access(AccessOp::kRead, 7, dep.store(), {}, &again);
  EXPECT_EQ(got, data[7]);
  EXPECT_FALSE(first.dummy);
  EXPECT_TRUE(again.dummy);
  EXPECT_NE(again.fetched_slot, first.fetched_slot);
}

TEST_P(ClientPerDesign, WriteThenReadAcrossEvictions) {
  Deployment dep(small(GetParam()));
  auto data = payloads(16, 32, 3);
  dep.preprocess(data);
  Bytes fresh(32, 0x5c);
  dep.write(9, fresh);
  EXPECT_EQ(dep.read(9), fresh);
  dep.evict();
  EXPECT_EQ(dep.read(9), fresh);
  dep.evict();
  for (std::uint64_t v = 0; v < 16; ++v) {
    EXPECT_EQ(dep.client().peek(v, dep.store()), v == 9 ? fresh : data[v]) << v;
  }
}

TEST_P(ClientPerDesign, StateBitsMatchTheCostTable) {
  Deployment dep(small(GetParam()));
  dep.preprocess(payloads(16, 32, 4));
  dep.evict();
  const auto& cfg = dep.client().config();
  auto exp = expected_costs(GetParam(), 16, 4, 2, cfg.rounds(2), Kappa::k128);
  EXPECT_EQ(dep.client().state_bits(), exp.client_state_bits);
  dep.evict();
  if (is_rebuild(GetParam())) {
    EXPECT_EQ(dep.client().state_bits(), exp.client_state_bits);
  } else {
    // Layered designs keep every epoch's exponents until reinitialisation.
    const std::uint64_t index_bits = 16 * 4;
    EXPECT_EQ(dep.client().state_bits(), index_bits + 2 * (exp.client_state_bits - index_bits));
  }
}

INSTANTIATE_TEST_SUITE_P(AllDesigns, ClientPerDesign, ::testing::ValuesIn(kAllDesigns),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           std::erase(name, '-');
                           return name;
                         });

TEST(Client, RejectsBadInputs) {
  Deployment dep(small(Design::kCascadeLayered));
  EXPECT_EQ(code_of([&] { dep.read(0); }), Errc::kStaleState);
  EXPECT_EQ(code_of([&] { dep.preprocess(payloads(15, 32, 1)); }), Errc::kSizeMismatch);
  dep.preprocess(payloads(16, 32, 1));
  EXPECT_EQ(code_of([&] { dep.preprocess(payloads(16, 32, 1)); }), Errc::kStaleState);
  EXPECT_EQ(code_of([&] { dep.read(16); }), Errc::kOutOfRange);
  EXPECT_EQ(code_of([&] { dep.write(1, Bytes(31)); }), Errc::kSizeMismatch);
}

TEST(Client, ConfigValidation) {
  ClientConfig cc;
  cc.design = Design::kParallelLayered;
  cc.n = 15;
  cc.cache_slots = 4;
  EXPECT_EQ(code_of([&] { cc.validate(2); }), Errc::kIndivisible);
  cc.n = 16;
  cc.cache_slots = 17;
  EXPECT_EQ(code_of([&] { cc.validate(2); }), Errc::kConfigMismatch);
  cc.cache_slots = 16;
  EXPECT_EQ(code_of([&] { cc.validate(2); }), Errc::kConfigMismatch);
  cc.cache_slots = 4;
  cc.payload_bytes = 20;
  EXPECT_THROW(cc.validate(2), Error);  // layered payloads are whole AES blocks
  cc.design = Design::kParallelRebuild;
  EXPECT_NO_THROW(cc.validate(2));
}

TEST(Client, LookupAgreesWithStoredPlacement) {
  for (auto d : {Design::kCascadeRebuild, Design::kParallelRebuild}) {
    Deployment dep(small(d, 11));
    auto data = payloads(16, 32, 5);
    dep.preprocess(data);
    for (int e = 0; e < 3; ++e) {
      for (std::uint64_t v = 0; v < 16; ++v) {
        const auto slot = dep.client().lookup(v);
        ASSERT_EQ(dep.client().lookup_trace(v).end, slot);
        const auto& cell = dep.storage().raw_database()[slot];
        ASSERT_EQ(dep.client().decrypt_rebuild(cell, v).payload, data[v]);
        ASSERT_EQ(dep.client().encrypt_rebuild(v, data[v]), cell);
      }
      dep.evict();
    }
  }
  for (auto d : {Design::kCascadeLayered, Design::kParallelLayered}) {
    Deployment dep(small(d, 12));
    auto data = payloads(16, 32, 6);
    dep.preprocess(data);
    for (int e = 0; e < 3; ++e) {
      dep.evict();
      for (std::uint64_t v = 0; v < 16; ++v) {
        const auto slot = dep.client().lookup(v);
        auto dec = dep.client().decrypt_layered(dep.storage().raw_database()[slot], v, slot);
        ASSERT_EQ(dec.payload, data[v]);
      }
    }
  }
}

TEST(Client, RebuildDecryptionLayerCount) {
  Deployment dep(small(Design::kParallelRebuild));
  dep.preprocess(payloads(16, 32, 7));
  dep.evict();
  const auto r = dep.client().config().rounds(2);
  auto exp = expected_costs(Design::kParallelRebuild, 16, 4, 2, r, Kappa::k128);
  auto slot = dep.client().lookup(3);
  auto dec = dep.client().decrypt_rebuild(dep.storage().raw_database()[slot], 3);
  EXPECT_EQ(dec.layers_removed, exp.client_decrypt_layers + 1);
}

TEST(Client, ReinitializeDropsLayerHistory) {
  Deployment dep(small(Design::kParallelLayered));
  auto data = payloads(16, 32, 8);
  dep.preprocess(data);
  dep.evict();
  dep.evict();
  EXPECT_EQ(dep.client().history_epochs(), 2u);
  dep.client().reinitialize(dep.store());
  EXPECT_EQ(dep.client().history_epochs(), 0u);
  EXPECT_EQ(dep.client().state_bits(), 16u * 4);
  for (std::uint64_t v = 0; v < 16; ++v) {
    auto slot = dep.client().lookup(v);
    auto dec = dep.client().decrypt_layered(dep.storage().raw_database()[slot], v, slot);
    EXPECT_EQ(dec.payload, data[v]);
    EXPECT_EQ(dec.peeled_epochs, 0u);
  }
  dep.evict();
  EXPECT_EQ(dep.read(4), data[4]);
  Deployment rebuild(small(Design::kCascadeRebuild));
  rebuild.preprocess(data);
  EXPECT_EQ(code_of([&] { rebuild.client().reinitialize(rebuild.store()); }), Errc::kInvalidArgument);
}

TEST(Client, LayeredPeelingStopsAtTheRightEpoch) {
  Deployment dep(small(Design::kCascadeLayered, 21));
  auto data = payloads(16, 32, 9);
  dep.preprocess(data);
  dep.evict();
  dep.evict();
  AccessStats st;
  dep.client().access(AccessOp::kRead, 2, dep.store(), {}, &st);
  // Never refreshed: both eviction layers come off.
  EXPECT_EQ(st.peeled_epochs, 2u);
  dep.evict();
  dep.client().access(AccessOp::kRead, 2, dep.store(), {}, &st);
  // Written back at the last eviction: only its layer is on top of the client layer.
  EXPECT_EQ(st.peeled_epochs, 1u);
}

TEST(ExpectedLayers, SmallCases) {
  auto e = expected_layers(1, 1, 1, 2.0);
  EXPECT_DOUBLE_EQ(e.all, 1.0);
  EXPECT_DOUBLE_EQ(e.per_record, 2.0 * (1.0 * 0.5 + 0.5));
}
