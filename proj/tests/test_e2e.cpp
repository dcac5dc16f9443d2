#include <gtest/gtest.h>

#include "mixoram/harness.hpp"

using namespace mixoram;

namespace {

std::string failures(const ExperimentReport& rep) {
  std::string out;
  for (const auto& v : rep.verdicts()) {
    if (!v.pass) out += v.name + ": " + v.detail + "\n";
  }
  return out;
}

std::string design_name(Design d) {
  std::string name(to_string(d));
  std::erase(name, '-');
  return name;
}

}  // namespace

class EndToEnd : public ::testing::TestWithParam<Design> {};

TEST_P(EndToEnd, InProcessSmallAndMedium) {
  for (std::uint64_t n : {16u, 64u}) {
    for (std::uint32_t m : {2u, 4u}) {
      Scenario sc;
      sc.design = GetParam();
      sc.n = n;
      sc.m = m;
      sc.seed = n + m;
      auto rep = run_eviction_e2e(sc);
      EXPECT_TRUE(rep.passed()) << "n=" << n << " m=" << m << "\n" << failures(rep);
    }
  }
}

TEST_P(EndToEnd, SeveralEvictionsWithRefreshes) {
  Scenario sc;
  sc.design = GetParam();
  sc.n = 32;
  sc.m = 2;
  sc.d = 2;
  sc.evictions = 3;
  sc.seed = 9;
  auto rep = run_eviction_e2e(sc);
  EXPECT_TRUE(rep.passed()) << failures(rep);
}

TEST_P(EndToEnd, Tcp) {
  Scenario sc;
  sc.design = GetParam();
  sc.n = 16;
  sc.m = 2;
  sc.seed = 5;
  sc.transport = TransportKind::kTcp;
  auto rep = run_eviction_e2e(sc);
  EXPECT_TRUE(rep.passed()) << failures(rep);
}

TEST_P(EndToEnd, CostAudit) {
  for (std::uint64_t n : {16u, 64u}) {
    Scenario sc;
    sc.design = GetParam();
    sc.n = n;
    sc.m = 4;
    auto rep = audit_costs(sc);
    EXPECT_TRUE(rep.passed()) << failures(rep);
  }
}

INSTANTIATE_TEST_SUITE_P(AllDesigns, EndToEnd, ::testing::ValuesIn(kAllDesigns),
                         [](const auto& info) { return design_name(info.param); });

TEST(EndToEndEdge, SingleParallelMix) {
  for (auto d : {Design::kParallelLayered, Design::kParallelRebuild}) {
    Scenario sc;
    sc.design = d;
    sc.n = 16;
    sc.m = 1;
    auto rep = run_eviction_e2e(sc);
    EXPECT_TRUE(rep.passed()) << failures(rep);
  }
}

TEST(EndToEndEdge, WholeDatabaseCache) {
  Scenario sc;
  sc.design = Design::kCascadeRebuild;
  sc.n = 8;
  sc.s = 8;
  sc.m = 3;
  auto rep = run_eviction_e2e(sc);
  EXPECT_TRUE(rep.passed()) << failures(rep);
}

TEST(Sentinel, EncDecHidesClientLayerCells) {
  for (auto d : {Design::kCascadeRebuild, Design::kParallelRebuild}) {
    Scenario sc;
    sc.design = d;
    sc.n = 16;
    sc.m = 2;
    auto normal = run_sentinel_probe(sc, false);
    EXPECT_TRUE(normal.passed()) << failures(normal);
    EXPECT_EQ(normal.get("exposed_records"), "0");
    // Without the E/D phase the probe must notice the exposure.
    auto naive = run_sentinel_probe(sc, true);
    EXPECT_TRUE(naive.passed()) << failures(naive);
    EXPECT_NE(naive.get("exposed_records"), "0");
  }
}
