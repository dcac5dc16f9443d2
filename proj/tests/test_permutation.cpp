#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "mixoram/permutation.hpp"
#include "mixoram/routing.hpp"
#include "mixoram/shuffle.hpp"
#include "support.hpp"

using namespace mixoram;
using mixoram::testing::random_bytes;

// Reference output of an independent Fisher-Yates over the same AES-CTR stream.
TEST(Permutation, SeededReferenceVector) {
  auto p = permutation_from_seed(from_hex("000102030405060708090a0b0c0d0e0f"), 10);
  std::vector<std::uint64_t> expected{5, 0, 9, 4, 1, 3, 7, 2, 8, 6};
  EXPECT_EQ(p.mapping(), expected);
}

TEST(Permutation, SeededPermutationsAreBijections) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 600;
    auto p = permutation_from_seed(random_bytes(rng, 16), n);
    ASSERT_EQ(p.size(), n);
    ASSERT_TRUE(is_bijection(p.mapping()));
    ASSERT_EQ(p.then(p.inverse()), Permutation::identity(n));
  }
}

TEST(Permutation, DeterministicPerSeed) {
  auto s = mixoram::testing::fixed_seed(2);
  EXPECT_EQ(permutation_from_seed(s, 50), permutation_from_seed(s, 50));
  EXPECT_NE(permutation_from_seed(s, 50), permutation_from_seed(mixoram::testing::fixed_seed(3), 50));
}

TEST(Permutation, FromMappingRejectsNonBijections) {
  EXPECT_THROW(Permutation::from_mapping({0, 0, 1}), Error);
  EXPECT_THROW(Permutation::from_mapping({0, 3}), Error);
  EXPECT_NO_THROW(Permutation::from_mapping({2, 0, 1}));
}

TEST(Permutation, ApplyAndCompose) {
  auto p = Permutation::from_mapping({2, 0, 1});
  auto q = Permutation::from_mapping({1, 2, 0});
  std::vector<char> items{'a', 'b', 'c'};
  auto pq = p.then(q).apply(items);
  EXPECT_EQ(pq, q.apply(p.apply(items)));
  EXPECT_EQ(p.apply(items), (std::vector<char>{'b', 'c', 'a'}));
  EXPECT_THROW(p.apply(std::vector<char>{'a'}), Error);
}

// Position of a fixed item is close to uniform across seeds.
TEST(Permutation, ItemPositionRoughlyUniform) {
  std::mt19937_64 rng(4);
  const std::size_t n = 8;
  std::vector<int> hits(n, 0);
  for (int t = 0; t < 8000; ++t) ++hits[permutation_from_seed(random_bytes(rng, 16), n)[0]];
  for (auto h : hits) EXPECT_NEAR(h, 1000, 150);
}

TEST(Allocation, PartitionsEverySlotExactlyOnce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng() % 8);
    const std::uint64_t c = 1 + rng() % 40;
    const std::uint64_t n = m * c;
    auto pub = permutation_from_seed(random_bytes(rng, 16), n);
    std::vector<std::uint64_t> received(m, 0);
    std::set<std::uint64_t> sent;
    for (std::uint32_t idx = 0; idx < m; ++idx) {
      auto alloc = public_allocation(pub, m, idx);
      ASSERT_EQ(alloc.per_destination.size(), m);
      std::uint64_t total = 0;
      for (std::uint32_t dest = 0; dest < m; ++dest) {
        for (auto slot : alloc.per_destination[dest]) {
          ASSERT_EQ(slot / c, idx);          // a mix only sends what it holds
          ASSERT_EQ(pub[slot] / c, dest);    // and sends it where the public permutation says
          ASSERT_TRUE(sent.insert(slot).second);
        }
        received[dest] += alloc.per_destination[dest].size();
        total += alloc.per_destination[dest].size();
      }
      ASSERT_EQ(total, c);
    }
    ASSERT_EQ(sent.size(), n);
    for (auto r : received) ASSERT_EQ(r, c);
  }
}

TEST(Allocation, RejectsIndivisibleGeometry) {
  auto pub = Permutation::identity(10);
  try {
    public_allocation(pub, 3, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIndivisible);
  }
  EXPECT_THROW(public_allocation(pub, 2, 2), Error);
}

TEST(RoundCount, Examples) {
  EXPECT_EQ(round_count(Design::kParallelRebuild, 64, 8, 4), 34u);
  EXPECT_EQ(round_count(Design::kParallelLayered, 16, 4, 2), 2u);
  EXPECT_EQ(round_count(Design::kParallelLayered, 256, 16, 4), 6u);
  EXPECT_EQ(round_count(Design::kCascadeLayered, 64, 8, 3), 3u);
  EXPECT_EQ(round_count(Design::kParallelRebuild, 16, 4, 1), 6u);
  EXPECT_THROW(round_count(Design::kParallelLayered, 16, 16, 2), Error);
}

TEST(Designs, NamesRoundTrip) {
  for (auto d : kAllDesigns) EXPECT_EQ(parse_design(to_string(d)), d);
  EXPECT_THROW(parse_design("ring"), Error);
}

namespace {

// Explicit parallel round: local permutation inside each chunk, then the public one.
std::uint64_t simulate_parallel(std::uint64_t x, std::uint64_t c,
                                const std::vector<std::vector<Permutation>>& local,
                                const std::vector<Permutation>& pub) {
  for (std::size_t l = 0; l < pub.size(); ++l) {
    const auto j = x / c;
    x = j * c + local[l][j][x - j * c];
    x = pub[l][x];
  }
  return x;
}

}  // namespace

TEST(Routing, ParallelMatchesExplicitSimulation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng() % 5);
    const std::uint64_t c = 1 + rng() % 12;
    const std::uint64_t n = m * c;
    const std::uint32_t r = 1 + static_cast<std::uint32_t>(rng() % 5);
    std::vector<std::vector<Permutation>> local(r);
    std::vector<Permutation> pub;
    for (std::uint32_t l = 0; l < r; ++l) {
      for (std::uint32_t j = 0; j < m; ++j) local[l].push_back(permutation_from_seed(random_bytes(rng, 16), c));
      pub.push_back(permutation_from_seed(random_bytes(rng, 16), n));
    }
    auto routing = EpochRouting::parallel(n, m, local, pub);
    auto comp = routing.composite();
    for (std::uint64_t x = 0; x < n; ++x) {
      const auto end = simulate_parallel(x, c, local, pub);
      auto tr = routing.trace_forward(x);
      ASSERT_EQ(tr.end, end);
      ASSERT_EQ(comp[x], end);
      ASSERT_EQ(tr.hops.size(), r);
      auto back = routing.trace_backward(end);
      ASSERT_EQ(back.start, x);
      ASSERT_EQ(back.hops, tr.hops);
    }
  }
}

TEST(Routing, CascadeFollowsOrder) {
  std::mt19937_64 rng(7);
  const std::uint64_t n = 20;
  std::vector<Permutation> perms;
  for (int i = 0; i < 3; ++i) perms.push_back(permutation_from_seed(random_bytes(rng, 16), n));
  auto fwd = EpochRouting::cascade(perms, {0, 1, 2});
  auto rev = EpochRouting::cascade(perms, {2, 1, 0});
  for (std::uint64_t x = 0; x < n; ++x) {
    EXPECT_EQ(fwd.forward(x), perms[2][perms[1][perms[0][x]]]);
    EXPECT_EQ(rev.forward(x), perms[0][perms[1][perms[2][x]]]);
    auto tr = rev.trace_forward(x);
    ASSERT_EQ(tr.hops.size(), 3u);
    EXPECT_EQ(tr.hops[0].mix, 2u);
    EXPECT_EQ(tr.hops[0].counter, perms[2][x]);
  }
}
