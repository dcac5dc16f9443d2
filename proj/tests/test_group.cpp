#include <gtest/gtest.h>

#include "mixoram/group.hpp"
#include "support.hpp"

using namespace mixoram;
using mixoram::testing::ToyGroup;

static_assert(PrimeOrderGroup<Ristretto255>);
static_assert(PrimeOrderGroup<ToyGroup>);

namespace {

RistrettoScalar small_scalar(std::uint8_t v) {
  RistrettoScalar s;
  s.v[0] = v;
  return s;
}

}  // namespace

// Multiples of the base point from the ristretto255 test vectors.
TEST(Ristretto, BasePointMultiples) {
  Ristretto255 g;
  EXPECT_EQ(to_hex(g.encode(g.generator())),
            "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76");
  EXPECT_EQ(to_hex(g.encode(g.exp_base(small_scalar(1)))),
            "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76");
  EXPECT_EQ(to_hex(g.encode(g.exp_base(small_scalar(2)))),
            "6a493210f7499cd17fecb510ae0cea23a110e8d5b901f8acadd3095c73a3b919");
  EXPECT_EQ(to_hex(g.encode(g.exp_base(small_scalar(3)))),
            "94741f5d5d52755ece4f23f044ee27d5d1ea1e2bd196b462166b16152a9d0259");
}

TEST(Ristretto, IdentityAndInvalidInputsRejected) {
  Ristretto255 g;
  RistrettoPoint identity;  // all-zero encoding
  EXPECT_FALSE(g.is_valid(identity));
  try {
    g.exp(identity, small_scalar(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIdentityElement);
  }
  EXPECT_THROW(g.exp_base(RistrettoScalar{}), Error);
  EXPECT_THROW(g.decode_element(Bytes(31)), Error);
}

TEST(Ristretto, AgreementIsSymmetric) {
  Ristretto255 g;
  Prg rng(mixoram::testing::fixed_seed(9));
  for (int i = 0; i < 20; ++i) {
    auto a = keygen(g, rng);
    auto b = keygen(g, rng);
    EXPECT_EQ(agree(g, a.priv, b.pub), agree(g, b.priv, a.pub));
  }
}

TEST(Ristretto, ScalarMulMatchesRepeatedExponentiation) {
  Ristretto255 g;
  Prg rng(mixoram::testing::fixed_seed(10));
  auto a = g.random_scalar(rng);
  auto b = g.random_scalar(rng);
  EXPECT_EQ(g.exp(g.exp_base(a), b), g.exp_base(g.mul(a, b)));
  EXPECT_EQ(g.mul(a, g.one()), a);
}

TEST(Ristretto, EncodingRoundTrip) {
  Ristretto255 g;
  Prg rng(mixoram::testing::fixed_seed(11));
  auto k = keygen(g, rng);
  EXPECT_EQ(g.decode_element(g.encode(k.pub)), k.pub);
  EXPECT_EQ(g.decode_scalar(g.encode(k.priv)), k.priv);
}

TEST(Schedules, MixAndClientAgreeOnRistretto) {
  Ristretto255 g;
  Prg rng(mixoram::testing::fixed_seed(12));
  auto mix = keygen(g, rng);
  auto z = g.random_scalar(rng);
  auto alpha0 = g.exp_base(z);
  auto mixes = mix_private_schedule(g, alpha0, mix.priv, 6, Kappa::k128);
  auto client = client_private_schedule(g, z, mix.pub, 6, Kappa::k128);
  ASSERT_EQ(mixes.size(), 6u);
  EXPECT_EQ(mixes, client);
  for (std::size_t i = 1; i < mixes.size(); ++i) EXPECT_NE(mixes[i], mixes[i - 1]);
}

TEST(Schedules, PublicSeedsAgreeAcrossMixesAndClient) {
  Ristretto255 g;
  Prg rng(mixoram::testing::fixed_seed(13));
  const int m = 3;
  std::vector<RistrettoScalar> shares;
  for (int i = 0; i < m; ++i) shares.push_back(g.random_scalar(rng));
  auto client_pub = keygen(g, rng).pub;
  for (auto context : {std::optional<RistrettoPoint>{}, std::optional<RistrettoPoint>{client_pub}}) {
    auto product = g.one();
    for (auto& s : shares) product = g.mul(product, s);
    auto expected = client_public_schedule(g, product, 5, Kappa::k128, context);
    for (int i = 0; i < m; ++i) {
      // beta_i,0 = g^(prod of the other shares)
      auto others = g.one();
      for (int j = 0; j < m; ++j) {
        if (j != i) others = g.mul(others, shares[j]);
      }
      auto beta0 = g.exp_base(others);
      EXPECT_EQ(mix_public_schedule(g, beta0, shares[i], 5, Kappa::k128, context), expected);
    }
  }
}

// Exhaustive check on the toy group: every mix key against every client exponent.
TEST(Schedules, ToyGroupExhaustiveAgreement) {
  ToyGroup g;
  for (std::uint64_t x = 1; x < ToyGroup::kQ; ++x) {
    for (std::uint64_t z = 1; z < ToyGroup::kQ; ++z) {
      const ToyGroup::Scalar xs{x}, zs{z};
      auto y = g.exp_base(xs);
      auto mixes = mix_private_schedule(g, g.exp_base(zs), xs, 4, Kappa::k128);
      auto client = client_private_schedule(g, zs, y, 4, Kappa::k128);
      ASSERT_EQ(mixes, client) << "x=" << x << " z=" << z;
    }
  }
}

// Direct oracle for one blinding step: alpha' = alpha^b and ss' = ss^b with b = H(alpha, ss).
TEST(Schedules, ToyGroupBlindingStepOracle) {
  ToyGroup g;
  for (std::uint64_t z = 1; z < ToyGroup::kQ; ++z) {
    for (std::uint64_t x = 1; x < ToyGroup::kQ; ++x) {
      auto alpha = g.exp_base({z});
      auto ss = g.exp(alpha, {x});
      auto b = blinding_hash(g, {&alpha, &ss});
      ASSERT_FALSE(g.is_zero(b));
      auto step = blind_alpha(g, alpha, ss);
      EXPECT_EQ(step.alpha.v, ToyGroup::pow_mod(2, z * b.v % ToyGroup::kQ));
      EXPECT_EQ(step.ss.v, ToyGroup::pow_mod(2, z * x % ToyGroup::kQ * b.v % ToyGroup::kQ));
      // The mix's own agreement on the blinded alpha gives the same secret.
      EXPECT_EQ(agree(g, ToyGroup::Scalar{x}, step.alpha), step.ss);
    }
  }
}

TEST(Schedules, ToyGroupPublicScheduleExhaustive) {
  ToyGroup g;
  for (std::uint64_t a = 1; a < ToyGroup::kQ; ++a) {
    for (std::uint64_t b = 1; b < ToyGroup::kQ; ++b) {
      auto product = g.mul({a}, {b});
      auto expected = client_public_schedule(g, product, 3, Kappa::k128, std::nullopt);
      EXPECT_EQ(mix_public_schedule(g, g.exp_base({b}), ToyGroup::Scalar{a}, 3, Kappa::k128,
                                    std::nullopt),
                expected);
      EXPECT_EQ(mix_public_schedule(g, g.exp_base({a}), ToyGroup::Scalar{b}, 3, Kappa::k128,
                                    std::nullopt),
                expected);
    }
  }
}
