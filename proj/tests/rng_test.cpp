#include "ddsel/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ddsel {
namespace {

// Known-answer vectors for Philox4x32-10 from the reference implementation.
TEST(Philox, KnownAnswers) {
  using B = Philox::Block;
  using K = Philox::Key;
  EXPECT_EQ(Philox::generate(B{0, 0, 0, 0}, K{0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamStartsAtCounterZero) {
  Philox rng(0);
  EXPECT_EQ(rng(), 0x6627e8d5u);
  EXPECT_EQ(rng(), 0xe169c58du);
  EXPECT_EQ(rng(), 0xbc57ac4cu);
  EXPECT_EQ(rng(), 0x9b00dbd8u);
  EXPECT_EQ(rng(), Philox::generate({1, 0, 0, 0}, {0, 0})[0]);
}

TEST(Philox, SeedSplitsIntoKeyWords) {
  Philox rng(0x299f31d0a4093822ull);
  const auto expect = Philox::generate({0, 0, 0, 0}, {0xa4093822, 0x299f31d0});
  for (auto word : expect) EXPECT_EQ(rng(), word);
}

TEST(Philox, UniformAndNormalMoments) {
  Philox rng(7);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

}  // namespace
}  // namespace ddsel
