#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "statealign/discretize.hpp"
#include "statealign/error.hpp"

namespace sa = statealign;

namespace {

std::vector<int> states_of(std::vector<double> z) {
  const auto a = sa::StateAlphabet::three_state();
  const std::vector<double> cuts{2.0, 3.0};
  return sa::threshold_discretize(z, a, cuts).states;
}

}  // namespace

TEST(Standardize, Definition) {
  sa::ResidualProcess rp{"s", {2.0, -4.0}, {2.0, 2.0}};
  EXPECT_EQ(sa::standardize(rp), (std::vector<double>{1.0, -2.0}));
  sa::ResidualProcess zero{"s", {0.0, 0.0, 0.0}, {1.0, 3.0, 0.5}};
  EXPECT_EQ(sa::standardize(zero), (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(Standardize, RejectsNonPositiveScale) {
  sa::ResidualProcess rp{"s", {1.0}, {0.0}};
  EXPECT_THROW(sa::standardize(rp), sa::Error);
}

TEST(Standardize, InControlSeriesRarelyExceedsThreeSigma) {
  std::mt19937_64 rng(99);
  const auto y = sa::testing::simulate_local_level(rng, 500, 0.05, 1.0, 20.0);
  const auto seg = sa::TimeSeriesSegment::from_values("s", y);
  const auto p = sa::fit_local_level(seg);
  const auto z = sa::standardize(sa::extract_residuals(seg, sa::kalman_smooth(p, sa::kalman_filter(p, seg)), p));
  int above = 0;
  for (double v : z) above += std::abs(v) > 3.0;
  EXPECT_LT(above / 500.0, 0.01);
}

TEST(ThresholdDiscretize, Bands) {
  EXPECT_EQ(states_of({0.5, -1.9}), (std::vector<int>{0, 0}));
  EXPECT_EQ(states_of({2.5, -2.5}), (std::vector<int>{1, 1}));
  EXPECT_EQ(states_of({4.0, -7.0}), (std::vector<int>{2, 2}));
}

TEST(ThresholdDiscretize, BoundaryFallsToLowerState) {
  EXPECT_EQ(states_of({2.0, 3.0}), (std::vector<int>{0, 1}));
}

TEST(ThresholdDiscretize, SignedAlphabetMirrorsMagnitude) {
  const auto a = sa::StateAlphabet::five_state_signed();
  const std::vector<double> cuts{2.0, 3.0};
  const std::vector<double> z{-4.0, -2.5, 0.0, 2.5, 4.0};
  EXPECT_EQ(sa::threshold_discretize(z, a, cuts).states, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(ThresholdDiscretize, RejectsBadCuts) {
  const auto a = sa::StateAlphabet::three_state();
  const std::vector<double> z{1.0};
  EXPECT_THROW(sa::threshold_discretize(z, a, std::vector<double>{3.0, 2.0}), sa::Error);
  EXPECT_THROW(sa::threshold_discretize(z, a, std::vector<double>{2.0}), sa::Error);
  EXPECT_THROW(sa::threshold_discretize(z, a, std::vector<double>{-1.0, 2.0}), sa::Error);
}

TEST(StateAlphabet, TopStateAndEntry) {
  auto s = sa::testing::seq({0, 1, 0, 2, 2});
  EXPECT_EQ(s.first_top_entry(), 3u);
  s.states = {0, 1, 1};
  EXPECT_EQ(s.first_top_entry(), 3u);
  const auto signed_alpha = sa::StateAlphabet::five_state_signed();
  EXPECT_TRUE(signed_alpha.is_top(0));
  EXPECT_TRUE(signed_alpha.is_top(4));
  EXPECT_FALSE(signed_alpha.is_top(2));
  EXPECT_EQ(signed_alpha.magnitude_levels(), 3);
}

TEST(StateAlphabet, DefaultCuts) {
  EXPECT_EQ(sa::default_cuts(sa::StateAlphabet::three_state()), (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(sa::default_cuts(sa::StateAlphabet::magnitude(2)), (std::vector<double>{3.0}));
  EXPECT_EQ(sa::default_cuts(sa::StateAlphabet::magnitude(4)).size(), 3u);
}
