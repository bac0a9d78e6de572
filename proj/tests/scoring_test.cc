#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "rtlopt/common/error.h"
#include "rtlopt/scoring/scoring.h"

namespace rtlopt::scoring {
namespace {

using eda::PpaMetrics;

// Table rows: baseline synthesis vs optimized design.
const PpaMetrics kVendingBase{-0.27, -1.02, 20488};
const PpaMetrics kVendingOpt{-0.09, -0.5, 20533};
const PpaMetrics kCommBase{-0.4, -73.08, 2092};
const PpaMetrics kCommOpt{-0.26, -58.84, 2446};

TEST(NormalizeTest, Examples) {
  EXPECT_NEAR(Normalize(-0.09, -0.27), -0.6667, 5e-5);
  EXPECT_EQ(Normalize(-0.27, -0.27), 0.0);
  EXPECT_EQ(Normalize(-0.2, 0.0), -kNormCap);
  EXPECT_EQ(Normalize(0.3, 0.0), kNormCap);
  EXPECT_EQ(Normalize(1e-12, 0.0), 0.0);
}

TEST(NormalizeTest, PrintedPercentages) {
  // Printed as "-0.09 (-66.7%)", "-0.5 (-51.0%)", "20533 (0.2%)".
  EXPECT_NEAR(100 * Normalize(kVendingOpt.wns, kVendingBase.wns), -66.7, 0.1);
  EXPECT_NEAR(100 * Normalize(kVendingOpt.tns, kVendingBase.tns), -51.0, 0.1);
  EXPECT_NEAR(100 * Normalize(kVendingOpt.area, kVendingBase.area), 0.2, 0.1);
  EXPECT_NEAR(100 * Normalize(kCommOpt.wns, kCommBase.wns), -35.0, 0.1);
  EXPECT_NEAR(100 * Normalize(kCommOpt.tns, kCommBase.tns), -19.5, 0.1);
  EXPECT_NEAR(100 * Normalize(kCommOpt.area, kCommBase.area), 17.0, 0.1);
}

TEST(ScoreTest, VendingRow) {
  CandidateScore s = Score(kVendingOpt, kVendingBase);
  const double wns = (-0.09 + 0.27) / -0.27;
  const double tns = (-0.5 + 1.02) / -1.02;
  const double area = (20533.0 - 20488.0) / 20488.0;
  EXPECT_DOUBLE_EQ(s.wns_norm, wns);
  EXPECT_DOUBLE_EQ(s.tns_norm, tns);
  EXPECT_DOUBLE_EQ(s.area_norm, area);
  EXPECT_EQ(s.penalty, 0.0);
  EXPECT_NEAR(s.score, 0.5 * wns + 0.35 * tns + 0.15 * area, 1e-12);
  EXPECT_NEAR(s.score, -0.51143524, 1e-8);
}

TEST(ScoreTest, CommunicateRowIsPenalized) {
  CandidateScore s = Score(kCommOpt, kCommBase);
  const double wns = (-0.26 + 0.4) / -0.4;
  const double tns = (-58.84 + 73.08) / -73.08;
  const double area = (2446.0 - 2092.0) / 2092.0;
  EXPECT_GT(s.area_norm, 0.1);
  EXPECT_EQ(s.penalty, 0.5);
  EXPECT_NEAR(s.score, 0.5 * wns + 0.35 * tns + 0.15 * area + 0.5, 1e-12);
  EXPECT_NEAR(s.score, 0.28218318, 1e-8);
}

TEST(ScoreTest, IdentityScoresZero) {
  CandidateScore s = Score(kVendingBase, kVendingBase);
  EXPECT_EQ(s.score, 0.0);
  EXPECT_EQ(s.penalty, 0.0);
}

TEST(ScoreTest, PenaltyThresholdIsStrict) {
  PpaMetrics base{-1.0, -1.0, 100.0};
  PpaMetrics at{-1.0, -1.0, 110.0};
  ScoreWeights w;
  w.area_penalty_threshold = Normalize(110.0, 100.0);
  EXPECT_EQ(Score(at, base, w).penalty, 0.0);
  EXPECT_EQ(Score({-1.0, -1.0, 110.1}, base, w).penalty, 0.5);
}

TEST(ScoreTest, ImprovingWnsLowersScore) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> slack(-2.0, -0.01);
  for (int i = 0; i < 1000; ++i) {
    PpaMetrics base{slack(rng), -5.0, 100.0};
    PpaMetrics m{slack(rng), -4.0, 103.0};
    PpaMetrics better = m;
    better.wns = m.wns / 2;
    EXPECT_LT(Score(better, base).score, Score(m, base).score);
  }
}

TEST(ScoreWeightsTest, Validation) {
  ScoreWeights w;
  w.Validate();
  w.alpha = 1.5;
  EXPECT_THROW(w.Validate(), ConfigError);
  w = {};
  w.area_penalty_threshold = 0.0;
  EXPECT_THROW(w.Validate(), ConfigError);
  EXPECT_THROW(ScoreWeightsFromJson({{"delta", 1}}), ConfigError);
  EXPECT_EQ(ToJson(ScoreWeightsFromJson(ToJson(ScoreWeights{}))),
            ToJson(ScoreWeights{}));
}

TEST(SelectNextTest, Examples) {
  std::vector<Contender> group = {{false, 0.2}, {true, -0.1}, {false, -0.3}};
  EXPECT_EQ(SelectNext(0.0, group), 1u);
  EXPECT_EQ(SelectNext(0.0, {{true, -0.4}}), 0u);
  EXPECT_EQ(SelectNext(0.0, {{false, -1.0}, {false, -2.0}}), std::nullopt);
}

TEST(SelectNextTest, ParentIsIncumbent) {
  // Nothing beats the parent: it stays.
  EXPECT_EQ(SelectNext(-0.5, {{true, -0.5}, {true, 0.1}}), std::nullopt);
  // Ties among candidates go to the smallest index.
  EXPECT_EQ(SelectNext(0.0, {{true, -0.2}, {true, -0.3}, {true, -0.3}}), 1u);
  // Failed evaluations never win.
  EXPECT_EQ(SelectNext(0.0, {{true, std::nullopt}}), std::nullopt);
}

TEST(SelectNextTest, SequenceIsNonIncreasingAndGated) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double current = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<Contender> group(5);
    for (Contender& c : group) {
      c.sec_pass = rng() % 3 != 0;
      c.score = u(rng);
    }
    std::optional<size_t> pick = SelectNext(current, group);
    if (pick) {
      EXPECT_TRUE(group[*pick].sec_pass);
      EXPECT_LT(*group[*pick].score, current);
      current = *group[*pick].score;
    }
  }
}

TEST(GroupAdvantageTest, Examples) {
  GroupStats g = GroupAdvantage({-1.0, 1.0});
  EXPECT_EQ(g.mean, 0.0);
  EXPECT_EQ(g.stddev, 1.0);
  EXPECT_EQ(g.advantages, (std::vector<double>{-1.0, 1.0}));

  g = GroupAdvantage({-0.5, -0.2, 0.1});
  EXPECT_NEAR(g.mean, -0.2, 1e-12);
  EXPECT_NEAR(g.stddev, std::sqrt(0.06), 1e-12);
  EXPECT_NEAR(g.stddev, 0.24495, 1e-5);
  EXPECT_NEAR(g.advantages[0], -1.2247, 1e-4);
  EXPECT_NEAR(g.advantages[1], 0.0, 1e-12);
  EXPECT_NEAR(g.advantages[2], 1.2247, 1e-4);

  g = GroupAdvantage({0.3, 0.3, 0.3});
  EXPECT_EQ(g.advantages, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(GroupAdvantage({0.7}).advantages, (std::vector<double>{0}));
  EXPECT_TRUE(GroupAdvantage({}).advantages.empty());
}

TEST(GroupAdvantageTest, StandardizedAndInvariant) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(2 + rng() % 15);
    for (double& x : s) x = u(rng);
    std::vector<double> a = GroupAdvantage(s).advantages;
    double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    double var = 0;
    for (double x : a) var += (x - mean) * (x - mean);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(var / a.size()), 1.0, 1e-9);

    const double c = u(rng);
    const double lambda = 0.1 + std::fabs(u(rng));
    std::vector<double> shifted = s;
    std::vector<double> scaled = s;
    for (double& x : shifted) x += c;
    for (double& x : scaled) x *= lambda;
    std::vector<double> as = GroupAdvantage(shifted).advantages;
    std::vector<double> ak = GroupAdvantage(scaled).advantages;
    for (size_t j = 0; j < s.size(); ++j) {
      EXPECT_NEAR(as[j], a[j], 1e-9);
      EXPECT_NEAR(ak[j], a[j], 1e-9);
    }
  }
}

}  // namespace
}  // namespace rtlopt::scoring
