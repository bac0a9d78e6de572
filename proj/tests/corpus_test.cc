#include <gtest/gtest.h>

#include <map>

#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/proposer/rewrite.h"
#include "support/sec_corpus.h"

namespace rtlopt {
namespace {

using testing::LoadRewriteCorpus;
using testing::LoadSecPairs;
using testing::ReplaysToMismatch;

TEST(SecCorpusTest, ManifestIsBalanced) {
  std::vector<testing::SecPair> pairs = LoadSecPairs();
  ASSERT_EQ(pairs.size(), 20u);
  int equivalent = 0;
  std::map<std::string, int> kinds;
  for (const auto& p : pairs) {
    equivalent += p.equivalent;
    ++kinds[p.kind];
    EXPECT_TRUE(p.golden.SameInterface(p.candidate)) << p.name;
  }
  EXPECT_EQ(equivalent, 10);
  for (const char* k :
       {"commutativity", "rebalance", "cse", "mux restructure",
        "register duplication", "operator swap", "width truncation",
        "latency change", "reset-state change"}) {
    EXPECT_GT(kinds[k], 0) << k;
  }
}

TEST(SecCorpusTest, ExhaustiveVerdictsAreCorrect) {
  for (const testing::SecPair& p : LoadSecPairs()) {
    eda::EquivalenceResult r =
        eda::CheckEquivalenceBuiltin(p.golden, p.candidate);
    EXPECT_EQ(r.mode, eda::SecMode::kExhaustive) << p.name;
    EXPECT_EQ(r.pass, p.equivalent) << p.name;
    if (p.equivalent) {
      EXPECT_FALSE(r.counterexample.has_value()) << p.name;
      continue;
    }
    ASSERT_TRUE(r.counterexample.has_value()) << p.name;
    EXPECT_TRUE(ReplaysToMismatch(p.golden, p.candidate, *r.counterexample))
        << p.name;
  }
}

TEST(RewriteCorpusTest, EveryStrategyAppliesSomewhere) {
  std::map<StrategyId, int> sites;
  for (const rtl::RtlDesign& d : LoadRewriteCorpus()) {
    for (int s = 0; s <= static_cast<int>(StrategyId::kConstantFold); ++s) {
      const auto strategy = static_cast<StrategyId>(s);
      sites[strategy] += proposer::FindSites(d, strategy).size();
    }
  }
  for (const auto& [strategy, count] : sites) {
    EXPECT_GT(count, 0) << StrategyName(strategy);
  }
}

TEST(RewriteCorpusTest, EverySiteRewritePreservesBehavior) {
  int checked = 0;
  for (const rtl::RtlDesign& d : LoadRewriteCorpus()) {
    for (int s = 0; s <= static_cast<int>(StrategyId::kConstantFold); ++s) {
      const auto strategy = static_cast<StrategyId>(s);
      for (const proposer::RewriteSite& site :
           proposer::FindSites(d, strategy)) {
        proposer::Rewrite r = proposer::ApplyAt(d, strategy, site);
        eda::EquivalenceResult sec = eda::CheckEquivalenceBuiltin(d, r.design);
        EXPECT_EQ(sec.mode, eda::SecMode::kExhaustive)
            << d.name() << " " << StrategyName(strategy);
        EXPECT_TRUE(sec.pass) << d.name() << " " << StrategyName(strategy)
                              << " at " << site.node_id() << "\n"
                              << rtl::Print(r.design);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

}  // namespace
}  // namespace rtlopt
