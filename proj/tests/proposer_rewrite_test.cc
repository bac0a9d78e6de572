#include <gtest/gtest.h>

#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/proposer/rewrite.h"
#include "rtlopt/rtl/parser.h"
#include "support/random_design.h"

namespace rtlopt::proposer {
namespace {

using rtl::Parse;
using rtl::RtlDesign;

constexpr StrategyId kAllStrategies[] = {
    StrategyId::kConditionPrecompute,
    StrategyId::kSignalReplication,
    StrategyId::kSelectiveRegisterInsertion,
    StrategyId::kTreeRebalance,
    StrategyId::kCommonSubexpressionExtraction,
    StrategyId::kMuxRestructure,
    StrategyId::kDecomposition,
    StrategyId::kConstantFold,
};

const char kChained[] =
    "module add4(input [7:0] a, input [7:0] b, input [7:0] c, input [7:0] d, "
    "output [7:0] y);\n"
    "  assign y = ((a + b) + c) + d;\n"
    "endmodule\n";

std::string Body(const RtlDesign& d) {
  std::string out;
  for (const rtl::Assign& a : d.assigns()) {
    out += a.target + "=" + rtl::PrintExpr(*a.value) + ";";
  }
  for (const rtl::Register& r : d.registers()) {
    out += r.name + "<=" + rtl::PrintExpr(*r.next) + ";";
  }
  return out;
}

void ExpectEquivalent(const RtlDesign& golden, const RtlDesign& candidate) {
  eda::EquivalenceResult r = eda::CheckEquivalenceBuiltin(golden, candidate);
  EXPECT_TRUE(r.pass) << rtl::Print(golden) << "---\n" << rtl::Print(candidate);
}

TEST(RewriteTest, TreeRebalanceChainedAdder) {
  RtlDesign d = Parse(kChained);
  std::vector<RewriteSite> sites = FindSites(d, StrategyId::kTreeRebalance);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].node_id(), "y#0");
  Rewrite r = ApplyAt(d, StrategyId::kTreeRebalance, sites[0]);
  EXPECT_EQ(Body(r.design), "y=(a + b) + (c + d);");
  EXPECT_DOUBLE_EQ(eda::AnalyzeTiming(d, 0.5).metrics.wns, -0.23);
  eda::PpaMetrics after = eda::AnalyzeTiming(r.design, 0.5).metrics;
  EXPECT_DOUBLE_EQ(after.wns, -0.02);
  EXPECT_DOUBLE_EQ(after.area, eda::AnalyzeTiming(d, 0.5).metrics.area);
  ExpectEquivalent(d, r.design);
  // Already balanced: nothing left to do.
  EXPECT_TRUE(FindSites(r.design, StrategyId::kTreeRebalance).empty());
}

TEST(RewriteTest, TreeRebalanceNeedsDepthToGain) {
  RtlDesign d = Parse(
      "module m(input a, input b, input c, output y); "
      "assign y = (a ^ b) ^ c; endmodule");
  EXPECT_TRUE(FindSites(d, StrategyId::kTreeRebalance).empty());
}

TEST(RewriteTest, ConstantFoldAnnihilator) {
  RtlDesign d = Parse(
      "module m(input a, output y); assign y = a & 1'b0; endmodule");
  Rewrite r = ApplyStrategy(d, StrategyId::kConstantFold,
                            {"", 1, 1, timing::RegionConfidence::kExact});
  EXPECT_EQ(Body(r.design), "y=1'b0;");
  ExpectEquivalent(d, r.design);
}

TEST(RewriteTest, RegisterDuplicationNeedsRegister) {
  RtlDesign d = Parse(kChained);
  EXPECT_THROW(ApplyStrategy(d, StrategyId::kSelectiveRegisterInsertion,
                             {"", 1, 3, timing::RegionConfidence::kExact}),
               NotApplicableError);
}

TEST(RewriteTest, RegisterDuplicationKeepsLatency) {
  RtlDesign d = Parse(
      "module m(input [1:0] a, output [1:0] y, output [1:0] z);\n"
      "  reg [1:0] q;\n"
      "  assign y = q + a;\n"
      "  assign z = q ^ a;\n"
      "  always_ff begin\n"
      "    q <= q + a;\n"
      "  end\n"
      "endmodule\n");
  Rewrite r = ApplyStrategy(d, StrategyId::kSelectiveRegisterInsertion,
                            {"", 1, 20, timing::RegionConfidence::kExact});
  EXPECT_EQ(r.design.registers().size(), 2u);
  EXPECT_EQ(Body(r.design), "y=q + a;z=q ^ a;q<=q_rep + a;q_rep<=q_rep + a;");
  ExpectEquivalent(d, r.design);
}

TEST(RewriteTest, MuxRestructureKeepsPriority) {
  // Overlapping conditions: the rewrite must still pick the first true one.
  RtlDesign d = Parse(
      "module m(input [1:0] s, input [1:0] a, input [1:0] b, output [1:0] y);\n"
      "  assign y = s[0] ? a : (s[1] ? b : ((s == 2'd3) ? ~a : (s[1] ? a : b)));\n"
      "endmodule\n");
  std::vector<RewriteSite> sites = FindSites(d, StrategyId::kMuxRestructure);
  ASSERT_EQ(sites.size(), 1u);
  Rewrite r = ApplyAt(d, StrategyId::kMuxRestructure, sites[0]);
  EXPECT_TRUE(FindSites(r.design, StrategyId::kMuxRestructure).empty());
  ExpectEquivalent(d, r.design);
  EXPECT_GT(eda::AnalyzeTiming(r.design, 0.5).metrics.wns,
            eda::AnalyzeTiming(d, 0.5).metrics.wns);
}

TEST(RewriteTest, CommonSubexpressionSharesOneWire) {
  RtlDesign d = Parse(
      "module m(input [3:0] a, input [3:0] b, output [3:0] y, output [3:0] z);\n"
      "  assign y = (a + b) ^ a;\n"
      "  assign z = (a + b) & b;\n"
      "endmodule\n");
  std::vector<RewriteSite> sites =
      FindSites(d, StrategyId::kCommonSubexpressionExtraction);
  ASSERT_EQ(sites.size(), 1u);
  Rewrite r = ApplyAt(d, StrategyId::kCommonSubexpressionExtraction, sites[0]);
  EXPECT_EQ(Body(r.design), "y=cse ^ a;z=cse & b;cse=a + b;");
  EXPECT_LT(eda::AnalyzeTiming(r.design, 0.5).metrics.area,
            eda::AnalyzeTiming(d, 0.5).metrics.area);
  ExpectEquivalent(d, r.design);
}

TEST(RewriteTest, SignalReplicationSplitsReaders) {
  RtlDesign d = Parse(
      "module m(input [3:0] a, output [3:0] x, output [3:0] y, output [3:0] z);\n"
      "  wire [3:0] t;\n"
      "  assign t = a + 4'd1;\n"
      "  assign x = t;\n"
      "  assign y = ~t;\n"
      "  assign z = t ^ a;\n"
      "endmodule\n");
  Rewrite r = ApplyStrategy(d, StrategyId::kSignalReplication,
                            {"", 1, 20, timing::RegionConfidence::kExact});
  EXPECT_EQ(Body(r.design), "t=a + 4'd1;x=t;y=~t;z=t_rep ^ a;t_rep=a + 4'd1;");
  ExpectEquivalent(d, r.design);
}

TEST(RewriteTest, DecompositionAndConditionPrecompute) {
  RtlDesign d = Parse(
      "module m(input [3:0] a, input [3:0] b, output [3:0] y);\n"
      "  assign y = (a < b) ? (a - b) : (b - a);\n"
      "endmodule\n");
  Rewrite dec = ApplyAt(d, StrategyId::kDecomposition,
                        FindSites(d, StrategyId::kDecomposition).at(0));
  EXPECT_EQ(Body(dec.design), "y=y_s0 ? y_s1 : y_s2;y_s0=a < b;y_s1=a - b;y_s2=b - a;");
  ExpectEquivalent(d, dec.design);
  Rewrite pre = ApplyAt(d, StrategyId::kConditionPrecompute,
                        FindSites(d, StrategyId::kConditionPrecompute).at(0));
  EXPECT_EQ(Body(pre.design), "y=y_cond ? (a - b) : (b - a);y_cond=a < b;");
  ExpectEquivalent(d, pre.design);
}

TEST(RewriteTest, RegionSelectsSites) {
  RtlDesign d = Parse(
      "module m(input [3:0] a, input [3:0] b, output [3:0] y, output [3:0] z);\n"
      "  assign y = ((a + b) + a) + b;\n"
      "  assign z = ((a ^ b) ^ a) ^ b;\n"
      "endmodule\n");
  timing::RtlRegion line3{"", 3, 3, timing::RegionConfidence::kExact};
  Rewrite r = ApplyStrategy(d, StrategyId::kTreeRebalance, line3);
  EXPECT_EQ(r.site.owner, "z");
  timing::RtlRegion line1{"", 1, 1, timing::RegionConfidence::kExact};
  EXPECT_THROW(ApplyStrategy(d, StrategyId::kTreeRebalance, line1),
               NotApplicableError);
}

TEST(RewriteTest, RejectsForeignSite) {
  RtlDesign d = Parse(kChained);
  EXPECT_THROW(ApplyAt(d, StrategyId::kConstantFold, {"y", 0, 2}),
               NotApplicableError);
}

TEST(RewriteTest, Deterministic) {
  RtlDesign d = Parse(kChained);
  for (StrategyId s : kAllStrategies) {
    for (const RewriteSite& site : FindSites(d, s)) {
      EXPECT_EQ(rtl::Print(ApplyAt(d, s, site).design),
                rtl::Print(ApplyAt(d, s, site).design));
    }
  }
}

// Every rewrite at every site of random designs preserves behavior.
TEST(RewriteTest, RandomDesignsStayEquivalent) {
  testing::RandomDesignOptions options;
  options.max_inputs = 2;
  options.widths = {1, 2};
  options.max_wires = 3;
  options.max_depth = 4;
  testing::RandomDesignGenerator gen(2024, options);
  int applied = 0;
  for (int i = 0; i < 150; ++i) {
    RtlDesign d = gen.Next();
    for (StrategyId s : kAllStrategies) {
      for (const RewriteSite& site : FindSites(d, s)) {
        Rewrite r = ApplyAt(d, s, site);
        ASSERT_TRUE(d.SameInterface(r.design));
        eda::EquivalenceResult eq = eda::CheckEquivalenceBuiltin(d, r.design);
        ASSERT_TRUE(eq.pass) << StrategyName(s) << " at " << site.node_id()
                             << "\n" << rtl::Print(d) << "---\n"
                             << rtl::Print(r.design);
        ++applied;
      }
    }
  }
  EXPECT_GT(applied, 300);
}

}  // namespace
}  // namespace rtlopt::proposer
