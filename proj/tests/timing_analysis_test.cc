#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/rtl/parser.h"
#include "rtlopt/timing/analysis.h"
#include "support/random_design.h"

namespace rtlopt::timing {
namespace {

using rtl::Parse;
using rtl::RtlDesign;

TimingPath MakePath(std::string endpoint, double slack) {
  TimingPath p;
  p.startpoint = "a";
  p.endpoint = std::move(endpoint);
  p.slack_ns = slack;
  return p;
}

TimingReport Worst(const RtlDesign& d, double clock = 0.5) {
  return eda::AnalyzeTiming(d, clock).report;
}

TEST(SelectCriticalPathsTest, OrdersBySlack) {
  TimingReport r;
  r.endpoints = {MakePath("x", 0.2), MakePath("y", -0.3), MakePath("z", -0.1)};
  std::vector<TimingPath> top = SelectCriticalPaths(r, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].slack_ns, -0.3);
  EXPECT_EQ(top[1].slack_ns, -0.1);
}

TEST(SelectCriticalPathsTest, ClampsToEndpointCount) {
  TimingReport r;
  r.endpoints = {MakePath("x", 0.2), MakePath("y", -0.3), MakePath("z", -0.1)};
  EXPECT_EQ(SelectCriticalPaths(r, 10).size(), 3u);
  EXPECT_TRUE(SelectCriticalPaths(TimingReport{}, 3).empty());
  EXPECT_THROW(SelectCriticalPaths(r, 0), std::invalid_argument);
}

TEST(SelectCriticalPathsTest, TiesByEndpointName) {
  TimingReport r;
  r.endpoints = {MakePath("q_b", -0.2), MakePath("q_a", -0.2)};
  std::vector<TimingPath> top = SelectCriticalPaths(r, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].endpoint, "q_a");
}

// The selection is a prefix of the normalized endpoint list.
TEST(SelectCriticalPathsTest, PrefixOfSortedReport) {
  testing::RandomDesignGenerator gen(5, {.max_outputs = 4, .max_registers = 3});
  for (int i = 0; i < 100; ++i) {
    TimingReport r = Worst(gen.Next());
    for (int k = 1; k <= 5; ++k) {
      std::vector<TimingPath> top = SelectCriticalPaths(r, k);
      ASSERT_LE(top.size(), r.endpoints.size());
      for (size_t j = 0; j < top.size(); ++j) EXPECT_EQ(top[j], r.endpoints[j]);
    }
  }
}

TEST(TimingReportTest, JsonRoundTrip) {
  RtlDesign d = Parse(
      "module p(input [3:0] a, output [3:0] y);\nreg [3:0] q;\n"
      "assign y = q + a;\nalways_ff begin q <= a ^ q; end\nendmodule\n");
  TimingReport r = Worst(d);
  EXPECT_EQ(TimingReportFromJson(ToJson(r)), r);
  TimingReport dup = r;
  dup.endpoints.push_back(r.endpoints[0]);
  EXPECT_THROW(dup.Normalize(), std::invalid_argument);
}

// Stage delays plus clock-to-q and setup account for the whole period.
TEST(TimingReportTest, StageDelaysAddUp) {
  testing::RandomDesignGenerator gen(8, {.max_registers = 2});
  for (int i = 0; i < 200; ++i) {
    TimingReport r = Worst(gen.Next(), 0.7);
    for (const TimingPath& p : r.endpoints) {
      EXPECT_NEAR(p.StageDelaySum() + 0.1, 0.7 - p.slack_ns, 1e-9);
    }
  }
}

TEST(MapPathToRtlTest, SingleLineAssign) {
  RtlDesign d = Parse(
      "module add4(input [7:0] a, input [7:0] b, input [7:0] c,\n"
      "  input [7:0] d, output [7:0] y);\n"
      "  assign y = ((a + b) + c) + d;\n"
      "endmodule\n",
      "add4.rtl");
  RtlRegion region = MapPathToRtl(Worst(d).endpoints[0], d);
  EXPECT_EQ(region, (RtlRegion{"add4.rtl", 3, 3, RegionConfidence::kExact}));
}

TEST(MapPathToRtlTest, MultiLinePath) {
  RtlDesign d = Parse(
      "module m(input [3:0] a, input [3:0] b, output [3:0] y);\n"
      "wire [3:0] t;\n"
      "assign t = a + b;\n"
      "assign y = t ^ a;\n"
      "endmodule\n");
  TimingPath p = Worst(d).endpoints[0];
  RtlRegion region = MapPathToRtl(p, d);
  EXPECT_EQ(region.start_line, 3);
  EXPECT_EQ(region.end_line, 4);
  EXPECT_EQ(region.confidence, RegionConfidence::kExact);
}

TEST(MapPathToRtlTest, ExternalNamesAreMatchedHeuristically) {
  std::string src =
      "// vending machine\n"          // 1
      "module vend(input clk,\n"      // 2
      "  input [1:0] coin,\n"         // 3
      "  output reg dispense);\n"     // 4
      "  localparam IDLE = 2'd0;\n"   // 5
      "  localparam PAID = 2'd1;\n"   // 6
      "  reg [2:0] state;\n"          // 7
      "  reg [2:0] next;\n"           // 8
      "  always @(*) begin\n"         // 9
      "    next = 3'd0;\n"            // 10
      "    case (coin)\n"             // 11
      "      2'd1: next = state;\n"   // 12
      "      2'd2: next = state + 1;\n"
      "      default: next = 0;\n"
      "    endcase\n"
      "  end\n"
      "  always @(posedge clk) begin\n"
      "    dispense <= 0;\n"
      "    state <= next;\n"          // 19
      "  end\n"
      "endmodule\n";
  RtlDesign d = RtlDesign::Opaque(src, "vend.v");
  TimingPath p;
  p.startpoint = "state_reg[0]";
  p.endpoint = "state_reg[2]";
  p.slack_ns = -0.05;
  p.stages.push_back({"U7", "NAND2", 0.03, "", std::nullopt});
  EXPECT_EQ(MapPathToRtl(p, d),
            (RtlRegion{"vend.v", 7, 19, RegionConfidence::kHeuristic}));

  p.startpoint = "u_top/foo_q";
  p.endpoint = "bar_reg[1]";
  EXPECT_EQ(MapPathToRtl(p, d),
            (RtlRegion{"vend.v", 1, 21, RegionConfidence::kHeuristicFailed}));
}

TEST(StripSynthesisSuffixesTest, Examples) {
  EXPECT_EQ(StripSynthesisSuffixes("state_reg[2]"), "state");
  EXPECT_EQ(StripSynthesisSuffixes("count_q"), "count");
  EXPECT_EQ(StripSynthesisSuffixes("mem[3][1]"), "mem");
  EXPECT_EQ(StripSynthesisSuffixes("data"), "data");
}

// Every stage location lies inside the region, and builtin paths are exact.
TEST(MapPathToRtlTest, RegionEnclosesStages) {
  testing::RandomDesignGenerator gen(13, {.max_wires = 4, .max_registers = 2});
  for (int i = 0; i < 200; ++i) {
    RtlDesign d = gen.Next();
    for (const TimingPath& p : Worst(d).endpoints) {
      RtlRegion region = MapPathToRtl(p, d);
      EXPECT_EQ(region.confidence, RegionConfidence::kExact);
      for (const TimingStage& s : p.stages) {
        ASSERT_TRUE(s.line.has_value());
        EXPECT_GE(*s.line, region.start_line);
        EXPECT_LE(*s.line, region.end_line);
      }
    }
  }
}

TEST(DiagnoseTest, WideAdd) {
  RtlDesign d = Parse(
      "module m(input [31:0] a, input [31:0] b, output [31:0] y); "
      "assign y = a + b; endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kWideArithmetic);
  EXPECT_EQ(dx.pattern, PatternId::kWideArithmetic);
  EXPECT_EQ(dx.severity, Severity::kNormal);
}

TEST(DiagnoseTest, ChainedNarrowAddersAddUp) {
  RtlDesign d = Parse(
      "module add4(input [7:0] a, input [7:0] b, input [7:0] c, input [7:0] "
      "d, output [7:0] y); assign y = ((a + b) + c) + d; endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kWideArithmetic);
  EXPECT_NE(dx.evidence.find("24 carry bits"), std::string::npos);
}

TEST(DiagnoseTest, MuxCascade) {
  RtlDesign d = Parse(
      "module m(input s0, input s1, input s2, input s3, input a, input b, "
      "input c, input d, input e, output y); "
      "assign y = s0 ? a : (s1 ? b : (s2 ? c : (s3 ? d : e))); endmodule");
  TimingPath p = Worst(d).endpoints[0];
  ASSERT_EQ(p.stages.size(), 4u);
  BottleneckDiagnosis dx = Diagnose(p, d);
  EXPECT_EQ(dx.root_cause, RootCause::kMuxCascade);
  EXPECT_EQ(dx.pattern, PatternId::kMuxHeavySelection);
}

TEST(DiagnoseTest, ShallowPathIsLowSeverityDepth) {
  RtlDesign d = Parse(
      "module m(input a, input b, input c, output y); "
      "assign y = (a & b) | c; endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kExcessiveDepth);
  EXPECT_EQ(dx.pattern, PatternId::kExcessiveDepth);
  EXPECT_EQ(dx.severity, Severity::kLow);
}

TEST(DiagnoseTest, DeepPathIsNormalSeverity) {
  RtlDesign d = Parse(
      "module m(input a, input b, input c, input d, input e, input f, "
      "input g, output y); assign y = ((((((a & b) | c) ^ d) & e) | f) ^ g); "
      "endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kExcessiveDepth);
  EXPECT_EQ(dx.severity, Severity::kNormal);
}

TEST(DiagnoseTest, CompareChains) {
  RtlDesign fsm = Parse(
      "module f(input [1:0] i, output y); reg [1:0] s; "
      "assign y = (s == 2'd1) | (s == 2'd2) | (s == 2'd3); "
      "always_ff begin s <= i; end endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(fsm).endpoints[0], fsm);
  EXPECT_EQ(dx.root_cause, RootCause::kWideCompare);
  EXPECT_EQ(dx.pattern, PatternId::kDeepDecodeFsm);

  RtlDesign cmp = Parse(
      "module c(input [3:0] a, input [3:0] b, input [3:0] c, output y); "
      "assign y = (a == b) & (b == c) & (a == c); endmodule");
  dx = Diagnose(Worst(cmp).endpoints[0], cmp);
  EXPECT_EQ(dx.root_cause, RootCause::kWideCompare);
  EXPECT_EQ(dx.pattern, PatternId::kWideComparison);
}

TEST(DiagnoseTest, HighFanout) {
  RtlDesign d = Parse(
      "module h(input e, input [7:0] a, output [7:0] y, output [7:0] z); "
      "wire [7:0] m; assign m = a ^ 8'd1; "
      "assign y = (m & a) | (m ^ a) | (m & 8'd3) | (m | 8'd4); "
      "assign z = (m ^ 8'd7) & (m | a) & (m ^ 8'd9) & m; endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kHighFanout);
  EXPECT_EQ(dx.pattern, PatternId::kHighFanoutControl);
}

TEST(DiagnoseTest, ControlDataCoupling) {
  RtlDesign d = Parse(
      "module c(input en, input [7:0] a, input [7:0] b, output [7:0] y); "
      "assign y = en ? (a ^ b) : b; endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kControlDataCoupling);
}

TEST(DiagnoseTest, Reconvergence) {
  RtlDesign d = Parse(
      "module r(input a, input b, output y); wire t; assign t = a & b; "
      "assign y = t ^ a; endmodule");
  BottleneckDiagnosis dx = Diagnose(Worst(d).endpoints[0], d);
  EXPECT_EQ(dx.root_cause, RootCause::kReconvergent);
  EXPECT_EQ(dx.pattern, PatternId::kReconvergentLogic);
}

TEST(DiagnoseTest, DeterministicOnRandomDesigns) {
  testing::RandomDesignGenerator gen(31, {.max_wires = 4, .max_registers = 2});
  for (int i = 0; i < 200; ++i) {
    RtlDesign d = gen.Next();
    for (const TimingPath& p : Worst(d).endpoints) {
      BottleneckDiagnosis a = Diagnose(p, d);
      BottleneckDiagnosis b = Diagnose(p, d);
      EXPECT_EQ(ToJson(a), ToJson(b));
    }
  }
}

}  // namespace
}  // namespace rtlopt::timing
