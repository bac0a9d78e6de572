#include <gtest/gtest.h>

#include <random>

#include "rtlopt/rtl/errors.h"
#include "rtlopt/rtl/evaluator.h"
#include "rtlopt/rtl/parser.h"
#include "rtlopt/rtl/simulate.h"
#include "support/random_design.h"

namespace rtlopt::rtl {
namespace {

const char kAnd[] =
    "module m(input a, input b, output y); assign y = a & b; endmodule";

std::vector<SignalValues> RandomTrace(const RtlDesign& d, int frames,
                                      std::mt19937_64& rng) {
  std::vector<SignalValues> trace(frames);
  for (auto& vec : trace) {
    for (const Port& p : d.ports()) {
      if (p.direction == PortDirection::kInput) {
        vec[p.name] = rng() & WidthMask(p.width);
      }
    }
  }
  return trace;
}

TEST(SimulateTest, AndTruthTable) {
  RtlDesign d = Parse(kAnd);
  EXPECT_EQ(Simulate(d, {{{"a", 1}, {"b", 1}}}, 1)[0].at("y"), 1u);
  EXPECT_EQ(Simulate(d, {{{"a", 1}, {"b", 0}}}, 1)[0].at("y"), 0u);
}

TEST(SimulateTest, RegisterStartsAtZero) {
  RtlDesign d = Parse(
      "module p(input a, output y); reg q; assign y = q; "
      "always_ff begin q <= a; end endmodule");
  auto out = Simulate(d, {{{"a", 1}}, {{"a", 0}}, {{"a", 1}}}, 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].at("y"), 0u);
  EXPECT_EQ(out[1].at("y"), 1u);
  EXPECT_EQ(out[2].at("y"), 0u);
}

TEST(SimulateTest, ModularArithmetic) {
  RtlDesign d = Parse(
      "module m(input [3:0] a, input [3:0] b, output [3:0] s, output [3:0] "
      "d, output l); assign s = a + b; assign d = a - b; assign l = a < b; "
      "endmodule");
  auto out = Simulate(d, {{{"a", 9}, {"b", 12}}}, 1)[0];
  EXPECT_EQ(out.at("s"), (9u + 12u) & 15u);
  EXPECT_EQ(out.at("d"), (9u - 12u) & 15u);
  EXPECT_EQ(out.at("l"), 1u);
}

TEST(SimulateTest, StimulusErrors) {
  RtlDesign d = Parse(kAnd);
  EXPECT_THROW(Simulate(d, {{{"a", 1}, {"b", 1}}}, 2), StimulusError);
  EXPECT_THROW(Simulate(d, {{{"a", 2}, {"b", 1}}}, 1), StimulusError);
  EXPECT_THROW(Simulate(d, {{{"a", 1}}}, 1), StimulusError);
  EXPECT_THROW(Simulate(d, {{{"a", 1}, {"b", 1}, {"c", 0}}}, 1),
               StimulusError);
}

TEST(SimulatePropertyTest, DeterministicAndMatchesCompiledEvaluator) {
  testing::RandomDesignGenerator gen(11);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    RtlDesign d = gen.Next();
    auto trace = RandomTrace(d, 6, rng);
    auto a = Simulate(d, trace, 6);
    EXPECT_EQ(a, Simulate(d, trace, 6));

    CompiledDesign c(d);
    std::vector<uint64_t> state(c.num_registers(), 0), next(c.num_registers());
    std::vector<uint64_t> in(c.inputs().size()), out(c.outputs().size());
    std::vector<uint64_t> scratch;
    for (int f = 0; f < 6; ++f) {
      for (size_t k = 0; k < in.size(); ++k) in[k] = trace[f].at(c.inputs()[k].name);
      c.Step(in, state, out, next, scratch);
      for (size_t k = 0; k < out.size(); ++k) {
        ASSERT_EQ(out[k], a[f].at(c.outputs()[k].name)) << Print(d);
      }
      state = next;
    }
  }
}

// Outputs of a purely combinational design at frame t only see frame t.
TEST(SimulatePropertyTest, CombinationalOutputsIgnoreOtherFrames) {
  testing::RandomDesignOptions opts;
  opts.max_registers = 0;
  testing::RandomDesignGenerator gen(5, opts);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    RtlDesign d = gen.Next();
    auto trace = RandomTrace(d, 4, rng);
    auto base = Simulate(d, trace, 4);
    auto perturbed = trace;
    auto fresh = RandomTrace(d, 4, rng);
    perturbed[0] = fresh[0];
    perturbed[1] = fresh[1];
    perturbed[3] = fresh[3];
    EXPECT_EQ(Simulate(d, perturbed, 4)[2], base[2]);
  }
}

}  // namespace
}  // namespace rtlopt::rtl
