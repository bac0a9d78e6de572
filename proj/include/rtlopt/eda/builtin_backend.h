#ifndef RTLOPT_EDA_BUILTIN_BACKEND_H_
#define RTLOPT_EDA_BUILTIN_BACKEND_H_

#include <cstdint>

#include "rtlopt/eda/backend.h"

namespace rtlopt::eda {

// Delay model, in picoseconds. Operand width w:
//   not, slice, constant shift   50
//   and, or, xor                100
//   mux                         150
//   eq                           50 + 20 * ceil(log2 w)
//   lt, add, sub                 50 + 20 * w
// Every endpoint adds clock-to-q (50) and setup (50).
inline constexpr int64_t kClockToQPs = 50;
inline constexpr int64_t kSetupPs = 50;

int64_t NodeDelayPs(const rtl::Expr& e);
// Area units: not 1; and/or/xor 2w; mux 3w; eq/lt 2w; add/sub 4w.
double NodeArea(const rtl::Expr& e);
double RegisterArea(int width);

// Synthesis-free static timing over the expression DAG. The clock period is
// rounded to whole picoseconds.
SynthesisResult AnalyzeTiming(const rtl::RtlDesign& design, double clock_ns);

struct SecOptions {
  int enumeration_budget_bits = 20;
  int samples = 100000;
  uint64_t seed = 0xD0;
};

// Sequential equivalence from the all-zero state over F = max register
// count + 2 frames, comparing every output at every frame. Exhaustive when
// input bits * F fits the budget, otherwise fixed-seed random sampling.
// Throws rtl::InterfaceMismatchError when the port lists differ.
EquivalenceResult CheckEquivalenceBuiltin(const rtl::RtlDesign& golden,
                                          const rtl::RtlDesign& candidate,
                                          const SecOptions& options = {});

int SecFrames(const rtl::RtlDesign& golden, const rtl::RtlDesign& candidate);

class BuiltinBackend : public EdaBackend {
 public:
  explicit BuiltinBackend(double clock_ns = kBuiltinDefaultClockNs,
                          SecOptions sec = {});

  std::string id() const override { return "builtin"; }
  double clock_ns() const override { return clock_ns_; }
  SynthesisResult Synthesize(const rtl::RtlDesign& design) const override;
  EquivalenceResult CheckEquivalence(
      const rtl::RtlDesign& golden,
      const rtl::RtlDesign& candidate) const override;

 private:
  double clock_ns_;
  SecOptions sec_;
};

}  // namespace rtlopt::eda

#endif  // RTLOPT_EDA_BUILTIN_BACKEND_H_
