#ifndef RTLOPT_TESTS_SUPPORT_RANDOM_DESIGN_H_
#define RTLOPT_TESTS_SUPPORT_RANDOM_DESIGN_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rtlopt/rtl/ast.h"
#include "rtlopt/rtl/parser.h"

namespace rtlopt::testing {

struct RandomDesignOptions {
  int max_inputs = 3;
  std::vector<int> widths = {1, 2, 4};
  int max_wires = 3;
  int max_outputs = 2;
  int max_registers = 1;
  int max_depth = 3;
};

// Random well-formed RTL-lite design: every operator kind can appear, widths
// always agree, and nets only read earlier nets so no cycles form.
class RandomDesignGenerator {
 public:
  explicit RandomDesignGenerator(uint64_t seed,
                                 RandomDesignOptions options = {})
      : rng_(seed), options_(std::move(options)) {}

  rtl::RtlDesign Next() {
    rtl::DesignDraft d;
    d.name = "rnd";
    signals_.clear();
    int inputs = Uniform(1, options_.max_inputs);
    for (int i = 0; i < inputs; ++i) {
      int w = PickWidth();
      std::string name = "i" + std::to_string(i);
      d.ports.push_back({name, rtl::PortDirection::kInput, w});
      signals_.push_back({name, w});
    }
    int regs = Uniform(0, options_.max_registers);
    for (int i = 0; i < regs; ++i) {
      int w = PickWidth();
      std::string name = "r" + std::to_string(i);
      d.registers.push_back({name, w, nullptr, {}});
      signals_.push_back({name, w});
    }
    int wires = Uniform(0, options_.max_wires);
    for (int i = 0; i < wires; ++i) {
      int w = PickWidth();
      std::string name = "w" + std::to_string(i);
      d.wires.push_back({name, w});
      d.assigns.push_back({name, Gen(w, options_.max_depth), {}});
      signals_.push_back({name, w});
    }
    for (rtl::Register& r : d.registers) r.next = Gen(r.width, options_.max_depth);
    int outputs = Uniform(1, options_.max_outputs);
    for (int i = 0; i < outputs; ++i) {
      int w = PickWidth();
      std::string name = "o" + std::to_string(i);
      d.ports.push_back({name, rtl::PortDirection::kOutput, w});
      d.assigns.push_back({name, Gen(w, options_.max_depth), {}});
    }
    return rtl::Reparse(d);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  struct Sig {
    std::string name;
    int width;
  };

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  int PickWidth() {
    return options_.widths[Uniform(0, static_cast<int>(options_.widths.size()) - 1)];
  }

  rtl::ExprPtr Leaf(int width) {
    std::vector<const Sig*> exact;
    std::vector<const Sig*> wider;
    for (const Sig& s : signals_) {
      if (s.width == width) exact.push_back(&s);
      if (s.width > width) wider.push_back(&s);
    }
    int pick = Uniform(0, 9);
    if (!exact.empty() && pick < 6) {
      const Sig* s = exact[Uniform(0, static_cast<int>(exact.size()) - 1)];
      return rtl::MakeVar(s->name, s->width);
    }
    if (!wider.empty() && pick < 8) {
      const Sig* s = wider[Uniform(0, static_cast<int>(wider.size()) - 1)];
      int lo = Uniform(0, s->width - width);
      return rtl::MakeSlice(rtl::MakeVar(s->name, s->width), lo + width - 1, lo);
    }
    uint64_t v = std::uniform_int_distribution<uint64_t>(0, rtl::WidthMask(width))(rng_);
    return rtl::MakeConst(width, v);
  }

  rtl::ExprPtr Gen(int width, int depth) {
    if (depth <= 0 || Uniform(0, 9) < 2) return Leaf(width);
    using rtl::Op;
    int choice = Uniform(0, 11);
    switch (choice) {
      case 0:
        return rtl::MakeNot(Gen(width, depth - 1));
      case 1:
      case 2:
      case 3:
      case 4:
      case 5: {
        static const Op kOps[] = {Op::kAnd, Op::kOr, Op::kXor, Op::kAdd, Op::kSub};
        return rtl::MakeBinary(kOps[choice - 1], Gen(width, depth - 1),
                               Gen(width, depth - 1));
      }
      case 6:
      case 7: {
        if (width != 1) return Gen(width, depth);
        int w = PickWidth();
        return rtl::MakeBinary(choice == 6 ? Op::kEq : Op::kLt,
                               Gen(w, depth - 1), Gen(w, depth - 1));
      }
      case 8:
        return rtl::MakeShift(Uniform(0, 1) ? Op::kShl : Op::kShr,
                              Gen(width, depth - 1), Uniform(0, width));
      default:
        return rtl::MakeMux(Gen(1, depth - 1), Gen(width, depth - 1),
                            Gen(width, depth - 1));
    }
  }

  std::mt19937_64 rng_;
  RandomDesignOptions options_;
  std::vector<Sig> signals_;
};

}  // namespace rtlopt::testing

#endif  // RTLOPT_TESTS_SUPPORT_RANDOM_DESIGN_H_
