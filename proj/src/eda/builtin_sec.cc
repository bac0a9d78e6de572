#include <algorithm>
#include <random>
#include <unordered_set>

#include "rtlopt/common/hash.h"
#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/rtl/errors.h"
#include "rtlopt/rtl/evaluator.h"

namespace rtlopt::eda {

namespace {

using rtl::CompiledDesign;
using rtl::Port;

// Golden state followed by candidate state.
using ProductState = std::vector<uint64_t>;

struct ProductStateHash {
  size_t operator()(const ProductState& s) const {
    return Fnv1a64(std::string_view(reinterpret_cast<const char*>(s.data()),
                                    s.size() * sizeof(uint64_t)));
  }
};

class Miter {
 public:
  Miter(const rtl::RtlDesign& golden, const rtl::RtlDesign& candidate)
      : golden_(golden), candidate_(candidate) {
    ng_ = golden_.num_registers();
    nc_ = candidate_.num_registers();
    const size_t nout = golden_.outputs().size();
    out_g_.resize(nout);
    out_c_.resize(nout);
    for (const Port& p : golden_.inputs()) input_bits_ += p.width;
  }

  const std::vector<Port>& inputs() const { return golden_.inputs(); }
  const std::vector<Port>& outputs() const { return golden_.outputs(); }
  int input_bits() const { return input_bits_; }
  size_t state_size() const { return ng_ + nc_; }

  // Splits a packed input vector into per-port values, first port in the
  // low bits.
  void Decode(uint64_t packed, std::vector<uint64_t>& values) const {
    values.resize(inputs().size());
    int offset = 0;
    for (size_t i = 0; i < inputs().size(); ++i) {
      const int w = inputs()[i].width;
      values[i] = (offset >= 64 ? 0 : packed >> offset) & rtl::WidthMask(w);
      offset += w;
    }
  }

  // Steps both designs; returns the index of the first differing output or
  // -1.
  int Step(const std::vector<uint64_t>& in, const ProductState& state,
           ProductState& next) {
    next.resize(state_size());
    std::span<const uint64_t> s(state);
    std::span<uint64_t> n(next);
    golden_.Step(in, s.subspan(0, ng_), out_g_, n.subspan(0, ng_), scratch_);
    candidate_.Step(in, s.subspan(ng_, nc_), out_c_, n.subspan(ng_, nc_),
                    scratch_);
    for (size_t i = 0; i < out_g_.size(); ++i) {
      if (out_g_[i] != out_c_[i]) return static_cast<int>(i);
    }
    return -1;
  }

  Counterexample MakeCounterexample(
      const std::vector<std::vector<uint64_t>>& trace, int output) const {
    Counterexample cex;
    for (const std::vector<uint64_t>& frame : trace) {
      rtl::SignalValues values;
      for (size_t i = 0; i < inputs().size(); ++i) {
        values[inputs()[i].name] = frame[i];
      }
      cex.inputs.push_back(std::move(values));
    }
    cex.frame = static_cast<int>(trace.size()) - 1;
    cex.output = outputs()[output].name;
    cex.golden_value = out_g_[output];
    cex.candidate_value = out_c_[output];
    return cex;
  }

 private:
  CompiledDesign golden_;
  CompiledDesign candidate_;
  size_t ng_ = 0;
  size_t nc_ = 0;
  int input_bits_ = 0;
  std::vector<uint64_t> out_g_;
  std::vector<uint64_t> out_c_;
  std::vector<uint64_t> scratch_;
};

// Breadth-first exploration of the product machine, frame by frame, with a
// global visited set. Every input vector of a frame is tried before the next
// frame is expanded, so a reported counterexample has the smallest frame.
EquivalenceResult Enumerate(Miter& miter, int frames) {
  struct Node {
    ProductState state;
    int parent;
    uint64_t input;
  };
  std::vector<Node> nodes;
  nodes.push_back({ProductState(miter.state_size(), 0), -1, 0});
  std::unordered_set<ProductState, ProductStateHash> visited{nodes[0].state};
  std::vector<int> frontier{0};
  const uint64_t vectors = uint64_t{1} << miter.input_bits();
  std::vector<uint64_t> in;
  ProductState next;

  auto trace_to = [&](int node, uint64_t last) {
    std::vector<std::vector<uint64_t>> trace;
    miter.Decode(last, in);
    trace.push_back(in);
    for (int n = node; nodes[n].parent >= 0; n = nodes[n].parent) {
      miter.Decode(nodes[n].input, in);
      trace.push_back(in);
    }
    std::reverse(trace.begin(), trace.end());
    return trace;
  };

  for (int frame = 0; frame < frames && !frontier.empty(); ++frame) {
    std::vector<int> expanded;
    for (int node : frontier) {
      for (uint64_t v = 0; v < vectors; ++v) {
        miter.Decode(v, in);
        int diff = miter.Step(in, nodes[node].state, next);
        if (diff >= 0) {
          std::vector<std::vector<uint64_t>> trace = trace_to(node, v);
          // Replay to restore the outputs of the failing frame.
          ProductState s(miter.state_size(), 0);
          for (const std::vector<uint64_t>& f : trace) {
            diff = miter.Step(f, s, next);
            s = next;
          }
          EquivalenceResult r;
          r.pass = false;
          r.mode = SecMode::kExhaustive;
          r.counterexample = miter.MakeCounterexample(trace, diff);
          return r;
        }
        if (frame + 1 < frames && visited.insert(next).second) {
          nodes.push_back({next, node, v});
          expanded.push_back(static_cast<int>(nodes.size()) - 1);
        }
      }
    }
    frontier = std::move(expanded);
  }
  EquivalenceResult r;
  r.pass = true;
  r.mode = SecMode::kExhaustive;
  return r;
}

EquivalenceResult Sample(Miter& miter, int frames, const SecOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<uint64_t>> trace(frames);
  ProductState state;
  ProductState next;
  for (int s = 0; s < options.samples; ++s) {
    state.assign(miter.state_size(), 0);
    for (int f = 0; f < frames; ++f) {
      std::vector<uint64_t>& in = trace[f];
      in.resize(miter.inputs().size());
      for (size_t i = 0; i < in.size(); ++i) {
        in[i] = rng() & rtl::WidthMask(miter.inputs()[i].width);
      }
      int diff = miter.Step(in, state, next);
      if (diff >= 0) {
        EquivalenceResult r;
        r.pass = false;
        r.mode = SecMode::kBoundedSampled;
        r.counterexample = miter.MakeCounterexample(
            {trace.begin(), trace.begin() + f + 1}, diff);
        return r;
      }
      std::swap(state, next);
    }
  }
  EquivalenceResult r;
  r.pass = true;
  r.mode = SecMode::kBoundedSampled;
  r.note = std::to_string(options.samples) + " random sequences of " +
           std::to_string(frames) + " frames";
  return r;
}

}  // namespace

int SecFrames(const rtl::RtlDesign& golden, const rtl::RtlDesign& candidate) {
  return static_cast<int>(std::max(golden.registers().size(),
                                   candidate.registers().size())) +
         2;
}

EquivalenceResult CheckEquivalenceBuiltin(const rtl::RtlDesign& golden,
                                          const rtl::RtlDesign& candidate,
                                          const SecOptions& options) {
  if (!golden.is_parsed() || !candidate.is_parsed()) {
    throw BackendError("the built-in equivalence checker needs RTL-lite designs");
  }
  if (!golden.SameInterface(candidate)) {
    throw rtl::InterfaceMismatchError("port lists of '" + golden.name() +
                                      "' and '" + candidate.name() + "' differ");
  }
  Miter miter(golden, candidate);
  const int frames = SecFrames(golden, candidate);
  if (static_cast<int64_t>(miter.input_bits()) * frames <=
      options.enumeration_budget_bits) {
    return Enumerate(miter, frames);
  }
  return Sample(miter, frames, options);
}

}  // namespace rtlopt::eda
