#ifndef RTLOPT_RTL_EVALUATOR_H_
#define RTLOPT_RTL_EVALUATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rtlopt/rtl/ast.h"

namespace rtlopt::rtl {

// A design flattened into a straight-line instruction list over value
// slots. Produces the same frames as Simulate() at a fraction of the cost;
// the equivalence checker uses it for enumeration and sampling.
class CompiledDesign {
 public:
  explicit CompiledDesign(const RtlDesign& design);

  // Inputs and outputs follow port order, state follows register order.
  const std::vector<Port>& inputs() const { return inputs_; }
  const std::vector<Port>& outputs() const { return outputs_; }
  size_t num_registers() const { return num_registers_; }

  // One clock frame. `scratch` is resized as needed and may be reused.
  void Step(std::span<const uint64_t> inputs, std::span<const uint64_t> state,
            std::span<uint64_t> outputs, std::span<uint64_t> next_state,
            std::vector<uint64_t>& scratch) const;

 private:
  struct Instr {
    Op op;
    int dst;
    int a = -1;
    int b = -1;
    int c = -1;
    uint64_t mask = 0;
    uint64_t imm = 0;  // constant value, shift amount or slice low bit
  };

  int CompileExpr(const Expr& e);

  std::vector<Port> inputs_;
  std::vector<Port> outputs_;
  size_t num_registers_ = 0;
  std::vector<Instr> program_;
  std::vector<int> output_slots_;
  std::vector<int> next_state_slots_;
  std::vector<std::pair<std::string, int>> signal_slots_;
  int num_slots_ = 0;
};

}  // namespace rtlopt::rtl

#endif  // RTLOPT_RTL_EVALUATOR_H_
