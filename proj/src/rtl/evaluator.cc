#include "rtlopt/rtl/evaluator.h"

#include <algorithm>
#include <stdexcept>

namespace rtlopt::rtl {

CompiledDesign::CompiledDesign(const RtlDesign& design) {
  if (!design.is_parsed()) {
    throw std::invalid_argument("cannot compile an unparsed design");
  }
  for (const Port& p : design.ports()) {
    (p.direction == PortDirection::kInput ? inputs_ : outputs_).push_back(p);
  }
  for (const Port& p : inputs_) signal_slots_.push_back({p.name, num_slots_++});
  for (const Register& r : design.registers()) {
    signal_slots_.push_back({r.name, num_slots_++});
  }
  num_registers_ = design.registers().size();
  for (size_t i : design.assign_order()) {
    const Assign& a = design.assigns()[i];
    int src = CompileExpr(*a.value);
    int dst = num_slots_++;
    program_.push_back({Op::kVar, dst, src});
    signal_slots_.push_back({a.target, dst});
  }
  auto slot_of = [&](const std::string& name) {
    for (const auto& [n, s] : signal_slots_) {
      if (n == name) return s;
    }
    throw std::logic_error("unknown signal " + name);
  };
  for (const Port& p : outputs_) output_slots_.push_back(slot_of(p.name));
  for (const Register& r : design.registers()) {
    next_state_slots_.push_back(CompileExpr(*r.next));
  }
}

int CompiledDesign::CompileExpr(const Expr& e) {
  if (e.op == Op::kVar) {
    for (auto it = signal_slots_.rbegin(); it != signal_slots_.rend(); ++it) {
      if (it->first == e.name) return it->second;
    }
    throw std::logic_error("signal used before it is computed: " + e.name);
  }
  Instr in{e.op, -1};
  in.mask = WidthMask(e.width);
  switch (e.op) {
    case Op::kConst:
      in.imm = e.value;
      break;
    case Op::kShl:
    case Op::kShr:
      in.imm = static_cast<uint64_t>(e.amount);
      break;
    case Op::kSlice:
      in.imm = static_cast<uint64_t>(e.lo);
      break;
    default:
      break;
  }
  if (!e.operands.empty()) in.a = CompileExpr(*e.operands[0]);
  if (e.operands.size() > 1) in.b = CompileExpr(*e.operands[1]);
  if (e.operands.size() > 2) in.c = CompileExpr(*e.operands[2]);
  in.dst = num_slots_++;
  program_.push_back(in);
  return in.dst;
}

void CompiledDesign::Step(std::span<const uint64_t> inputs,
                          std::span<const uint64_t> state,
                          std::span<uint64_t> outputs,
                          std::span<uint64_t> next_state,
                          std::vector<uint64_t>& scratch) const {
  scratch.resize(num_slots_);
  uint64_t* v = scratch.data();
  std::copy(inputs.begin(), inputs.end(), v);
  std::copy(state.begin(), state.end(), v + inputs.size());
  for (const Instr& in : program_) {
    uint64_t r = 0;
    switch (in.op) {
      case Op::kConst:
        r = in.imm;
        break;
      case Op::kVar:
        r = v[in.a];
        break;
      case Op::kNot:
        r = ~v[in.a] & in.mask;
        break;
      case Op::kAnd:
        r = v[in.a] & v[in.b];
        break;
      case Op::kOr:
        r = v[in.a] | v[in.b];
        break;
      case Op::kXor:
        r = v[in.a] ^ v[in.b];
        break;
      case Op::kAdd:
        r = (v[in.a] + v[in.b]) & in.mask;
        break;
      case Op::kSub:
        r = (v[in.a] - v[in.b]) & in.mask;
        break;
      case Op::kEq:
        r = v[in.a] == v[in.b];
        break;
      case Op::kLt:
        r = v[in.a] < v[in.b];
        break;
      case Op::kShl:
        r = in.imm >= 64 ? 0 : (v[in.a] << in.imm) & in.mask;
        break;
      case Op::kShr:
        r = in.imm >= 64 ? 0 : v[in.a] >> in.imm;
        break;
      case Op::kSlice:
        r = (v[in.a] >> in.imm) & in.mask;
        break;
      case Op::kMux:
        r = v[in.a] ? v[in.b] : v[in.c];
        break;
    }
    v[in.dst] = r;
  }
  for (size_t i = 0; i < output_slots_.size(); ++i) {
    outputs[i] = v[output_slots_[i]];
  }
  for (size_t i = 0; i < next_state_slots_.size(); ++i) {
    next_state[i] = v[next_state_slots_[i]];
  }
}

}  // namespace rtlopt::rtl
