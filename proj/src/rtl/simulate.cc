#include "rtlopt/rtl/simulate.h"

#include "rtlopt/rtl/errors.h"

namespace rtlopt::rtl {

uint64_t EvaluateExpr(const Expr& e, const SignalValues& values) {
  const uint64_t mask = WidthMask(e.width);
  auto arg = [&](int i) { return EvaluateExpr(*e.operands[i], values); };
  switch (e.op) {
    case Op::kConst:
      return e.value;
    case Op::kVar:
      return values.at(e.name);
    case Op::kNot:
      return ~arg(0) & mask;
    case Op::kAnd:
      return arg(0) & arg(1);
    case Op::kOr:
      return arg(0) | arg(1);
    case Op::kXor:
      return arg(0) ^ arg(1);
    case Op::kAdd:
      return (arg(0) + arg(1)) & mask;
    case Op::kSub:
      return (arg(0) - arg(1)) & mask;
    case Op::kEq:
      return arg(0) == arg(1) ? 1 : 0;
    case Op::kLt:
      return arg(0) < arg(1) ? 1 : 0;
    case Op::kShl:
      return e.amount >= 64 ? 0 : (arg(0) << e.amount) & mask;
    case Op::kShr:
      return e.amount >= 64 ? 0 : arg(0) >> e.amount;
    case Op::kSlice:
      return (arg(0) >> e.lo) & mask;
    case Op::kMux:
      return arg(0) ? arg(1) : arg(2);
  }
  return 0;
}

std::vector<SignalValues> Simulate(const RtlDesign& design,
                                   const std::vector<SignalValues>& inputs,
                                   int frames) {
  if (!design.is_parsed()) {
    throw StimulusError("cannot simulate an unparsed design");
  }
  if (frames < 0 || static_cast<size_t>(frames) != inputs.size()) {
    throw StimulusError("trace has " + std::to_string(inputs.size()) +
                        " vectors but " + std::to_string(frames) +
                        " frames were requested");
  }
  SignalValues state;
  for (const Register& r : design.registers()) state[r.name] = 0;

  std::vector<SignalValues> trace;
  trace.reserve(frames);
  for (int f = 0; f < frames; ++f) {
    const SignalValues& vec = inputs[f];
    SignalValues values = state;
    size_t seen = 0;
    for (const Port& p : design.ports()) {
      if (p.direction != PortDirection::kInput) continue;
      auto it = vec.find(p.name);
      if (it == vec.end()) {
        throw StimulusError("frame " + std::to_string(f) +
                            ": no value for input '" + p.name + "'");
      }
      if ((it->second & ~WidthMask(p.width)) != 0) {
        throw StimulusError("frame " + std::to_string(f) + ": value " +
                            std::to_string(it->second) + " does not fit " +
                            std::to_string(p.width) + "-bit input '" +
                            p.name + "'");
      }
      values[p.name] = it->second;
      ++seen;
    }
    if (seen != vec.size()) {
      throw StimulusError("frame " + std::to_string(f) +
                          ": vector names a signal that is not an input");
    }
    for (size_t i : design.assign_order()) {
      const Assign& a = design.assigns()[i];
      values[a.target] = EvaluateExpr(*a.value, values);
    }
    SignalValues out;
    for (const Port& p : design.ports()) {
      if (p.direction == PortDirection::kOutput) out[p.name] = values[p.name];
    }
    trace.push_back(std::move(out));
    for (const Register& r : design.registers()) {
      state[r.name] = EvaluateExpr(*r.next, values);
    }
  }
  return trace;
}

}  // namespace rtlopt::rtl
