#ifndef RTLOPT_RTL_SIMULATE_H_
#define RTLOPT_RTL_SIMULATE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rtlopt/rtl/ast.h"

namespace rtlopt::rtl {

// Signal name -> value. Values are unsigned and fit the signal width.
using SignalValues = std::map<std::string, uint64_t>;

// Cycle-accurate reference simulation. Registers start at zero; each frame
// evaluates the combinational logic, samples the outputs, then loads every
// register from its next-state expression. Returns one output vector per
// frame. Throws StimulusError when the trace length differs from `frames`,
// an input is missing or unknown, or a value does not fit its port.
std::vector<SignalValues> Simulate(const RtlDesign& design,
                                   const std::vector<SignalValues>& inputs,
                                   int frames);

// Evaluates one expression against fully populated signal values.
uint64_t EvaluateExpr(const Expr& e, const SignalValues& values);

}  // namespace rtlopt::rtl

#endif  // RTLOPT_RTL_SIMULATE_H_
