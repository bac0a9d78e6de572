#include "rtlopt/common/taxonomy.h"

namespace rtlopt {

std::string_view PatternName(PatternId p) {
  switch (p) {
    case PatternId::kDeepDecodeFsm:
      return "deep-decode-fsm";
    case PatternId::kHighFanoutControl:
      return "high-fanout-control";
    case PatternId::kWideComparison:
      return "wide-comparison";
    case PatternId::kMuxHeavySelection:
      return "mux-heavy-selection";
    case PatternId::kWideArithmetic:
      return "wide-arithmetic";
    case PatternId::kControlDataCoupling:
      return "control-data-coupling";
    case PatternId::kReconvergentLogic:
      return "reconvergent-logic";
    case PatternId::kExcessiveDepth:
      return "excessive-depth";
  }
  return "unknown";
}

std::string_view StrategyName(StrategyId s) {
  switch (s) {
    case StrategyId::kConditionPrecompute:
      return "condition-precompute";
    case StrategyId::kSignalReplication:
      return "signal-replication";
    case StrategyId::kSelectiveRegisterInsertion:
      return "selective-register-insertion";
    case StrategyId::kTreeRebalance:
      return "tree-rebalance";
    case StrategyId::kCommonSubexpressionExtraction:
      return "common-subexpression-extraction";
    case StrategyId::kMuxRestructure:
      return "mux-restructure";
    case StrategyId::kDecomposition:
      return "decomposition";
    case StrategyId::kConstantFold:
      return "constant-fold";
  }
  return "unknown";
}

std::string_view RootCauseName(RootCause r) {
  switch (r) {
    case RootCause::kExcessiveDepth:
      return "excessive-depth";
    case RootCause::kHighFanout:
      return "high-fanout";
    case RootCause::kControlDataCoupling:
      return "control-data-coupling";
    case RootCause::kReconvergent:
      return "reconvergent";
    case RootCause::kWideArithmetic:
      return "wide-arithmetic";
    case RootCause::kWideCompare:
      return "wide-compare";
    case RootCause::kMuxCascade:
      return "mux-cascade";
  }
  return "unknown";
}

std::optional<PatternId> ParsePattern(std::string_view name) {
  for (PatternId p : kAllPatterns) {
    if (PatternName(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<StrategyId> ParseStrategy(std::string_view name) {
  for (StrategyId s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<RootCause> ParseRootCause(std::string_view name) {
  for (RootCause r : kAllRootCauses) {
    if (RootCauseName(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view StrategyTemplate(StrategyId s) {
  switch (s) {
    case StrategyId::kConditionPrecompute:
      return "Hoist the comparison that selects a mux into a named 1-bit wire "
             "and reuse it at every select site.";
    case StrategyId::kSignalReplication:
      return "Duplicate the driver of a high-fanout wire and split its sinks "
             "between the original and the copy.";
    case StrategyId::kSelectiveRegisterInsertion:
      return "Duplicate an existing register with the same next-state logic "
             "and split its readers; never add a pipeline stage.";
    case StrategyId::kTreeRebalance:
      return "Reassociate a linear chain of one associative operator into a "
             "balanced tree of logarithmic depth.";
    case StrategyId::kCommonSubexpressionExtraction:
      return "Factor a repeated subexpression into a fresh wire and reference "
             "it from every use.";
    case StrategyId::kMuxRestructure:
      return "Turn a priority if-else mux chain into a balanced selection tree "
             "steered by OR-ed conditions, keeping priority order.";
    case StrategyId::kDecomposition:
      return "Split a wide assignment into staged intermediate wires without "
             "adding registers.";
    case StrategyId::kConstantFold:
      return "Evaluate constant subexpressions and drop identity or "
             "annihilator operands.";
  }
  return "";
}

}  // namespace rtlopt
