#ifndef RTLOPT_COMMON_TAXONOMY_H_
#define RTLOPT_COMMON_TAXONOMY_H_

#include <array>
#include <optional>
#include <string_view>

namespace rtlopt {

// Recurring structural timing bottlenecks. Closed set.
enum class PatternId {
  kDeepDecodeFsm,
  kHighFanoutControl,
  kWideComparison,
  kMuxHeavySelection,
  kWideArithmetic,
  kControlDataCoupling,
  kReconvergentLogic,
  kExcessiveDepth,
};

// Transformation principles that relieve a pattern. Closed set; every entry
// has a rewrite in the proposer's catalog.
enum class StrategyId {
  kConditionPrecompute,
  kSignalReplication,
  kSelectiveRegisterInsertion,
  kTreeRebalance,
  kCommonSubexpressionExtraction,
  kMuxRestructure,
  kDecomposition,
  kConstantFold,
};

// Root-cause labels produced by the timing-analysis agent.
enum class RootCause {
  kExcessiveDepth,
  kHighFanout,
  kControlDataCoupling,
  kReconvergent,
  kWideArithmetic,
  kWideCompare,
  kMuxCascade,
};

inline constexpr std::array<PatternId, 8> kAllPatterns = {
    PatternId::kDeepDecodeFsm,       PatternId::kHighFanoutControl,
    PatternId::kWideComparison,      PatternId::kMuxHeavySelection,
    PatternId::kWideArithmetic,      PatternId::kControlDataCoupling,
    PatternId::kReconvergentLogic,   PatternId::kExcessiveDepth,
};

// Catalog order; also the default exploratory order.
inline constexpr std::array<StrategyId, 8> kAllStrategies = {
    StrategyId::kTreeRebalance,
    StrategyId::kMuxRestructure,
    StrategyId::kConditionPrecompute,
    StrategyId::kCommonSubexpressionExtraction,
    StrategyId::kConstantFold,
    StrategyId::kSignalReplication,
    StrategyId::kSelectiveRegisterInsertion,
    StrategyId::kDecomposition,
};

inline constexpr std::array<RootCause, 7> kAllRootCauses = {
    RootCause::kExcessiveDepth, RootCause::kHighFanout,
    RootCause::kControlDataCoupling, RootCause::kReconvergent,
    RootCause::kWideArithmetic, RootCause::kWideCompare,
    RootCause::kMuxCascade,
};

std::string_view PatternName(PatternId p);
std::string_view StrategyName(StrategyId s);
std::string_view RootCauseName(RootCause r);

std::optional<PatternId> ParsePattern(std::string_view name);
std::optional<StrategyId> ParseStrategy(std::string_view name);
std::optional<RootCause> ParseRootCause(std::string_view name);

// Implementation recipe stored alongside a learned skill.
std::string_view StrategyTemplate(StrategyId s);

}  // namespace rtlopt

#endif  // RTLOPT_COMMON_TAXONOMY_H_
