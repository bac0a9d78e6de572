#ifndef RTLOPT_TIMING_ANALYSIS_H_
#define RTLOPT_TIMING_ANALYSIS_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rtlopt/common/taxonomy.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/timing/timing_report.h"

namespace rtlopt::timing {

inline constexpr int kDefaultCriticalPaths = 3;

// Thresholds of the root-cause rules.
inline constexpr int kWideArithmeticBits = 16;
inline constexpr int kCompareChainLength = 3;
inline constexpr int kMuxCascadeLength = 3;
inline constexpr int kHighFanout = 8;
inline constexpr int kCouplingDataBits = 8;
inline constexpr int kDeepPathStages = 6;

// The `k` worst endpoints, slack ascending, ties by endpoint name. Throws
// std::invalid_argument when k < 1.
std::vector<TimingPath> SelectCriticalPaths(const TimingReport& report, int k);

enum class RegionConfidence { kExact, kHeuristic, kHeuristicFailed };

std::string_view RegionConfidenceName(RegionConfidence c);

// Inclusive line span of a source file.
struct RtlRegion {
  std::string file;
  int start_line = 1;
  int end_line = 1;
  RegionConfidence confidence = RegionConfidence::kExact;

  friend bool operator==(const RtlRegion&, const RtlRegion&) = default;
};

// Source lines covered by `path`. Paths with stage locations map exactly;
// name-only paths from external tools are matched against the source text
// by signal name.
RtlRegion MapPathToRtl(const TimingPath& path, const rtl::RtlDesign& design);

// Removes synthesis decorations from a netlist name: trailing bit selects,
// then "_reg" and "_q" suffixes. "state_reg[2]" -> "state".
std::string StripSynthesisSuffixes(std::string_view name);

enum class Severity { kNormal, kLow };

struct BottleneckDiagnosis {
  TimingPath path;
  PatternId pattern = PatternId::kExcessiveDepth;
  RootCause root_cause = RootCause::kExcessiveDepth;
  Severity severity = Severity::kNormal;
  RtlRegion region;
  std::string evidence;
};

// Labels the structural cause of one critical path. Rules are tried in a
// fixed priority order; the first that fires wins. Deterministic and pure.
BottleneckDiagnosis Diagnose(const TimingPath& path,
                             const rtl::RtlDesign& design);

nlohmann::json ToJson(const RtlRegion& region);
nlohmann::json ToJson(const BottleneckDiagnosis& diagnosis);
// Throw std::invalid_argument on schema violations.
RtlRegion RtlRegionFromJson(const nlohmann::json& j);
BottleneckDiagnosis BottleneckDiagnosisFromJson(const nlohmann::json& j);

}  // namespace rtlopt::timing

#endif  // RTLOPT_TIMING_ANALYSIS_H_
