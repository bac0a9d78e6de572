#ifndef RTLOPT_CLI_RENDER_H_
#define RTLOPT_CLI_RENDER_H_

#include <optional>
#include <string>

#include "rtlopt/orchestrator/orchestrator.h"
#include "rtlopt/skills/skills.h"
#include "rtlopt/trajectory/trajectory.h"

namespace rtlopt::cli {

// A metric with its relative change: "-0.09 (-66.7%)".
std::string FormatDelta(double value, double pct);

// Baseline against best WNS, TNS and area, plus the run metrics.
std::string RenderSummary(const orchestrator::RunResult& result,
                          int iterations);

// One line per iteration.
std::string RenderRunOverview(const trajectory::RunState& state);
// The candidates of iteration `t` with their path events. Throws
// std::out_of_range naming the valid range.
std::string RenderIteration(const trajectory::RunState& state, int t);

// Entries grouped by tier, best tier first.
std::string RenderSkillTable(const skills::SkillLibrary& library);

// Columns: t, best_wns, best_tns, best_area, best_score, sec_pass_rate_cum.
std::string RenderReportCsv(const trajectory::RunState& state);
std::string RenderReportJson(const trajectory::RunState& state);

}  // namespace rtlopt::cli

#endif  // RTLOPT_CLI_RENDER_H_
