#include "rtlopt/cli/render.h"

#include <cstdio>
#include <stdexcept>

#include "rtlopt/common/canonical_json.h"
#include "rtlopt/common/taxonomy.h"

namespace rtlopt::cli {

using trajectory::CandidateRecord;
using trajectory::IterationRecord;
using trajectory::RunState;

namespace {

// Shortest readable form: -0.09, 20533, 1.02e-05.
std::string Num(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string Csv(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string Metrics(const eda::PpaMetrics& m) {
  return "wns " + Num(m.wns) + " tns " + Num(m.tns) + " area " + Num(m.area);
}

double Epsilon(const RunState& state) {
  return orchestrator::RunConfigFromJson(state.config).convergence_epsilon;
}

}  // namespace

std::string FormatDelta(double value, double pct) {
  if (pct == 0.0) pct = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", pct);
  std::string p = buf;
  if (p == "-0.0") p = "0.0";
  return Num(value) + " (" + p + "%)";
}

std::string RenderSummary(const orchestrator::RunResult& r, int iterations) {
  std::string s = "run " + r.run_id + ": " +
                  std::string(trajectory::RunStatusName(r.status)) +
                  " after " + std::to_string(iterations) + " iteration" +
                  (iterations == 1 ? "" : "s") + "\n";
  s += Pad("metric", 10) + Pad("baseline", 12) + "best\n";
  s += Pad("WNS (ns)", 10) + Pad(Num(r.baseline.wns), 12) +
       FormatDelta(r.best_metrics.wns, r.best_improvement.wns_pct) + "\n";
  s += Pad("TNS (ns)", 10) + Pad(Num(r.baseline.tns), 12) +
       FormatDelta(r.best_metrics.tns, r.best_improvement.tns_pct) + "\n";
  s += Pad("Area", 10) + Pad(Num(r.baseline.area), 12) +
       FormatDelta(r.best_metrics.area, r.best_improvement.area_pct) + "\n";
  char rate[32];
  std::snprintf(rate, sizeof(rate), "%.1f%%", 100.0 * r.sec_pass_rate);
  s += "best design " + r.best_design_id + ", score " + Num(r.best_score) +
       "; SEC pass rate " + rate + "; convergence steps " +
       std::to_string(r.convergence_steps) + "\n";
  return s;
}

std::string RenderRunOverview(const RunState& state) {
  std::string s = "run " + state.run_id + " (" + state.design_name + "), " +
                  std::string(trajectory::RunStatusName(state.status)) +
                  "\nbaseline " + Metrics(state.baseline) + "\n";
  if (state.iterations.empty()) return s + "no iterations\n";
  const std::vector<double> best = trajectory::BestSoFar(state);
  s += Pad("t", 4) + Pad("parent", 10) + Pad("selected", 10) +
       Pad("best_score", 12) + "sec_pass/evaluated\n";
  for (const IterationRecord& it : state.iterations) {
    int evaluated = 0;
    int passing = 0;
    for (const CandidateRecord& c : it.candidates) {
      if (c.status == trajectory::CandidateStatus::kEvaluated) ++evaluated;
      if (c.sec_pass()) ++passing;
    }
    s += Pad(std::to_string(it.index), 4) + Pad(it.parent_id, 10) +
         Pad(it.selected.value_or("-"), 10) +
         Pad(static_cast<size_t>(it.index) < best.size()
                 ? Num(best[it.index])
                 : "-",
             12) +
         std::to_string(passing) + "/" + std::to_string(evaluated) + "\n";
  }
  return s;
}

std::string RenderIteration(const RunState& state, int t) {
  const int n = static_cast<int>(state.iterations.size());
  if (t < 0 || t >= n) {
    throw std::out_of_range(
        "iteration " + std::to_string(t) + " is out of range; " +
        (n == 0 ? std::string("the run has no iterations")
                : "valid range is 0.." + std::to_string(n - 1)));
  }
  const IterationRecord& it = state.iterations[t];
  std::string s = "iteration " + std::to_string(t) + ": parent " +
                  it.parent_id + " (score " + Num(it.parent_score) +
                  "), selected " + it.selected.value_or("none (parent kept)") +
                  "\n";
  if (it.group_stats) {
    s += "group mean " + Num(it.group_stats->mean) + ", stddev " +
         Num(it.group_stats->stddev) + "\n";
  }
  for (const CandidateRecord& c : it.candidates) {
    s += "  " + c.id + "  " +
         std::string(trajectory::ProposerKindName(c.proposer)) + "  " +
         (c.strategy ? std::string(StrategyName(*c.strategy)) : "-") + "  " +
         std::string(trajectory::CandidateStatusName(c.status));
    if (c.eval && c.eval->ok()) {
      s += "  sec " + std::string(c.eval->sec_pass ? "pass" : "fail") + "  " +
           Metrics(*c.eval->metrics);
    }
    if (c.score) s += "  score " + Num(c.score->score);
    if (c.advantage) s += "  advantage " + Num(*c.advantage);
    s += "\n";
    if (c.skill_id) s += "    skill " + *c.skill_id + "\n";
    for (const trajectory::PathEvent& e : c.path_events) {
      const timing::BottleneckDiagnosis& d = e.diagnosis;
      s += "    path " + d.path.startpoint + " -> " + d.path.endpoint +
           " (slack " + Num(d.path.slack_ns) + " ns): " +
           std::string(PatternName(d.pattern)) + ", " +
           std::string(RootCauseName(d.root_cause)) + ", lines " +
           std::to_string(d.region.start_line) + "-" +
           std::to_string(d.region.end_line) + "\n";
      if (e.transformation) {
        s += "      transformation " +
             std::string(StrategyName(e.transformation->strategy)) + ": " +
             e.transformation->description + "\n";
      }
      s += "      outcome: " + e.outcome + "\n";
    }
    if (!c.note.empty()) s += "    note: " + c.note + "\n";
  }
  return s;
}

std::string RenderSkillTable(const skills::SkillLibrary& library) {
  std::string s = Pad("tier", 8) + Pad("skill", 48) + Pad("occurrences", 13) +
                  Pad("sec_pass", 10) + "mean_advantage\n";
  for (skills::Tier tier : {skills::Tier::kHigh, skills::Tier::kMedium,
                            skills::Tier::kLow, skills::Tier::kAvoid}) {
    for (const auto& [key, skill] : library.entries()) {
      if (skill.tier != tier) continue;
      s += Pad(std::string(skills::TierName(tier)), 8) +
           Pad(skill.id(), 48) +
           Pad(std::to_string(skill.occurrence_count), 13) +
           Pad(std::to_string(skill.sec_pass_count), 10) +
           Num(skill.mean_advantage) + "\n";
    }
  }
  return s;
}

std::string RenderReportCsv(const RunState& state) {
  std::string s = "t,best_wns,best_tns,best_area,best_score,sec_pass_rate_cum\n";
  for (const orchestrator::IterationPoint& p :
       orchestrator::IterationSeries(state)) {
    s += std::to_string(p.t) + "," + Csv(p.best.wns) + "," + Csv(p.best.tns) +
         "," + Csv(p.best.area) + "," + Csv(p.best_score) + "," +
         Csv(p.sec_pass_rate_cum) + "\n";
  }
  return s;
}

std::string RenderReportJson(const RunState& state) {
  nlohmann::json series = nlohmann::json::array();
  for (const orchestrator::IterationPoint& p :
       orchestrator::IterationSeries(state)) {
    series.push_back({{"t", p.t},
                      {"best_wns", p.best.wns},
                      {"best_tns", p.best.tns},
                      {"best_area", p.best.area},
                      {"best_score", p.best_score},
                      {"sec_pass_rate_cum", p.sec_pass_rate_cum}});
  }
  return CanonicalDump(
      {{"run", orchestrator::ToJson(
                   orchestrator::SummarizeRun(state, Epsilon(state)))},
       {"series", series}});
}

}  // namespace rtlopt::cli
