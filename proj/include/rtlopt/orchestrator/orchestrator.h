#ifndef RTLOPT_ORCHESTRATOR_ORCHESTRATOR_H_
#define RTLOPT_ORCHESTRATOR_ORCHESTRATOR_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtlopt/eda/backend.h"
#include "rtlopt/proposer/proposer.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/scoring/scoring.h"
#include "rtlopt/skills/skills.h"
#include "rtlopt/trajectory/trajectory.h"

namespace rtlopt::orchestrator {

inline constexpr int kDefaultIterations = 10;
inline constexpr int kDefaultTopK = 3;

// Everything one run depends on. Read from a single JSON file with the
// sections "run", "backend", "proposer" and "scoring".
struct RunConfig {
  int iterations = kDefaultIterations;
  int n_candidates = proposer::kDefaultCandidates;
  int top_k = kDefaultTopK;
  double convergence_epsilon = trajectory::kDefaultConvergenceEpsilon;
  uint64_t seed = 0;
  // Evaluations in flight at once; 0 means n_candidates.
  int concurrency = 0;
  // Stop before the budget is spent once no later iteration can change the
  // result.
  bool early_stop = false;
  // Distilled skills feed the proposer from the next iteration on. When
  // off, the run proposes from the library it started with; the library is
  // still updated for later runs.
  bool skill_feedback = true;
  scoring::ScoreWeights weights;
  eda::BackendConfig backend;
  proposer::ProposerConfig proposer;

  int effective_concurrency() const {
    return concurrency > 0 ? concurrency : n_candidates;
  }
  // Throws ConfigError.
  void Validate() const;
};

nlohmann::json ToJson(const RunConfig& c);
// Missing keys take their defaults; unknown keys, wrong types and invalid
// values are a ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Relative change against the baseline, in percent; negative slack changes
// are improvements.
struct Improvement {
  double wns_pct = 0.0;
  double tns_pct = 0.0;
  double area_pct = 0.0;
};

Improvement ImprovementOver(const eda::PpaMetrics& metrics,
                            const eda::PpaMetrics& baseline);

struct RunResult {
  std::string run_id;
  trajectory::RunStatus status = trajectory::RunStatus::kRunning;
  eda::PpaMetrics baseline;
  eda::PpaMetrics best_metrics;
  std::string best_design_id = trajectory::kBaselineId;
  double best_score = 0.0;
  Improvement best_improvement;
  // The incumbent after the last iteration.
  eda::PpaMetrics final_metrics;
  std::string final_design_id = trajectory::kBaselineId;
  Improvement final_improvement;
  double sec_pass_rate = 0.0;
  int convergence_steps = 0;
  std::vector<double> best_so_far;
};

nlohmann::json ToJson(const RunResult& r);
RunResult RunResultFromJson(const nlohmann::json& j);

// Recomputes the run metrics from a persisted trajectory alone.
RunResult SummarizeRun(const trajectory::RunState& state,
                       double convergence_epsilon);

// State of the run after iteration t.
struct IterationPoint {
  int t = 0;
  eda::PpaMetrics best;
  double best_score = 0.0;
  // SEC pass rate over iterations 0..t.
  double sec_pass_rate_cum = 0.0;
};

std::vector<IterationPoint> IterationSeries(const trajectory::RunState& state);

// The baseline could not be evaluated; the run is recorded as failed.
class BaselineError : public Error {
 public:
  using Error::Error;
};

std::unique_ptr<eda::EdaBackend> MakeBackend(
    const eda::BackendConfig& config, const std::filesystem::path& work_root);

// Evaluates `candidates` against `golden` with at most `limit` evaluations
// in flight. Result i belongs to candidate i whatever the completion order;
// a failing evaluation only affects its own result.
std::vector<eda::EvalResult> EvaluateGroup(
    const eda::EdaBackend& backend, const rtl::RtlDesign& golden,
    const std::vector<const rtl::RtlDesign*>& candidates, int limit);

// Run identifier derived from the inputs, so reruns of identical inputs
// share it and distillation counts them once.
std::string DeriveRunId(const rtl::RtlDesign& design, const RunConfig& config,
                        const skills::SkillLibrary& library);

struct RunOptions {
  std::filesystem::path run_dir;
  std::string run_id;  // empty: DeriveRunId
};

// The closed loop. Each iteration analyzes the incumbent, proposes a group,
// evaluates it against the original design, scores against the baseline
// and keeps the best SEC-passing candidate only when it beats the
// incumbent. Trajectory, library snapshot, result and timings are written
// under `options.run_dir`. `library` receives the distilled skills.
// Throws BaselineError when the original design cannot be evaluated.
RunResult Optimize(const rtl::RtlDesign& design, const RunConfig& config,
                   const RunOptions& options, skills::SkillLibrary& library,
                   const eda::EdaBackend& backend,
                   proposer::Proposer& proposer);

// Same, with the backend and proposer built from `config`.
RunResult Optimize(const rtl::RtlDesign& design, const RunConfig& config,
                   const RunOptions& options, skills::SkillLibrary& library);

}  // namespace rtlopt::orchestrator

#endif  // RTLOPT_ORCHESTRATOR_ORCHESTRATOR_H_
