#ifndef RTLOPT_TRAJECTORY_TRAJECTORY_H_
#define RTLOPT_TRAJECTORY_TRAJECTORY_H_

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtlopt/common/error.h"
#include "rtlopt/common/taxonomy.h"
#include "rtlopt/eda/backend.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/scoring/scoring.h"
#include "rtlopt/timing/analysis.h"

namespace rtlopt::trajectory {

inline constexpr int kSchemaVersion = 1;
inline constexpr char kBaselineId[] = "d0";
inline constexpr double kDefaultConvergenceEpsilon = 1e-3;

enum class RunStatus { kRunning, kConverged, kBudgetExhausted, kFailed };
enum class ProposerKind { kSkillGuided, kLlm, kRule };
// kSkipped: the slot produced no new design (nothing applicable, or a
// duplicate of a sibling). kEvalError: the backend could not evaluate it.
enum class CandidateStatus { kEvaluated, kSkipped, kEvalError };

std::string_view RunStatusName(RunStatus s);
std::string_view ProposerKindName(ProposerKind k);
std::string_view CandidateStatusName(CandidateStatus s);

// "it<t>-c<i>".
std::string CandidateId(int iteration, int index);

struct Transformation {
  StrategyId strategy = StrategyId::kTreeRebalance;
  std::string description;
  timing::RtlRegion region;
};

// Layer 3: one analyzed critical path and what was done about it.
struct PathEvent {
  timing::BottleneckDiagnosis diagnosis;
  std::optional<Transformation> transformation;
  std::string outcome;
};

// Layer 2: one candidate of a group.
struct CandidateRecord {
  std::string id;
  int index = 0;
  std::string design_hash;  // empty for skipped slots
  ProposerKind proposer = ProposerKind::kRule;
  std::optional<StrategyId> strategy;
  std::optional<std::string> skill_id;
  CandidateStatus status = CandidateStatus::kEvaluated;
  std::optional<eda::EvalResult> eval;
  // Present only for SEC-passing, successfully evaluated candidates.
  std::optional<scoring::CandidateScore> score;
  std::optional<double> advantage;
  std::vector<PathEvent> path_events;
  std::string note;

  bool sec_pass() const;
};

// Layer 1: one iteration round.
struct IterationRecord {
  int index = 0;
  std::string parent_id;
  double parent_score = 0.0;
  std::vector<CandidateRecord> candidates;
  std::optional<scoring::GroupStats> group_stats;
  std::optional<std::string> selected;
  bool finalized = false;
};

struct RunState {
  int schema_version = kSchemaVersion;
  std::string run_id;
  std::string design_name;
  std::string baseline_design_hash;
  nlohmann::json config = nlohmann::json::object();
  int n_candidates = 0;
  eda::PpaMetrics baseline;
  std::vector<IterationRecord> iterations;
  RunStatus status = RunStatus::kRunning;
};

nlohmann::json ToJson(const RunState& state);
// Throws std::invalid_argument (or nlohmann::json exceptions) on schema
// violations.
RunState RunStateFromJson(const nlohmann::json& j);

// Content address of a design: ContentHash of its source text.
std::string DesignHash(const rtl::RtlDesign& design);

class TrajectoryError : public Error {
 public:
  using Error::Error;
};

// The run directory: state.json plus content-addressed designs/<hash>.rtl.
// Every mutation is persisted atomically before it returns. Thread-safe;
// appends from concurrent evaluators are serialized internally.
class TrajectoryStore {
 public:
  TrajectoryStore(std::filesystem::path dir, RunState initial);

  static RunState Load(const std::filesystem::path& dir);
  static std::filesystem::path StatePath(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }

  // Writes designs/<hash>.rtl (once) and returns the hash.
  std::string StoreDesign(const rtl::RtlDesign& design);
  std::filesystem::path DesignPath(const std::string& hash) const;

  // Appends an empty iteration and returns its index.
  int BeginIteration(const std::string& parent_id, double parent_score);
  // Candidates are kept ordered by index regardless of arrival order.
  void RecordCandidate(int iteration, CandidateRecord record);
  // `stats.advantages` follows the SEC-passing candidates in index order.
  void FinalizeIteration(int iteration, const scoring::GroupStats& stats,
                         const std::optional<std::string>& selected);
  void SetStatus(RunStatus status);

  RunState Snapshot() const;

 private:
  void PersistLocked();
  IterationRecord& OpenIteration(int iteration);

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  RunState state_;
};

// Best-so-far score after each iteration; the parent of iteration 0 is the
// initial incumbent.
std::vector<double> BestSoFar(const RunState& state);

// Last iteration t >= 1 at which the best-so-far score improved by at least
// `epsilon`: 0 for a flat run, K (the series length) when the final
// iteration still improves.
int ConvergenceSteps(const std::vector<double>& best_so_far, double epsilon);
int ConvergenceSteps(const RunState& state,
                     double epsilon = kDefaultConvergenceEpsilon);

// SEC-passing share of the candidates that reached the equivalence check.
double SecPassRate(const RunState& state);

}  // namespace rtlopt::trajectory

#endif  // RTLOPT_TRAJECTORY_TRAJECTORY_H_
