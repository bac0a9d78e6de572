#include "rtlopt/trajectory/trajectory.h"

#include <algorithm>
#include <stdexcept>

#include "rtlopt/common/canonical_json.h"
#include "rtlopt/common/hash.h"

namespace rtlopt::trajectory {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view RunStatusName(RunStatus s) {
  switch (s) {
    case RunStatus::kRunning:
      return "running";
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kBudgetExhausted:
      return "budget-exhausted";
    case RunStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

std::string_view ProposerKindName(ProposerKind k) {
  switch (k) {
    case ProposerKind::kSkillGuided:
      return "skill-guided";
    case ProposerKind::kLlm:
      return "llm";
    case ProposerKind::kRule:
      return "rule";
  }
  return "unknown";
}

std::string_view CandidateStatusName(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::kEvaluated:
      return "evaluated";
    case CandidateStatus::kSkipped:
      return "skipped";
    case CandidateStatus::kEvalError:
      return "eval-error";
  }
  return "unknown";
}

namespace {

template <typename Enum, size_t N>
Enum ParseEnum(const json& j, const Enum (&values)[N],
               std::string_view (*name)(Enum), const char* what) {
  const std::string s = j.get<std::string>();
  for (Enum v : values) {
    if (name(v) == s) return v;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

constexpr RunStatus kRunStatuses[] = {RunStatus::kRunning, RunStatus::kConverged,
                                      RunStatus::kBudgetExhausted,
                                      RunStatus::kFailed};
constexpr ProposerKind kProposerKinds[] = {
    ProposerKind::kSkillGuided, ProposerKind::kLlm, ProposerKind::kRule};
constexpr CandidateStatus kCandidateStatuses[] = {
    CandidateStatus::kEvaluated, CandidateStatus::kSkipped,
    CandidateStatus::kEvalError};

template <typename T, typename F>
json Optional(const std::optional<T>& v, F to_json) {
  return v ? to_json(*v) : json(nullptr);
}

StrategyId StrategyFromJson(const json& j) {
  auto s = ParseStrategy(j.get<std::string>());
  if (!s) throw std::invalid_argument("unknown strategy");
  return *s;
}

json ToJson(const scoring::GroupStats& g) {
  return {{"mean", g.mean}, {"stddev", g.stddev}, {"advantages", g.advantages}};
}

scoring::GroupStats GroupStatsFromJson(const json& j) {
  scoring::GroupStats g;
  g.mean = j.at("mean").get<double>();
  g.stddev = j.at("stddev").get<double>();
  g.advantages = j.at("advantages").get<std::vector<double>>();
  return g;
}

json ToJson(const PathEvent& e) {
  json t = nullptr;
  if (e.transformation) {
    t = {{"strategy", StrategyName(e.transformation->strategy)},
         {"description", e.transformation->description},
         {"region", timing::ToJson(e.transformation->region)}};
  }
  return {{"diagnosis", timing::ToJson(e.diagnosis)},
          {"transformation", t},
          {"outcome", e.outcome}};
}

PathEvent PathEventFromJson(const json& j) {
  PathEvent e;
  e.diagnosis = timing::BottleneckDiagnosisFromJson(j.at("diagnosis"));
  const json& t = j.at("transformation");
  if (!t.is_null()) {
    Transformation tr;
    tr.strategy = StrategyFromJson(t.at("strategy"));
    tr.description = t.at("description").get<std::string>();
    tr.region = timing::RtlRegionFromJson(t.at("region"));
    e.transformation = tr;
  }
  e.outcome = j.at("outcome").get<std::string>();
  return e;
}

json ToJson(const CandidateRecord& c) {
  json events = json::array();
  for (const PathEvent& e : c.path_events) events.push_back(ToJson(e));
  return {
      {"id", c.id},
      {"index", c.index},
      {"design", c.design_hash},
      {"proposer", ProposerKindName(c.proposer)},
      {"strategy",
       Optional(c.strategy, [](StrategyId s) { return json(StrategyName(s)); })},
      {"skill_id", Optional(c.skill_id, [](const std::string& s) { return json(s); })},
      {"status", CandidateStatusName(c.status)},
      {"eval", Optional(c.eval, [](const eda::EvalResult& e) { return eda::ToJson(e); })},
      {"score", Optional(c.score, [](const scoring::CandidateScore& s) {
         return scoring::ToJson(s);
       })},
      {"advantage", Optional(c.advantage, [](double a) { return json(a); })},
      {"path_events", events},
      {"note", c.note}};
}

CandidateRecord CandidateRecordFromJson(const json& j) {
  CandidateRecord c;
  c.id = j.at("id").get<std::string>();
  c.index = j.at("index").get<int>();
  c.design_hash = j.at("design").get<std::string>();
  c.proposer = ParseEnum(j.at("proposer"), kProposerKinds, ProposerKindName,
                         "proposer kind");
  if (!j.at("strategy").is_null()) c.strategy = StrategyFromJson(j.at("strategy"));
  if (!j.at("skill_id").is_null()) c.skill_id = j.at("skill_id").get<std::string>();
  c.status = ParseEnum(j.at("status"), kCandidateStatuses, CandidateStatusName,
                       "candidate status");
  if (!j.at("eval").is_null()) c.eval = eda::EvalResultFromJson(j.at("eval"));
  if (!j.at("score").is_null()) {
    c.score = scoring::CandidateScoreFromJson(j.at("score"));
  }
  if (!j.at("advantage").is_null()) c.advantage = j.at("advantage").get<double>();
  for (const json& e : j.at("path_events")) {
    c.path_events.push_back(PathEventFromJson(e));
  }
  c.note = j.at("note").get<std::string>();
  return c;
}

json ToJson(const IterationRecord& it) {
  json candidates = json::array();
  for (const CandidateRecord& c : it.candidates) candidates.push_back(ToJson(c));
  return {{"index", it.index},
          {"parent", it.parent_id},
          {"parent_score", it.parent_score},
          {"candidates", candidates},
          {"group_stats", Optional(it.group_stats, [](const scoring::GroupStats& g) {
             return ToJson(g);
           })},
          {"selected",
           Optional(it.selected, [](const std::string& s) { return json(s); })},
          {"finalized", it.finalized}};
}

IterationRecord IterationRecordFromJson(const json& j) {
  IterationRecord it;
  it.index = j.at("index").get<int>();
  it.parent_id = j.at("parent").get<std::string>();
  it.parent_score = j.at("parent_score").get<double>();
  for (const json& c : j.at("candidates")) {
    it.candidates.push_back(CandidateRecordFromJson(c));
  }
  if (!j.at("group_stats").is_null()) {
    it.group_stats = GroupStatsFromJson(j.at("group_stats"));
  }
  if (!j.at("selected").is_null()) it.selected = j.at("selected").get<std::string>();
  it.finalized = j.at("finalized").get<bool>();
  return it;
}

}  // namespace

bool CandidateRecord::sec_pass() const {
  return eval.has_value() && eval->ok() && eval->sec_pass;
}

std::string CandidateId(int iteration, int index) {
  return "it" + std::to_string(iteration) + "-c" + std::to_string(index);
}

json ToJson(const RunState& state) {
  json iterations = json::array();
  for (const IterationRecord& it : state.iterations) {
    iterations.push_back(ToJson(it));
  }
  return {{"schema_version", state.schema_version},
          {"run_id", state.run_id},
          {"design_name", state.design_name},
          {"baseline_design", state.baseline_design_hash},
          {"config", state.config},
          {"n_candidates", state.n_candidates},
          {"baseline", eda::ToJson(state.baseline)},
          {"iterations", iterations},
          {"status", RunStatusName(state.status)}};
}

RunState RunStateFromJson(const json& j) {
  RunState s;
  s.schema_version = j.at("schema_version").get<int>();
  if (s.schema_version != kSchemaVersion) {
    throw std::invalid_argument("unsupported state schema version " +
                                std::to_string(s.schema_version));
  }
  s.run_id = j.at("run_id").get<std::string>();
  s.design_name = j.at("design_name").get<std::string>();
  s.baseline_design_hash = j.at("baseline_design").get<std::string>();
  s.config = j.at("config");
  s.n_candidates = j.at("n_candidates").get<int>();
  s.baseline = eda::PpaMetricsFromJson(j.at("baseline"));
  for (const json& it : j.at("iterations")) {
    s.iterations.push_back(IterationRecordFromJson(it));
  }
  for (size_t t = 0; t < s.iterations.size(); ++t) {
    if (s.iterations[t].index != static_cast<int>(t)) {
      throw std::invalid_argument("iterations are not indexed contiguously");
    }
  }
  s.status = ParseEnum(j.at("status"), kRunStatuses, RunStatusName, "run status");
  return s;
}

TrajectoryStore::TrajectoryStore(fs::path dir, RunState initial)
    : dir_(std::move(dir)), state_(std::move(initial)) {
  fs::create_directories(dir_ / "designs");
  std::lock_guard<std::mutex> lock(mu_);
  PersistLocked();
}

fs::path TrajectoryStore::StatePath(const fs::path& dir) {
  return dir / "state.json";
}

RunState TrajectoryStore::Load(const fs::path& dir) {
  return RunStateFromJson(json::parse(ReadFile(StatePath(dir))));
}

fs::path TrajectoryStore::DesignPath(const std::string& hash) const {
  return dir_ / "designs" / (hash + ".rtl");
}

std::string DesignHash(const rtl::RtlDesign& design) {
  return ContentHash(design.source());
}

std::string TrajectoryStore::StoreDesign(const rtl::RtlDesign& design) {
  std::string hash = DesignHash(design);
  fs::path p = DesignPath(hash);
  std::lock_guard<std::mutex> lock(mu_);
  if (!fs::exists(p)) WriteFileAtomic(p, design.source());
  return hash;
}

void TrajectoryStore::PersistLocked() {
  WriteFileAtomic(StatePath(dir_), CanonicalDump(ToJson(state_)));
}

IterationRecord& TrajectoryStore::OpenIteration(int iteration) {
  if (iteration < 0 || iteration >= static_cast<int>(state_.iterations.size())) {
    throw TrajectoryError("no iteration " + std::to_string(iteration));
  }
  IterationRecord& it = state_.iterations[iteration];
  if (it.finalized) {
    throw TrajectoryError("iteration " + std::to_string(iteration) +
                          " is already finalized");
  }
  return it;
}

int TrajectoryStore::BeginIteration(const std::string& parent_id,
                                    double parent_score) {
  std::lock_guard<std::mutex> lock(mu_);
  if (state_.status != RunStatus::kRunning) {
    throw TrajectoryError(std::string("run is ") +
                          std::string(RunStatusName(state_.status)));
  }
  IterationRecord it;
  it.index = static_cast<int>(state_.iterations.size());
  it.parent_id = parent_id;
  it.parent_score = parent_score;
  state_.iterations.push_back(std::move(it));
  PersistLocked();
  return state_.iterations.back().index;
}

void TrajectoryStore::RecordCandidate(int iteration, CandidateRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  IterationRecord& it = OpenIteration(iteration);
  if (static_cast<int>(it.candidates.size()) >= state_.n_candidates) {
    throw TrajectoryError("candidate group of iteration " +
                          std::to_string(iteration) + " is full");
  }
  for (const CandidateRecord& c : it.candidates) {
    if (c.id == record.id || c.index == record.index) {
      throw TrajectoryError("duplicate candidate " + record.id);
    }
  }
  auto pos = std::lower_bound(
      it.candidates.begin(), it.candidates.end(), record.index,
      [](const CandidateRecord& c, int index) { return c.index < index; });
  it.candidates.insert(pos, std::move(record));
  PersistLocked();
}

void TrajectoryStore::FinalizeIteration(int iteration,
                                        const scoring::GroupStats& stats,
                                        const std::optional<std::string>& selected) {
  std::lock_guard<std::mutex> lock(mu_);
  IterationRecord& it = OpenIteration(iteration);
  if (static_cast<int>(it.candidates.size()) != state_.n_candidates) {
    throw TrajectoryError("iteration " + std::to_string(iteration) + " has " +
                          std::to_string(it.candidates.size()) + " of " +
                          std::to_string(state_.n_candidates) + " candidates");
  }
  std::vector<CandidateRecord*> passing;
  for (CandidateRecord& c : it.candidates) {
    if (c.sec_pass() && c.score) passing.push_back(&c);
  }
  if (stats.advantages.size() != passing.size()) {
    throw TrajectoryError("group statistics cover " +
                          std::to_string(stats.advantages.size()) +
                          " candidates, expected " + std::to_string(passing.size()));
  }
  if (selected) {
    auto c = std::find_if(it.candidates.begin(), it.candidates.end(),
                          [&](const CandidateRecord& r) { return r.id == *selected; });
    if (c == it.candidates.end() || !c->sec_pass()) {
      throw TrajectoryError("selected candidate " + *selected +
                            " is not a SEC-passing member of the group");
    }
  }
  for (size_t i = 0; i < passing.size(); ++i) {
    passing[i]->advantage = stats.advantages[i];
  }
  it.group_stats = stats;
  it.selected = selected;
  it.finalized = true;
  PersistLocked();
}

void TrajectoryStore::SetStatus(RunStatus status) {
  std::lock_guard<std::mutex> lock(mu_);
  state_.status = status;
  PersistLocked();
}

RunState TrajectoryStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return state_;
}

std::vector<double> BestSoFar(const RunState& state) {
  std::vector<double> out;
  if (state.iterations.empty()) return out;
  double best = state.iterations[0].parent_score;
  for (const IterationRecord& it : state.iterations) {
    if (it.selected) {
      for (const CandidateRecord& c : it.candidates) {
        if (c.id == *it.selected && c.score) best = std::min(best, c.score->score);
      }
    }
    out.push_back(best);
  }
  return out;
}

int ConvergenceSteps(const std::vector<double>& best_so_far, double epsilon) {
  const int k = static_cast<int>(best_so_far.size());
  int last = 0;
  for (int t = 1; t < k; ++t) {
    if (best_so_far[t - 1] - best_so_far[t] >= epsilon) last = t;
  }
  if (last > 0 && last == k - 1) return k;
  return last;
}

int ConvergenceSteps(const RunState& state, double epsilon) {
  return ConvergenceSteps(BestSoFar(state), epsilon);
}

double SecPassRate(const RunState& state) {
  int checked = 0;
  int passed = 0;
  for (const IterationRecord& it : state.iterations) {
    for (const CandidateRecord& c : it.candidates) {
      if (c.status != CandidateStatus::kEvaluated || !c.eval || !c.eval->ok()) {
        continue;
      }
      ++checked;
      if (c.eval->sec_pass) ++passed;
    }
  }
  return checked == 0 ? 0.0 : static_cast<double>(passed) / checked;
}

}  // namespace rtlopt::trajectory
