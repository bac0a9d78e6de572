#include "rtlopt/orchestrator/orchestrator.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "rtlopt/common/canonical_json.h"
#include "rtlopt/common/hash.h"
#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/eda/external_backend.h"
#include "rtlopt/rtl/parser.h"
#include "rtlopt/timing/analysis.h"

namespace rtlopt::orchestrator {

using nlohmann::json;
using trajectory::CandidateRecord;
using trajectory::CandidateStatus;
using trajectory::RunState;
using trajectory::RunStatus;

void RunConfig::Validate() const {
  if (iterations < 1) throw ConfigError("run.iterations must be >= 1");
  if (n_candidates < 1) throw ConfigError("run.n_candidates must be >= 1");
  if (top_k < 1) throw ConfigError("run.top_k must be >= 1");
  if (!(convergence_epsilon >= 0)) {
    throw ConfigError("run.convergence_epsilon must be >= 0");
  }
  if (concurrency < 0) throw ConfigError("run.concurrency must be >= 0");
  weights.Validate();
  backend.Validate();
  proposer.Validate();
  if (proposer.n_candidates != n_candidates) {
    throw ConfigError("proposer candidate count differs from run.n_candidates");
  }
}

json ToJson(const RunConfig& c) {
  return {{"run",
           {{"iterations", c.iterations},
            {"n_candidates", c.n_candidates},
            {"top_k", c.top_k},
            {"convergence_epsilon", c.convergence_epsilon},
            {"seed", c.seed},
            {"concurrency", c.concurrency},
            {"early_stop", c.early_stop},
            {"skill_feedback", c.skill_feedback}}},
          {"backend", ToJson(c.backend)},
          {"proposer", ToJson(c.proposer)},
          {"scoring", scoring::ToJson(c.weights)}};
}

namespace {

void ReadRunSection(const json& j, RunConfig& c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "iterations") {
      c.iterations = value.get<int>();
    } else if (key == "n_candidates") {
      c.n_candidates = value.get<int>();
    } else if (key == "top_k") {
      c.top_k = value.get<int>();
    } else if (key == "convergence_epsilon") {
      c.convergence_epsilon = value.get<double>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) {
        throw ConfigError("run.seed must be a non-negative integer");
      }
      c.seed = value.get<uint64_t>();
    } else if (key == "concurrency") {
      c.concurrency = value.get<int>();
    } else if (key == "early_stop") {
      c.early_stop = value.get<bool>();
    } else if (key == "skill_feedback") {
      c.skill_feedback = value.get<bool>();
    } else {
      throw ConfigError("unknown key run." + key);
    }
  }
}

}  // namespace

RunConfig RunConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (!value.is_object()) {
        throw ConfigError("config section " + key + " must be an object");
      }
      if (key == "run") {
        ReadRunSection(value, c);
      } else if (key == "backend") {
        c.backend = eda::BackendConfigFromJson(value);
      } else if (key == "proposer") {
        c.proposer = proposer::ProposerConfigFromJson(value);
      } else if (key == "scoring") {
        c.weights = scoring::ScoreWeightsFromJson(value);
      } else {
        throw ConfigError("unknown config section " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.proposer.n_candidates = c.n_candidates;
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return RunConfigFromJson(j);
}

Improvement ImprovementOver(const eda::PpaMetrics& metrics,
                            const eda::PpaMetrics& baseline) {
  return {100.0 * scoring::Normalize(metrics.wns, baseline.wns),
          100.0 * scoring::Normalize(metrics.tns, baseline.tns),
          100.0 * scoring::Normalize(metrics.area, baseline.area)};
}

namespace {

json ToJson(const Improvement& i) {
  return {{"wns_pct", i.wns_pct},
          {"tns_pct", i.tns_pct},
          {"area_pct", i.area_pct}};
}

Improvement ImprovementFromJson(const json& j) {
  return {j.at("wns_pct").get<double>(), j.at("tns_pct").get<double>(),
          j.at("area_pct").get<double>()};
}

RunStatus ParseRunStatus(const std::string& name) {
  for (RunStatus s : {RunStatus::kRunning, RunStatus::kConverged,
                      RunStatus::kBudgetExhausted, RunStatus::kFailed}) {
    if (trajectory::RunStatusName(s) == name) return s;
  }
  throw std::invalid_argument("unknown run status " + name);
}

}  // namespace

json ToJson(const RunResult& r) {
  return {{"run_id", r.run_id},
          {"status", trajectory::RunStatusName(r.status)},
          {"baseline", eda::ToJson(r.baseline)},
          {"best_metrics", eda::ToJson(r.best_metrics)},
          {"best_design_id", r.best_design_id},
          {"best_score", r.best_score},
          {"best_improvement", ToJson(r.best_improvement)},
          {"final_metrics", eda::ToJson(r.final_metrics)},
          {"final_design_id", r.final_design_id},
          {"final_improvement", ToJson(r.final_improvement)},
          {"sec_pass_rate", r.sec_pass_rate},
          {"convergence_steps", r.convergence_steps},
          {"best_so_far", r.best_so_far}};
}

RunResult RunResultFromJson(const json& j) {
  RunResult r;
  r.run_id = j.at("run_id").get<std::string>();
  r.status = ParseRunStatus(j.at("status").get<std::string>());
  r.baseline = eda::PpaMetricsFromJson(j.at("baseline"));
  r.best_metrics = eda::PpaMetricsFromJson(j.at("best_metrics"));
  r.best_design_id = j.at("best_design_id").get<std::string>();
  r.best_score = j.at("best_score").get<double>();
  r.best_improvement = ImprovementFromJson(j.at("best_improvement"));
  r.final_metrics = eda::PpaMetricsFromJson(j.at("final_metrics"));
  r.final_design_id = j.at("final_design_id").get<std::string>();
  r.final_improvement = ImprovementFromJson(j.at("final_improvement"));
  r.sec_pass_rate = j.at("sec_pass_rate").get<double>();
  r.convergence_steps = j.at("convergence_steps").get<int>();
  r.best_so_far = j.at("best_so_far").get<std::vector<double>>();
  return r;
}

RunResult SummarizeRun(const RunState& state, double convergence_epsilon) {
  RunResult r;
  r.run_id = state.run_id;
  r.status = state.status;
  r.baseline = state.baseline;
  r.best_metrics = state.baseline;
  r.final_metrics = state.baseline;
  for (const trajectory::IterationRecord& it : state.iterations) {
    if (!it.selected) continue;
    for (const CandidateRecord& c : it.candidates) {
      if (c.id != *it.selected) continue;
      r.final_metrics = *c.eval->metrics;
      r.final_design_id = c.id;
      if (c.score->score < r.best_score) {
        r.best_score = c.score->score;
        r.best_metrics = *c.eval->metrics;
        r.best_design_id = c.id;
      }
    }
  }
  r.best_improvement = ImprovementOver(r.best_metrics, r.baseline);
  r.final_improvement = ImprovementOver(r.final_metrics, r.baseline);
  r.sec_pass_rate = trajectory::SecPassRate(state);
  r.best_so_far = trajectory::BestSoFar(state);
  r.convergence_steps =
      trajectory::ConvergenceSteps(r.best_so_far, convergence_epsilon);
  return r;
}

std::vector<IterationPoint> IterationSeries(const RunState& state) {
  std::vector<IterationPoint> series;
  IterationPoint point;
  point.best = state.baseline;
  int passing = 0;
  int reached = 0;
  for (const trajectory::IterationRecord& it : state.iterations) {
    for (const CandidateRecord& c : it.candidates) {
      if (c.status != CandidateStatus::kEvaluated) continue;
      ++reached;
      if (c.sec_pass()) ++passing;
      if (it.selected == c.id && c.score->score < point.best_score) {
        point.best = *c.eval->metrics;
        point.best_score = c.score->score;
      }
    }
    point.t = it.index;
    point.sec_pass_rate_cum =
        reached == 0 ? 0.0 : static_cast<double>(passing) / reached;
    series.push_back(point);
  }
  return series;
}

std::unique_ptr<eda::EdaBackend> MakeBackend(
    const eda::BackendConfig& config, const std::filesystem::path& work_root) {
  config.Validate();
  if (config.kind == eda::BackendKind::kBuiltin) {
    return std::make_unique<eda::BuiltinBackend>(config.clock_ns);
  }
  return std::make_unique<eda::ExternalBackend>(config.external,
                                                config.clock_ns, work_root);
}

std::vector<eda::EvalResult> EvaluateGroup(
    const eda::EdaBackend& backend, const rtl::RtlDesign& golden,
    const std::vector<const rtl::RtlDesign*>& candidates, int limit) {
  std::vector<eda::EvalResult> results(candidates.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < candidates.size(); i = next++) {
      results[i] = backend.Evaluate(&golden, *candidates[i]);
    }
  };
  const size_t n_threads =
      std::min(candidates.size(), static_cast<size_t>(std::max(limit, 1)));
  std::vector<std::thread> threads;
  for (size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  return results;
}

std::string DeriveRunId(const rtl::RtlDesign& design, const RunConfig& config,
                        const skills::SkillLibrary& library) {
  const std::string key = rtl::Print(design) + "\n" +
                          CanonicalDump(ToJson(config)) +
                          CanonicalDump(library.ToJson());
  return design.name() + "-" + ContentHash(key).substr(0, 8);
}

namespace {

// Independent per-iteration seeds (SplitMix64 finalizer).
uint64_t IterationSeed(uint64_t seed, int t) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(t + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string FormatNs(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string Outcome(const CandidateRecord& c, const eda::PpaMetrics& parent) {
  switch (c.status) {
    case CandidateStatus::kSkipped:
      return "skipped";
    case CandidateStatus::kEvalError:
      return "evaluation error: " + c.eval->error;
    case CandidateStatus::kEvaluated:
      break;
  }
  if (!c.eval->sec_pass) {
    return "not equivalent to the original design" +
           (c.eval->note.empty() ? "" : ": " + c.eval->note);
  }
  const eda::PpaMetrics& m = *c.eval->metrics;
  return "equivalent; wns " + FormatNs(parent.wns) + " -> " +
         FormatNs(m.wns) + " ns, area " + FormatNs(parent.area) + " -> " +
         FormatNs(m.area);
}

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

}  // namespace

RunResult Optimize(const rtl::RtlDesign& design, const RunConfig& config,
                   const RunOptions& options, skills::SkillLibrary& library,
                   const eda::EdaBackend& backend,
                   proposer::Proposer& proposer) {
  config.Validate();
  const Clock::time_point run_start = Clock::now();
  const std::filesystem::path& dir = options.run_dir;
  std::filesystem::create_directories(dir);

  RunState initial;
  initial.run_id = options.run_id.empty()
                       ? DeriveRunId(design, config, library)
                       : options.run_id;
  initial.design_name = design.name();
  initial.config = ToJson(config);
  initial.n_candidates = config.n_candidates;
  initial.baseline_design_hash = trajectory::DesignHash(design);

  const eda::EvalResult baseline = backend.Evaluate(nullptr, design);
  if (!baseline.ok()) {
    initial.status = RunStatus::kFailed;
    trajectory::TrajectoryStore failed(dir, initial);
    failed.StoreDesign(design);
    throw BaselineError("baseline evaluation failed: " + baseline.error);
  }
  initial.baseline = *baseline.metrics;
  trajectory::TrajectoryStore store(dir, initial);
  store.StoreDesign(design);

  // With feedback off the proposer keeps seeing the starting library.
  const skills::SkillLibrary frozen = library;
  const skills::SkillLibrary& proposal_library =
      config.skill_feedback ? library : frozen;
  const std::filesystem::path transcript_dir = dir / "llm";

  rtl::RtlDesign parent = design;
  std::string parent_id = trajectory::kBaselineId;
  double parent_score =
      scoring::Score(*baseline.metrics, *baseline.metrics, config.weights).score;
  eda::EvalResult parent_eval = baseline;

  json timings = {{"baseline_s", baseline.wall_time_s},
                  {"iterations", json::array()}};
  RunStatus status = RunStatus::kBudgetExhausted;

  for (int t = 0; t < config.iterations; ++t) {
    const Clock::time_point it_start = Clock::now();
    const int index = store.BeginIteration(parent_id, parent_score);

    std::vector<timing::BottleneckDiagnosis> diagnoses;
    if (!parent_eval.timing_report.endpoints.empty()) {
      for (const timing::TimingPath& p : timing::SelectCriticalPaths(
               parent_eval.timing_report, config.top_k)) {
        diagnoses.push_back(timing::Diagnose(p, parent));
      }
    }

    proposer::GroupRequest request;
    request.parent = &parent;
    request.diagnoses = diagnoses;
    request.library = &proposal_library;
    request.seed = IterationSeed(config.seed, t);
    request.transcript_dir = transcript_dir;
    request.tag = "it" + std::to_string(t);
    if (config.proposer.llm.configured()) {
      std::filesystem::create_directories(transcript_dir);
    }
    const Clock::time_point propose_start = Clock::now();
    std::vector<proposer::Proposal> proposals = proposer.ProposeGroup(request);
    const double propose_s = Seconds(propose_start);
    proposals.resize(config.n_candidates);

    std::vector<const rtl::RtlDesign*> designs;
    std::vector<size_t> slot_of;
    for (size_t i = 0; i < proposals.size(); ++i) {
      if (proposals[i].skipped()) continue;
      designs.push_back(&*proposals[i].design);
      slot_of.push_back(i);
    }
    // Always against the original design: equivalence is not assumed to
    // carry over from one incumbent to the next.
    std::vector<eda::EvalResult> evals = EvaluateGroup(
        backend, design, designs, config.effective_concurrency());

    std::vector<CandidateRecord> records(proposals.size());
    for (size_t i = 0; i < proposals.size(); ++i) {
      CandidateRecord& c = records[i];
      c.id = trajectory::CandidateId(index, static_cast<int>(i));
      c.index = static_cast<int>(i);
      c.proposer = proposals[i].kind;
      c.strategy = proposals[i].strategy;
      c.skill_id = proposals[i].skill_id;
      c.status = CandidateStatus::kSkipped;
      c.note = proposals[i].rationale;
    }
    json candidate_times = json::array();
    for (size_t k = 0; k < designs.size(); ++k) {
      CandidateRecord& c = records[slot_of[k]];
      c.design_hash = store.StoreDesign(*designs[k]);
      c.eval = std::move(evals[k]);
      c.status = c.eval->ok() ? CandidateStatus::kEvaluated
                              : CandidateStatus::kEvalError;
      if (c.eval->ok() && c.eval->sec_pass) {
        c.score = scoring::Score(*c.eval->metrics, *baseline.metrics,
                                 config.weights);
      }
      candidate_times.push_back({{"id", c.id}, {"s", c.eval->wall_time_s}});
    }

    std::vector<double> passing_scores;
    std::vector<scoring::Contender> contenders;
    for (size_t i = 0; i < records.size(); ++i) {
      const CandidateRecord& c = records[i];
      const proposer::Proposal& p = proposals[i];
      if (c.score) passing_scores.push_back(c.score->score);
      scoring::Contender k;
      k.sec_pass = c.sec_pass();
      if (c.score) k.score = c.score->score;
      contenders.push_back(k);
      if (p.diagnosis) {
        trajectory::PathEvent e;
        e.diagnosis = diagnoses[*p.diagnosis];
        if (p.strategy) {
          e.transformation =
              trajectory::Transformation{*p.strategy, p.rationale, p.region};
        }
        e.outcome = Outcome(c, *parent_eval.metrics);
        records[i].path_events.push_back(std::move(e));
      }
    }
    for (CandidateRecord& c : records) store.RecordCandidate(index, std::move(c));

    const scoring::GroupStats stats = scoring::GroupAdvantage(passing_scores);
    const std::optional<size_t> chosen =
        scoring::SelectNext(parent_score, contenders);
    std::optional<std::string> selected;
    if (chosen) {
      selected = trajectory::CandidateId(index, static_cast<int>(*chosen));
      parent = *proposals[*chosen].design;
      parent_id = *selected;
      parent_score = *contenders[*chosen].score;
    }
    store.FinalizeIteration(index, stats, selected);
    const RunState snapshot = store.Snapshot();
    const trajectory::IterationRecord& done = snapshot.iterations[index];
    // The evaluations were moved into the store; the new incumbent's comes
    // back from the snapshot.
    if (chosen) parent_eval = *done.candidates[*chosen].eval;

    // Single-threaded barrier: the group is complete before skills change.
    library.Distill(snapshot.run_id, done);

    timings["iterations"].push_back({{"t", t},
                                     {"propose_s", propose_s},
                                     {"total_s", Seconds(it_start)},
                                     {"candidates", candidate_times}});

    // A group with nothing to evaluate came from a proposer that has run
    // out of new rewrites of this incumbent. Later groups start from the
    // same incumbent with the same or fewer admissible strategies, so they
    // cannot change the result.
    if (config.early_stop && designs.empty() &&
        !config.proposer.llm.configured()) {
      status = RunStatus::kConverged;
      break;
    }
  }

  store.SetStatus(status);
  const RunState final_state = store.Snapshot();
  RunResult result = SummarizeRun(final_state, config.convergence_epsilon);
  library.Export(dir / "skills.json");
  WriteFileAtomic(dir / "result.json", CanonicalDump(ToJson(result)));
  timings["total_s"] = Seconds(run_start);
  WriteFileAtomic(dir / "timings.json", CanonicalDump(timings));
  return result;
}

RunResult Optimize(const rtl::RtlDesign& design, const RunConfig& config,
                   const RunOptions& options, skills::SkillLibrary& library) {
  config.Validate();
  std::unique_ptr<eda::EdaBackend> backend =
      MakeBackend(config.backend, options.run_dir / "work");
  proposer::CatalogProposer proposer(config.proposer);
  return Optimize(design, config, options, library, *backend, proposer);
}

}  // namespace rtlopt::orchestrator
