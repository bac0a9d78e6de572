#include "rtlopt/orchestrator/orchestrator.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>

#include "rtlopt/common/canonical_json.h"
#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/rtl/parser.h"
#include "support/corpus.h"

namespace rtlopt::orchestrator {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using rtl::RtlDesign;
using trajectory::RunState;
using testing::LoadCorpus;

class OrchestratorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("rtlopt_orch_" +
             std::string(::testing::UnitTest::GetInstance()
                             ->current_test_info()
                             ->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  RunOptions Options(const std::string& sub) const {
    return {root_ / sub, ""};
  }
  static RunConfig Config(int iterations) {
    RunConfig c;
    c.iterations = iterations;
    return c;
  }

  fs::path root_;
};

std::map<std::string, std::string> DirContents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    files[fs::relative(e.path(), dir).string()] = ReadFile(e.path());
  }
  return files;
}

TEST(RunConfigTest, EmptyDocumentTakesDefaults) {
  RunConfig c = RunConfigFromJson(json::object());
  EXPECT_EQ(c.iterations, 10);
  EXPECT_EQ(c.n_candidates, 5);
  EXPECT_EQ(c.top_k, 3);
  EXPECT_DOUBLE_EQ(c.convergence_epsilon, 1e-3);
  EXPECT_EQ(c.effective_concurrency(), 5);
  EXPECT_FALSE(c.early_stop);
  EXPECT_TRUE(c.skill_feedback);
  EXPECT_DOUBLE_EQ(c.weights.alpha, 0.5);
  EXPECT_DOUBLE_EQ(c.backend.clock_ns, 0.5);
  EXPECT_DOUBLE_EQ(c.proposer.exploration_fraction, 0.4);
}

TEST(RunConfigTest, RoundTrip) {
  RunConfig c;
  c.iterations = 4;
  c.n_candidates = 3;
  c.seed = 77;
  c.skill_feedback = false;
  c.backend.clock_ns = 0.8;
  RunConfig back = RunConfigFromJson(ToJson(c));
  EXPECT_EQ(CanonicalDump(ToJson(back)), CanonicalDump(ToJson(c)));
  EXPECT_EQ(back.proposer.n_candidates, 3);
}

TEST(RunConfigTest, ExternalBackendDefaultsToItsClock) {
  RunConfig c = RunConfigFromJson(json::parse(R"js({
    "backend": {"kind": "external",
                "external": {"synth_command": "synth", "sec_command": "sec",
                             "wns_pattern": "WNS (\\S+)",
                             "tns_pattern": "TNS (\\S+)",
                             "area_pattern": "Area (\\S+)"}}})js"));
  EXPECT_EQ(c.backend.kind, eda::BackendKind::kExternal);
  EXPECT_DOUBLE_EQ(c.backend.clock_ns, 0.1);
}

TEST(RunConfigTest, RejectsBadDocuments) {
  const char* bad[] = {
      R"({"run": {"iterations": 0}})",
      R"({"run": {"n_candidates": 0}})",
      R"({"run": {"iterations": "ten"}})",
      R"({"run": {"seed": -1}})",
      R"({"run": {"iteration": 3}})",
      R"({"runs": {}})",
      R"({"run": 3})",
      R"({"backend": {"kind": "fpga"}})",
      R"({"backend": {"clock": 1.0}})",
      R"({"proposer": {"exploration_fraction": 1.5}})",
      R"({"scoring": {"alpha": "x"}})",
      R"([1, 2])",
  };
  for (const char* text : bad) {
    EXPECT_THROW(RunConfigFromJson(json::parse(text)), ConfigError) << text;
  }
}

TEST_F(OrchestratorTest, LoadConfigMapsParseErrors) {
  const fs::path p = root_ / "bad.json";
  WriteFileAtomic(p, "{\"run\": ");
  EXPECT_THROW(LoadRunConfig(p), ConfigError);
  EXPECT_THROW(LoadRunConfig(root_ / "missing.json"), ConfigError);
}

TEST(ImprovementTest, SignedRelativeChange) {
  Improvement i = ImprovementOver({-0.09, -0.5, 20533}, {-0.27, -1.02, 20488});
  EXPECT_NEAR(i.wns_pct, -66.67, 0.01);
  EXPECT_NEAR(i.tns_pct, -50.98, 0.01);
  EXPECT_NEAR(i.area_pct, 0.22, 0.01);
}

TEST_F(OrchestratorTest, ChainedAdderReachesBalancedOptimum) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  skills::SkillLibrary library;
  RunResult r = Optimize(d, Config(3), Options("run"), library);

  EXPECT_DOUBLE_EQ(r.baseline.wns, -0.23);
  EXPECT_GE(r.best_metrics.wns, -0.02 - 1e-9);
  EXPECT_DOUBLE_EQ(r.best_metrics.area, r.baseline.area);
  EXPECT_NE(r.best_design_id, "d0");
  EXPECT_EQ(r.status, trajectory::RunStatus::kBudgetExhausted);
  ASSERT_EQ(r.best_so_far.size(), 3u);
  for (size_t t = 1; t < r.best_so_far.size(); ++t) {
    EXPECT_LE(r.best_so_far[t], r.best_so_far[t - 1]);
  }
  EXPECT_LE(r.best_score, r.best_so_far.back());

  RunState state = trajectory::TrajectoryStore::Load(root_ / "run");
  bool rebalance_selected = false;
  for (const auto& it : state.iterations) {
    for (const auto& c : it.candidates) {
      if (it.selected == c.id &&
          c.strategy == StrategyId::kTreeRebalance) {
        rebalance_selected = true;
      }
    }
  }
  EXPECT_TRUE(rebalance_selected);
  for (const char* f : {"state.json", "skills.json", "result.json",
                        "timings.json"}) {
    EXPECT_TRUE(fs::exists(root_ / "run" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(root_ / "run" / "designs" /
                         (state.baseline_design_hash + ".rtl")));
}

TEST_F(OrchestratorTest, EveryEvaluationIsAgainstTheOriginal) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  skills::SkillLibrary library;
  Optimize(d, Config(3), Options("run"), library);
  RunState state = trajectory::TrajectoryStore::Load(root_ / "run");
  for (const auto& it : state.iterations) {
    for (const auto& c : it.candidates) {
      if (c.status != trajectory::CandidateStatus::kEvaluated) continue;
      RtlDesign cand = rtl::Parse(
          ReadFile(root_ / "run" / "designs" / (c.design_hash + ".rtl")));
      EXPECT_EQ(c.eval->sec_pass,
                eda::CheckEquivalenceBuiltin(d, cand).pass)
          << c.id;
    }
  }
}

TEST_F(OrchestratorTest, BalancedDesignIsAFixedPoint) {
  RtlDesign d = LoadCorpus("balanced_adder.rtl");
  skills::SkillLibrary library;
  RunResult r = Optimize(d, Config(3), Options("run"), library);
  EXPECT_EQ(r.best_design_id, "d0");
  EXPECT_EQ(r.final_design_id, "d0");
  EXPECT_DOUBLE_EQ(r.best_improvement.wns_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.best_improvement.tns_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.best_improvement.area_pct, 0.0);
  RunState state = trajectory::TrajectoryStore::Load(root_ / "run");
  ASSERT_EQ(state.iterations.size(), 3u);
  for (const auto& it : state.iterations) {
    EXPECT_FALSE(it.selected.has_value());
    EXPECT_EQ(it.parent_id, "d0");
  }
}

// Emits variants of the chained adder that all compute something else.
class BrokenProposer : public proposer::Proposer {
 public:
  std::vector<proposer::Proposal> ProposeGroup(
      const proposer::GroupRequest& request) override {
    const char* bodies[] = {"((a - b) + c) + d", "((a + b) - c) + d",
                            "((a + b) + c) - d", "((a ^ b) + c) + d",
                            "(a + b) + c"};
    std::vector<proposer::Proposal> group;
    for (const char* body : bodies) {
      proposer::Proposal p;
      p.design = rtl::Parse(
          "module chained_adder(input [7:0] a, input [7:0] b, "
          "input [7:0] c, input [7:0] d, output [7:0] y);\n"
          "  assign y = " + std::string(body) + ";\nendmodule\n",
          request.parent->file());
      p.strategy = StrategyId::kTreeRebalance;
      group.push_back(std::move(p));
    }
    return group;
  }
};

TEST_F(OrchestratorTest, NonEquivalentCandidatesNeverReplaceTheOriginal) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  RunConfig config = Config(2);
  eda::BuiltinBackend backend(config.backend.clock_ns);
  BrokenProposer proposer;
  skills::SkillLibrary library;
  RunResult r = Optimize(d, config, Options("run"), library, backend, proposer);
  EXPECT_DOUBLE_EQ(r.sec_pass_rate, 0.0);
  EXPECT_EQ(r.final_design_id, "d0");
  EXPECT_EQ(r.final_metrics, r.baseline);
}

TEST_F(OrchestratorTest, TwoSeededRunsWriteIdenticalFiles) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  RunConfig config = Config(3);
  config.seed = 42;
  skills::SkillLibrary first_library;
  skills::SkillLibrary second_library;
  Optimize(d, config, Options("a"), first_library);
  Optimize(d, config, Options("b"), second_library);
  std::map<std::string, std::string> a = DirContents(root_ / "a");
  std::map<std::string, std::string> b = DirContents(root_ / "b");
  // Wall times are the only non-reproducible output.
  a.erase("timings.json");
  b.erase("timings.json");
  EXPECT_EQ(a, b);
  EXPECT_TRUE(first_library == second_library);
}

TEST_F(OrchestratorTest, ResultMatchesRecountFromTrajectory) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  skills::SkillLibrary library;
  RunResult r = Optimize(d, Config(3), Options("run"), library);
  RunState state = trajectory::TrajectoryStore::Load(root_ / "run");

  int passing = 0;
  int skipped = 0;
  for (const auto& it : state.iterations) {
    for (const auto& c : it.candidates) {
      if (c.status == trajectory::CandidateStatus::kSkipped) ++skipped;
      if (c.sec_pass()) ++passing;
    }
  }
  const int reached = 3 * 5 - skipped;
  ASSERT_GT(reached, 0);
  EXPECT_EQ(r.sec_pass_rate, static_cast<double>(passing) / reached);

  RunResult recount = SummarizeRun(state, 1e-3);
  EXPECT_EQ(CanonicalDump(ToJson(recount)), CanonicalDump(ToJson(r)));
  const std::string persisted = ReadFile(root_ / "run" / "result.json");
  EXPECT_EQ(CanonicalDump(ToJson(RunResultFromJson(json::parse(persisted)))),
            persisted);
}

TEST_F(OrchestratorTest, RunDistillsIntoTheLibrary) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  skills::SkillLibrary library;
  RunResult r = Optimize(d, Config(3), Options("run"), library);
  const skills::Skill* s =
      library.Find(PatternId::kWideArithmetic, StrategyId::kTreeRebalance);
  ASSERT_NE(s, nullptr);
  EXPECT_GE(s->occurrence_count, 1);
  EXPECT_EQ(s->sec_pass_count, s->occurrence_count);
  EXPECT_LT(s->mean_advantage, 0.0);
  EXPECT_TRUE(skills::SkillLibrary::Import(root_ / "run" / "skills.json") ==
              library);
  EXPECT_EQ(library.distilled().size(), 3u);
  EXPECT_EQ(library.distilled().begin()->first, r.run_id);
}

// Records the library size the proposer sees each iteration.
class SpyProposer : public proposer::Proposer {
 public:
  explicit SpyProposer(proposer::ProposerConfig c) : inner_(std::move(c)) {}
  std::vector<proposer::Proposal> ProposeGroup(
      const proposer::GroupRequest& request) override {
    seen.push_back(request.library->entries().size());
    return inner_.ProposeGroup(request);
  }
  std::vector<size_t> seen;

 private:
  proposer::CatalogProposer inner_;
};

TEST_F(OrchestratorTest, SkillFeedbackCanBeDisabled) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  for (bool feedback : {true, false}) {
    RunConfig config = Config(2);
    config.skill_feedback = feedback;
    eda::BuiltinBackend backend(config.backend.clock_ns);
    SpyProposer spy(config.proposer);
    skills::SkillLibrary library;
    Optimize(d, config, Options(feedback ? "on" : "off"), library, backend, spy);
    ASSERT_EQ(spy.seen.size(), 2u);
    EXPECT_EQ(spy.seen[0], 0u);
    EXPECT_EQ(spy.seen[1] > 0, feedback);
    // Either way the library learns from the run.
    EXPECT_FALSE(library.entries().empty());
  }
}

class FailingBackend : public eda::BuiltinBackend {
 public:
  explicit FailingBackend(std::string marker) : marker_(std::move(marker)) {}
  eda::SynthesisResult Synthesize(const RtlDesign& design) const override {
    if (rtl::Print(design).find(marker_) != std::string::npos) {
      throw eda::BackendError("tool crashed");
    }
    return eda::BuiltinBackend::Synthesize(design);
  }

 private:
  std::string marker_;
};

TEST_F(OrchestratorTest, BaselineFailureMarksTheRunFailed) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  FailingBackend backend("assign");
  proposer::CatalogProposer proposer({});
  skills::SkillLibrary library;
  EXPECT_THROW(Optimize(d, Config(2), Options("run"), library, backend, proposer),
               BaselineError);
  RunState state = trajectory::TrajectoryStore::Load(root_ / "run");
  EXPECT_EQ(state.status, trajectory::RunStatus::kFailed);
  EXPECT_TRUE(state.iterations.empty());
}

TEST_F(OrchestratorTest, CandidateFailureIsIsolated) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  // Crashes on the rebalanced tree only.
  FailingBackend backend("(c + d)");
  proposer::CatalogProposer proposer({});
  skills::SkillLibrary library;
  RunResult r = Optimize(d, Config(1), Options("run"), library, backend, proposer);
  RunState state = trajectory::TrajectoryStore::Load(root_ / "run");
  int errors = 0;
  int evaluated = 0;
  for (const auto& c : state.iterations[0].candidates) {
    if (c.status == trajectory::CandidateStatus::kEvalError) {
      ++errors;
      EXPECT_NE(c.eval->error.find("tool crashed"), std::string::npos);
    }
    if (c.status == trajectory::CandidateStatus::kEvaluated) ++evaluated;
  }
  EXPECT_EQ(errors, 1);
  EXPECT_GT(evaluated, 0);
  EXPECT_EQ(r.status, trajectory::RunStatus::kBudgetExhausted);
}

TEST_F(OrchestratorTest, EarlyStopWhenNothingIsLeftToPropose) {
  RtlDesign d = rtl::Parse(
      "module and2(input a, input b, output y);\n  assign y = a & b;\n"
      "endmodule\n");
  RunConfig config = Config(5);
  config.early_stop = true;
  skills::SkillLibrary library;
  RunResult r = Optimize(d, config, Options("run"), library);
  EXPECT_EQ(r.status, trajectory::RunStatus::kConverged);
  EXPECT_EQ(r.best_so_far.size(), 1u);

  config.early_stop = false;
  RunResult full = Optimize(d, config, Options("full"), library);
  EXPECT_EQ(full.status, trajectory::RunStatus::kBudgetExhausted);
  EXPECT_EQ(full.best_so_far.size(), 5u);
}

TEST(EvaluateGroupTest, SerialAndParallelAgree) {
  RtlDesign golden = LoadCorpus("chained_adder.rtl");
  std::vector<RtlDesign> owned;
  for (const char* body :
       {"(a + b) + (c + d)", "((a + b) + c) + d", "a + (b + (c + d))",
        "((a + b) + c) - d", "(a + c) + (b + d)"}) {
    owned.push_back(rtl::Parse(
        "module chained_adder(input [7:0] a, input [7:0] b, "
        "input [7:0] c, input [7:0] d, output [7:0] y);\n  assign y = " +
        std::string(body) + ";\nendmodule\n"));
  }
  std::vector<const RtlDesign*> designs;
  for (const RtlDesign& d : owned) designs.push_back(&d);
  eda::BuiltinBackend backend(0.5);
  std::vector<eda::EvalResult> serial =
      EvaluateGroup(backend, golden, designs, 1);
  std::vector<eda::EvalResult> parallel =
      EvaluateGroup(backend, golden, designs, 5);
  ASSERT_EQ(serial.size(), 5u);
  ASSERT_EQ(parallel.size(), 5u);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(CanonicalDump(eda::ToJson(serial[i])),
              CanonicalDump(eda::ToJson(parallel[i])));
  }
  EXPECT_FALSE(serial[3].sec_pass);
  EXPECT_TRUE(serial[0].sec_pass);
}

TEST(DeriveRunIdTest, DependsOnEveryInput) {
  RtlDesign d = LoadCorpus("chained_adder.rtl");
  RunConfig c;
  skills::SkillLibrary empty;
  const std::string id = DeriveRunId(d, c, empty);
  EXPECT_EQ(id.rfind("chained_adder-", 0), 0u);
  EXPECT_EQ(DeriveRunId(d, c, empty), id);
  RunConfig seeded = c;
  seeded.seed = 1;
  EXPECT_NE(DeriveRunId(d, seeded, empty), id);
  EXPECT_NE(DeriveRunId(LoadCorpus("balanced_adder.rtl"), c, empty), id);
}

}  // namespace
}  // namespace rtlopt::orchestrator
