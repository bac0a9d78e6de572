#include "rtlopt/cli/cli.h"

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rtlopt/cli/render.h"
#include "rtlopt/common/canonical_json.h"
#include "rtlopt/orchestrator/orchestrator.h"
#include "rtlopt/rtl/errors.h"
#include "rtlopt/rtl/parser.h"
#include "rtlopt/skills/skills.h"
#include "rtlopt/trajectory/trajectory.h"

namespace rtlopt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// An invocation that names missing or unusable files.
class UsageError : public Error {
 public:
  using Error::Error;
};

rtl::RtlDesign LoadDesign(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw UsageError("design file not found: " + path.string());
  }
  return rtl::Parse(ReadFile(path), path.filename().string());
}

skills::SkillLibrary LoadLibrary(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw UsageError("skill library not found: " + path.string());
  }
  return skills::SkillLibrary::Import(path);
}

trajectory::RunState LoadRun(const fs::path& dir) {
  if (!fs::is_regular_file(trajectory::TrajectoryStore::StatePath(dir))) {
    throw UsageError("no run found in " + dir.string());
  }
  return trajectory::TrajectoryStore::Load(dir);
}

// Scratch directory for external tool runs of `eval`, removed on exit.
class ScratchDir {
 public:
  ScratchDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("rtlopt-eval-" + std::to_string(rd()) + std::to_string(rd()));
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct OptimizeArgs {
  std::string design;
  std::string config;
  std::string skills;
  uint64_t seed = 0;
  std::string out;
};

int Optimize(const OptimizeArgs& a, bool seed_given, std::ostream& out) {
  orchestrator::RunConfig config = orchestrator::LoadRunConfig(a.config);
  if (seed_given) config.seed = a.seed;
  skills::SkillLibrary library;
  if (!a.skills.empty()) library = LoadLibrary(a.skills);
  const rtl::RtlDesign design = LoadDesign(a.design);
  orchestrator::RunOptions options;
  options.run_id = orchestrator::DeriveRunId(design, config, library);
  options.run_dir =
      a.out.empty() ? fs::path("runs") / options.run_id : fs::path(a.out);
  const orchestrator::RunResult result =
      orchestrator::Optimize(design, config, options, library);
  out << RenderSummary(result, static_cast<int>(result.best_so_far.size()));
  out << "artifacts: " << options.run_dir.string() << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string design;
  std::string golden;
  std::string config;
};

int Eval(const EvalArgs& a, std::ostream& out) {
  orchestrator::RunConfig config = orchestrator::LoadRunConfig(a.config);
  const rtl::RtlDesign design = LoadDesign(a.design);
  std::optional<rtl::RtlDesign> golden;
  if (!a.golden.empty()) golden = LoadDesign(a.golden);
  if (golden && !golden->SameInterface(design)) {
    throw rtl::InterfaceMismatchError("port lists of '" + golden->name() +
                                      "' and '" + design.name() + "' differ");
  }
  ScratchDir scratch;
  std::unique_ptr<eda::EdaBackend> backend =
      orchestrator::MakeBackend(config.backend, scratch.path());
  const eda::SynthesisResult synth = backend->Synthesize(design);
  json j = eda::ToJson(synth.metrics);
  if (golden) {
    const eda::EquivalenceResult sec =
        backend->CheckEquivalence(*golden, design);
    j["sec_pass"] = sec.pass;
    j["sec_mode"] = eda::SecModeName(sec.mode);
    if (sec.counterexample) j["counterexample"] = eda::ToJson(*sec.counterexample);
    if (!sec.note.empty()) j["note"] = sec.note;
  }
  out << CanonicalDump(j);
  return kExitOk;
}

int Show(const std::string& run, std::optional<int> iteration,
         std::ostream& out) {
  const trajectory::RunState state = LoadRun(run);
  if (!iteration) {
    out << RenderRunOverview(state);
    return kExitOk;
  }
  try {
    out << RenderIteration(state, *iteration);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

int Report(const std::string& run, const std::string& format,
           std::ostream& out) {
  const trajectory::RunState state = LoadRun(run);
  out << (format == "json" ? RenderReportJson(state) : RenderReportCsv(state));
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Closed-loop timing optimization of RTL-lite designs", "rtlopt"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  CLI::App* optimize =
      app.add_subcommand("optimize", "Run the optimization loop on a design");
  optimize->add_option("--design", opt.design, "RTL-lite source file")
      ->required();
  optimize->add_option("--config", opt.config, "Run configuration (JSON)")
      ->required();
  optimize->add_option("--skills", opt.skills,
                       "Skill library to start from (read only)");
  CLI::Option* seed_opt =
      optimize->add_option("--seed", opt.seed, "Overrides run.seed");
  optimize->add_option("--out", opt.out,
                       "Run directory (default runs/<run id>)");

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand(
      "eval", "Synthesize one design, with SEC when --golden is given");
  eval->add_option("--design", ev.design, "RTL-lite source file")->required();
  eval->add_option("--golden", ev.golden, "Reference design for SEC");
  eval->add_option("--config", ev.config, "Run configuration (JSON)")
      ->required();

  std::string show_run;
  int show_iteration = 0;
  CLI::App* show = app.add_subcommand("show", "Render a run's trajectory");
  show->add_option("--run", show_run, "Run directory")->required();
  CLI::Option* iteration_opt = show->add_option(
      "--iteration", show_iteration, "Iteration to expand");

  std::string report_run;
  std::string report_format = "csv";
  CLI::App* report = app.add_subcommand(
      "report", "Per-iteration best-so-far series and run metrics");
  report->add_option("--run", report_run, "Run directory")->required();
  report->add_option("--format", report_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* skills_cmd =
      app.add_subcommand("skills", "Inspect and combine skill libraries");
  skills_cmd->require_subcommand(1);
  std::string list_library;
  CLI::App* list = skills_cmd->add_subcommand("list", "Print entries by tier");
  list->add_option("--library", list_library, "Skill library file")
      ->required();
  std::string export_run, export_base, export_out;
  CLI::App* exp = skills_cmd->add_subcommand(
      "export", "Distill a run's trajectory into a library file");
  exp->add_option("--run", export_run, "Run directory")->required();
  exp->add_option("--library", export_base, "Library to distill on top of");
  exp->add_option("--out", export_out, "Output library file")->required();
  std::string import_in, import_library;
  CLI::App* imp = skills_cmd->add_subcommand(
      "import", "Merge a library file into another");
  imp->add_option("--in", import_in, "Library to import")->required();
  imp->add_option("--library", import_library,
                  "Target library, created when missing")
      ->required();
  std::vector<std::string> merge_inputs;
  std::string merge_out;
  CLI::App* merge =
      skills_cmd->add_subcommand("merge", "Merge library files into one");
  merge->add_option("inputs", merge_inputs, "Library files")->required();
  merge->add_option("--out", merge_out, "Output library file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*optimize) return Optimize(opt, seed_opt->count() > 0, out);
    if (*eval) return Eval(ev, out);
    if (*show) {
      return Show(show_run,
                  iteration_opt->count() ? std::optional<int>(show_iteration)
                                         : std::nullopt,
                  out);
    }
    if (*report) return Report(report_run, report_format, out);
    if (*list) {
      out << RenderSkillTable(LoadLibrary(list_library));
    } else if (*exp) {
      skills::SkillLibrary lib;
      if (!export_base.empty()) lib = LoadLibrary(export_base);
      lib.DistillRun(LoadRun(export_run));
      lib.Export(export_out);
    } else if (*imp) {
      skills::SkillLibrary incoming = LoadLibrary(import_in);
      skills::SkillLibrary target;
      if (fs::exists(import_library)) target = LoadLibrary(import_library);
      skills::SkillLibrary::Merge({target, incoming}).Export(import_library);
    } else if (*merge) {
      std::vector<skills::SkillLibrary> libs;
      for (const std::string& p : merge_inputs) libs.push_back(LoadLibrary(p));
      skills::SkillLibrary::Merge(libs).Export(merge_out);
    }
    return kExitOk;
  } catch (const rtl::InterfaceMismatchError& e) {
    err << "error: interface mismatch: " << e.what() << "\n";
    return kExitInterface;
  } catch (const orchestrator::BaselineError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const eda::BackendError& e) {
    err << "error: backend: " << e.what() << "\n";
    return kExitBackend;
  } catch (const rtl::RtlError& e) {
    err << "error: design rejected: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace rtlopt::cli
