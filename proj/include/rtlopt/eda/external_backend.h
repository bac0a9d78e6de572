#ifndef RTLOPT_EDA_EXTERNAL_BACKEND_H_
#define RTLOPT_EDA_EXTERNAL_BACKEND_H_

#include <filesystem>
#include <map>
#include <string>

#include "rtlopt/eda/backend.h"

namespace rtlopt::eda {

struct CommandResult {
  std::string command;
  int exit_status = -1;  // -1 when killed by a signal or on timeout
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;

  bool ok() const { return !timed_out && exit_status == 0; }
  // Last `lines` lines of stderr, for error messages.
  std::string StderrTail(int lines = 20) const;
};

// Replaces every {name} in `tmpl`. Throws ConfigError naming the first
// placeholder without a binding.
std::string SubstitutePlaceholders(
    const std::string& tmpl, const std::map<std::string, std::string>& bindings);

// Runs the substituted command through /bin/sh in `workdir`, capturing both
// output streams. The whole process group is killed after `timeout_s`.
// Placeholders are resolved before anything is executed.
CommandResult RunExternal(const std::string& tmpl,
                          const std::map<std::string, std::string>& bindings,
                          const std::filesystem::path& workdir,
                          double timeout_s);

// Adapter around a site's synthesis and SEC scripts. Each design is written
// to its own directory under `work_root`, named by content hash, so
// concurrent evaluations never share files.
class ExternalBackend : public EdaBackend {
 public:
  ExternalBackend(ExternalBackendConfig config, double clock_ns,
                  std::filesystem::path work_root);

  std::string id() const override { return "external"; }
  double clock_ns() const override { return clock_ns_; }
  SynthesisResult Synthesize(const rtl::RtlDesign& design) const override;
  EquivalenceResult CheckEquivalence(
      const rtl::RtlDesign& golden,
      const rtl::RtlDesign& candidate) const override;

  std::filesystem::path DesignDir(const rtl::RtlDesign& design) const;

 private:
  std::filesystem::path Stage(const rtl::RtlDesign& design) const;
  std::map<std::string, std::string> Bindings(const rtl::RtlDesign& design,
                                              const std::filesystem::path& dir) const;

  ExternalBackendConfig config_;
  double clock_ns_;
  std::filesystem::path work_root_;
};

}  // namespace rtlopt::eda

#endif  // RTLOPT_EDA_EXTERNAL_BACKEND_H_
