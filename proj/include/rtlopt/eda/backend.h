#ifndef RTLOPT_EDA_BACKEND_H_
#define RTLOPT_EDA_BACKEND_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtlopt/common/error.h"
#include "rtlopt/eda/ppa.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/rtl/simulate.h"
#include "rtlopt/timing/timing_report.h"

namespace rtlopt::eda {

inline constexpr double kBuiltinDefaultClockNs = 0.5;
inline constexpr double kExternalDefaultClockNs = 0.1;

enum class BackendKind { kBuiltin, kExternal };

// Commands and extraction rules for a real synthesis/equivalence flow.
// Templates may use {design_dir}, {top}, {clock_ns} and, for SEC,
// {golden_dir}. Patterns are ECMAScript regexes whose first capture group
// holds the number.
struct ExternalBackendConfig {
  std::string synth_command;
  std::string sec_command;
  std::string wns_pattern;
  std::string tns_pattern;
  std::string area_pattern;
  // When set, SEC passes only if the SEC output matches this pattern (and
  // the command exits 0).
  std::string sec_pass_pattern;
  // Files (relative to the design directory) searched for the metric
  // patterns. Empty: search the synthesis command's stdout.
  std::vector<std::string> report_files;
  // Optional canonical timing-report JSON written by the flow, relative to
  // the design directory.
  std::string timing_report;
  std::string design_filename = "{top}.v";
  double timeout_s = 3600.0;
};

struct BackendConfig {
  BackendKind kind = BackendKind::kBuiltin;
  double clock_ns = kBuiltinDefaultClockNs;
  ExternalBackendConfig external;

  void Validate() const;  // throws ConfigError
};

std::string_view BackendKindName(BackendKind kind);
nlohmann::json ToJson(const BackendConfig& c);
// Unknown keys are a ConfigError. clock_ns defaults by kind.
BackendConfig BackendConfigFromJson(const nlohmann::json& j);

enum class SecMode { kExhaustive, kBoundedSampled, kExternal, kSkippedBaseline };

std::string_view SecModeName(SecMode mode);
std::optional<SecMode> ParseSecMode(std::string_view name);

// A stimulus that separates two designs: `inputs` runs from frame 0 up to and
// including `frame`, where output `output` differs.
struct Counterexample {
  std::vector<rtl::SignalValues> inputs;
  int frame = 0;
  std::string output;
  uint64_t golden_value = 0;
  uint64_t candidate_value = 0;
};

struct EquivalenceResult {
  bool pass = false;
  SecMode mode = SecMode::kExhaustive;
  std::optional<Counterexample> counterexample;
  std::string note;
};

struct SynthesisResult {
  PpaMetrics metrics;
  timing::TimingReport report;
};

// Outcome of evaluating one candidate. `metrics` is empty when the
// evaluation itself failed; `error` then says why.
struct EvalResult {
  std::optional<PpaMetrics> metrics;
  bool sec_pass = false;
  SecMode sec_mode = SecMode::kExhaustive;
  timing::TimingReport timing_report;
  std::string backend_id;
  double wall_time_s = 0.0;
  std::string error;
  std::string note;

  bool ok() const { return metrics.has_value(); }
};

nlohmann::json ToJson(const Counterexample& cex);
// Wall time is excluded: it is not reproducible.
nlohmann::json ToJson(const EvalResult& r);
EvalResult EvalResultFromJson(const nlohmann::json& j);

// Failure of the evaluation backend on one design.
class BackendError : public Error {
 public:
  using Error::Error;
};

// The evaluation agent. Runs tools and reports numbers; never interprets
// reports beyond the configured extraction rules. Implementations are
// reentrant.
class EdaBackend {
 public:
  virtual ~EdaBackend() = default;

  virtual std::string id() const = 0;
  virtual double clock_ns() const = 0;
  // Throws BackendError (or rtl::RtlError for invalid designs).
  virtual SynthesisResult Synthesize(const rtl::RtlDesign& design) const = 0;
  // Throws rtl::InterfaceMismatchError when the port lists differ.
  virtual EquivalenceResult CheckEquivalence(
      const rtl::RtlDesign& golden, const rtl::RtlDesign& candidate) const = 0;

  // Synthesis plus SEC against `golden`, with every failure captured in the
  // result. `golden` == nullptr evaluates the baseline (SEC skipped).
  EvalResult Evaluate(const rtl::RtlDesign* golden,
                      const rtl::RtlDesign& candidate) const;
};

}  // namespace rtlopt::eda

#endif  // RTLOPT_EDA_BACKEND_H_
