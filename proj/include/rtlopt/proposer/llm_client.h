#ifndef RTLOPT_PROPOSER_LLM_CLIENT_H_
#define RTLOPT_PROPOSER_LLM_CLIENT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rtlopt/common/taxonomy.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/skills/skills.h"
#include "rtlopt/timing/analysis.h"

namespace rtlopt::proposer {

// A chat-completions endpoint. Only `base_url` and `model` are required;
// the credential is read from the environment variable named here.
struct LlmConfig {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 60.0;
  int max_retries = 2;

  bool configured() const { return !base_url.empty() && !model.empty(); }
  void Validate() const;  // throws ConfigError
};

nlohmann::json ToJson(const LlmConfig& c);
// Unknown keys are a ConfigError.
LlmConfig LlmConfigFromJson(const nlohmann::json& j);

struct LlmOutcome {
  std::optional<rtl::RtlDesign> design;  // empty when every attempt failed
  std::optional<StrategyId> strategy;    // from a "Strategy: <name>" line
  std::string rationale;                 // reply text outside the code block
  int attempts = 0;
  std::string error;                     // last failure, when design is empty
  std::vector<std::filesystem::path> transcripts;
};

// Contents of the first complete fenced code block of a reply, or nothing.
std::optional<std::string> ExtractCodeBlock(std::string_view reply);
// The strategy named by a "Strategy: <name>" line outside code blocks.
std::optional<StrategyId> ExtractStrategy(std::string_view reply);

class LlmClient {
 public:
  explicit LlmClient(LlmConfig config);

  const LlmConfig& config() const { return config_; }

  // The chat request for one proposal: directive, parent source, diagnosis,
  // recommended and prohibited skills, and the output contract.
  nlohmann::json BuildRequest(const rtl::RtlDesign& parent,
                              const timing::BottleneckDiagnosis& diagnosis,
                              const skills::SkillMatch& match) const;

  // Asks for one rewritten module. A reply must hold one fenced block with a
  // complete module that parses, keeps the parent's ports and differs from
  // the parent; otherwise the request is retried up to max_retries times.
  // Each attempt is written to "<transcript_prefix>-a<k>.json" when the
  // prefix is non-empty. Never throws for transport or content failures.
  LlmOutcome Propose(const rtl::RtlDesign& parent,
                     const timing::BottleneckDiagnosis& diagnosis,
                     const skills::SkillMatch& match,
                     const std::filesystem::path& transcript_prefix) const;

 private:
  LlmConfig config_;
};

}  // namespace rtlopt::proposer

#endif  // RTLOPT_PROPOSER_LLM_CLIENT_H_
