#ifndef RTLOPT_PROPOSER_PROPOSER_H_
#define RTLOPT_PROPOSER_PROPOSER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtlopt/proposer/llm_client.h"
#include "rtlopt/proposer/rewrite.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/skills/skills.h"
#include "rtlopt/timing/analysis.h"
#include "rtlopt/trajectory/trajectory.h"

namespace rtlopt::proposer {

inline constexpr int kDefaultCandidates = 5;
inline constexpr double kDefaultExplorationFraction = 0.4;

struct ProposerConfig {
  int n_candidates = kDefaultCandidates;
  // Share of the group reserved for proposals not drawn from the library.
  double exploration_fraction = kDefaultExplorationFraction;
  LlmConfig llm;

  void Validate() const;  // throws ConfigError
};

nlohmann::json ToJson(const ProposerConfig& c);
// Unknown keys are a ConfigError.
ProposerConfig ProposerConfigFromJson(const nlohmann::json& j);

// Number of group slots filled from the skill library first:
// ceil((1 - exploration_fraction) * n_candidates).
int SkillSlots(const ProposerConfig& config);

// One slot of a candidate group.
struct Proposal {
  // Empty for a slot that produced no new design.
  std::optional<rtl::RtlDesign> design;
  trajectory::ProposerKind kind = trajectory::ProposerKind::kRule;
  std::optional<StrategyId> strategy;
  std::optional<std::string> skill_id;
  std::string model;  // LLM proposals only
  // Index of the targeted diagnosis; empty for whole-design proposals.
  std::optional<size_t> diagnosis;
  timing::RtlRegion region;
  std::string rationale;
  std::vector<std::filesystem::path> transcripts;

  bool skipped() const { return !design.has_value(); }
};

struct GroupRequest {
  const rtl::RtlDesign* parent = nullptr;
  std::vector<timing::BottleneckDiagnosis> diagnoses;
  const skills::SkillLibrary* library = nullptr;
  uint64_t seed = 0;
  // Transcript files are named "<transcript_dir>/<tag>-c<slot>-a<k>.json".
  std::filesystem::path transcript_dir;
  std::string tag;
};

// The RTL-optimization agent: produces one group of candidate designs.
class Proposer {
 public:
  virtual ~Proposer() = default;
  // Returns exactly n_candidates proposals, slot order.
  virtual std::vector<Proposal> ProposeGroup(const GroupRequest& request) = 0;
};

// Skill-guided slots first: recommendations of the library, in rank order,
// cycling over the diagnoses. The remaining slots, and skill slots that
// found nothing applicable, are exploratory: the LLM when one is
// configured, otherwise catalog strategies the library has not seen on that
// pattern, in a seeded random order. No two proposals of a group, nor a
// proposal and the parent, print identically; a slot left without a new
// design is returned skipped. Without an LLM the group is a pure function
// of the request.
class CatalogProposer : public Proposer {
 public:
  explicit CatalogProposer(ProposerConfig config);

  const ProposerConfig& config() const { return config_; }
  std::vector<Proposal> ProposeGroup(const GroupRequest& request) override;

 private:
  ProposerConfig config_;
  std::optional<LlmClient> llm_;
};

}  // namespace rtlopt::proposer

#endif  // RTLOPT_PROPOSER_PROPOSER_H_
