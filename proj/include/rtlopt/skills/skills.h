#ifndef RTLOPT_SKILLS_SKILLS_H_
#define RTLOPT_SKILLS_SKILLS_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rtlopt/common/error.h"
#include "rtlopt/common/taxonomy.h"
#include "rtlopt/trajectory/trajectory.h"

namespace rtlopt::skills {

inline constexpr int kLibraryVersion = 1;

enum class Tier { kHigh, kMedium, kLow, kAvoid };

std::string_view TierName(Tier t);

// A pattern-strategy pair with its empirical record.
struct Skill {
  PatternId pattern = PatternId::kExcessiveDepth;
  StrategyId strategy = StrategyId::kTreeRebalance;
  int occurrence_count = 0;
  int sec_pass_count = 0;
  // Mean group-relative advantage over SEC-passing applications; lower is
  // better.
  double mean_advantage = 0.0;
  Tier tier = Tier::kLow;
  std::string template_text;
  std::string notes;

  // "<pattern>/<strategy>".
  std::string id() const;
  friend bool operator==(const Skill&, const Skill&) = default;
};

std::string SkillId(PatternId p, StrategyId s);

// avoid: occ >= 2 and (r < 0.5 or m >= 0.5)
// high:  occ >= 3 and r >= 0.8 and m <= -0.5
// medium: occ >= 2 and r >= 0.6 and m < 0
// low: otherwise
Tier AssignTier(const Skill& skill);

class SkillError : public Error {
 public:
  using Error::Error;
};

struct SkillMatch {
  std::vector<Skill> recommended;  // best first
  std::vector<Skill> prohibited;   // avoid tier
};

class SkillLibrary {
 public:
  using Key = std::pair<PatternId, StrategyId>;
  // (run_id, iteration index) pairs already folded into the statistics.
  using DistillKey = std::pair<std::string, int>;

  const std::map<Key, Skill>& entries() const { return entries_; }
  const std::set<std::string>& provenance() const { return provenance_; }
  const std::set<DistillKey>& distilled() const { return distilled_; }
  bool empty() const { return entries_.empty(); }
  const Skill* Find(PatternId p, StrategyId s) const;

  // Folds one finalized iteration of `run_id` into the statistics. A
  // (run_id, t) pair already distilled is ignored, so repeating the call is
  // a no-op. The result does not depend on candidate order. Throws
  // SkillError when the iteration is not finalized.
  void Distill(const std::string& run_id,
               const trajectory::IterationRecord& iteration);
  void DistillRun(const trajectory::RunState& state);

  // Recommendations for a diagnosed pattern, tier high > medium > low, then
  // lower mean advantage, then strategy name; avoid-tier entries come back
  // as prohibitions.
  SkillMatch Match(PatternId pattern) const;
  SkillMatch Match(const timing::BottleneckDiagnosis& diagnosis) const {
    return Match(diagnosis.pattern);
  }

  // Sums counts and takes the pass-count-weighted mean of the advantages.
  // Throws SkillError naming every key whose templates disagree, or when
  // two libraries both hold the same distilled iteration.
  static SkillLibrary Merge(const std::vector<SkillLibrary>& libraries);

  nlohmann::json ToJson() const;
  // Validates enums, count relations, tier consistency and key uniqueness.
  // Throws SkillError.
  static SkillLibrary FromJson(const nlohmann::json& j);

  void Export(const std::filesystem::path& path) const;
  static SkillLibrary Import(const std::filesystem::path& path);

  // Inserts or replaces an entry, recomputing its tier.
  void Put(Skill skill);

  friend bool operator==(const SkillLibrary&, const SkillLibrary&) = default;

 private:
  std::map<Key, Skill> entries_;
  std::set<std::string> provenance_;
  std::set<DistillKey> distilled_;
};

}  // namespace rtlopt::skills

#endif  // RTLOPT_SKILLS_SKILLS_H_
