#include "rtlopt/proposer/proposer.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <set>

#include "rtlopt/common/error.h"
#include "rtlopt/rtl/parser.h"

namespace rtlopt::proposer {

using nlohmann::json;

void ProposerConfig::Validate() const {
  if (n_candidates < 1) throw ConfigError("n_candidates must be >= 1");
  if (!(exploration_fraction >= 0.0 && exploration_fraction <= 1.0)) {
    throw ConfigError("proposer.exploration_fraction must be in [0, 1]");
  }
  llm.Validate();
}

json ToJson(const ProposerConfig& c) {
  return {{"exploration_fraction", c.exploration_fraction},
          {"llm", ToJson(c.llm)}};
}

ProposerConfig ProposerConfigFromJson(const json& j) {
  ProposerConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "exploration_fraction") {
      c.exploration_fraction = value.get<double>();
    } else if (key == "llm") {
      c.llm = LlmConfigFromJson(value);
    } else {
      throw ConfigError("unknown key proposer." + key);
    }
  }
  return c;
}

int SkillSlots(const ProposerConfig& config) {
  // The epsilon keeps products such as 0.6 * 5 from rounding up to 4.
  const double slots =
      std::ceil((1.0 - config.exploration_fraction) * config.n_candidates - 1e-9);
  return std::clamp(static_cast<int>(slots), 0, config.n_candidates);
}

namespace {

constexpr int kStrategyCount = static_cast<int>(StrategyId::kConstantFold) + 1;

// The catalog in a seeded Fisher-Yates order. Spelled out rather than
// std::shuffle so the order does not depend on the standard library.
std::vector<StrategyId> SeededOrder(std::mt19937_64& rng) {
  std::vector<StrategyId> order;
  for (int s = 0; s < kStrategyCount; ++s) {
    order.push_back(static_cast<StrategyId>(s));
  }
  for (size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng() % (i + 1)]);
  }
  return order;
}

// Stand-in target when timing analysis produced no diagnosis.
timing::BottleneckDiagnosis WholeDesign(const rtl::RtlDesign& design) {
  timing::BottleneckDiagnosis d;
  d.region.file = design.file();
  d.region.start_line = 1;
  d.region.end_line = static_cast<int>(
      std::count(design.source().begin(), design.source().end(), '\n') + 1);
  d.region.confidence = timing::RegionConfidence::kHeuristicFailed;
  d.evidence = "no critical path was diagnosed; the whole design is in scope";
  return d;
}

class GroupBuilder {
 public:
  GroupBuilder(const GroupRequest& request,
               const std::vector<timing::BottleneckDiagnosis>& diagnoses)
      : request_(request), diagnoses_(diagnoses), tried_(diagnoses.size()) {
    seen_.insert(rtl::Print(*request.parent));
  }

  // The first rewrite of `strategy` inside the diagnosis region that is new
  // to the group.
  std::optional<Rewrite> Try(size_t d, StrategyId strategy) {
    const rtl::RtlDesign& parent = *request_.parent;
    for (const RewriteSite& site :
         FindSitesInRegion(parent, strategy, diagnoses_[d].region)) {
      Rewrite r = ApplyAt(parent, strategy, site);
      if (seen_.insert(rtl::Print(r.design)).second) {
        tried_[d].insert(strategy);
        return r;
      }
    }
    return std::nullopt;
  }

  bool Claim(const rtl::RtlDesign& design) {
    return seen_.insert(rtl::Print(design)).second;
  }

  bool Tried(size_t d, StrategyId s) const { return tried_[d].count(s) > 0; }

 private:
  const GroupRequest& request_;
  const std::vector<timing::BottleneckDiagnosis>& diagnoses_;
  std::set<std::string> seen_;
  std::vector<std::set<StrategyId>> tried_;
};

}  // namespace

CatalogProposer::CatalogProposer(ProposerConfig config)
    : config_(std::move(config)) {
  config_.Validate();
  if (config_.llm.configured()) llm_.emplace(config_.llm);
}

std::vector<Proposal> CatalogProposer::ProposeGroup(
    const GroupRequest& request) {
  const rtl::RtlDesign& parent = *request.parent;
  const skills::SkillLibrary empty_library;
  const skills::SkillLibrary& library =
      request.library ? *request.library : empty_library;
  const bool whole_design = request.diagnoses.empty();
  std::vector<timing::BottleneckDiagnosis> diagnoses =
      whole_design ? std::vector<timing::BottleneckDiagnosis>{WholeDesign(parent)}
                   : request.diagnoses;
  const size_t n_diag = diagnoses.size();
  const int n = config_.n_candidates;

  std::vector<skills::SkillMatch> matches;
  for (const auto& d : diagnoses) matches.push_back(library.Match(d));

  GroupBuilder group(request, diagnoses);
  std::vector<Proposal> slots(n);
  auto target = [&](Proposal& p, size_t d) {
    if (!whole_design) p.diagnosis = d;
    p.region = diagnoses[d].region;
  };

  // Skill-guided slots.
  std::vector<size_t> cursor(n_diag, 0);
  std::vector<int> exploratory;
  const int skill_slots = SkillSlots(config_);
  for (int s = 0; s < n; ++s) {
    if (s >= skill_slots) {
      exploratory.push_back(s);
      continue;
    }
    const size_t d = s % n_diag;
    const std::vector<skills::Skill>& ranked = matches[d].recommended;
    bool filled = false;
    while (!filled && cursor[d] < ranked.size()) {
      const skills::Skill& skill = ranked[cursor[d]++];
      std::optional<Rewrite> r = group.Try(d, skill.strategy);
      if (!r) continue;
      Proposal& p = slots[s];
      p.design = std::move(r->design);
      p.kind = trajectory::ProposerKind::kSkillGuided;
      p.strategy = skill.strategy;
      p.skill_id = skill.id();
      target(p, d);
      p.rationale = "skill " + skill.id() + " (" +
                    std::string(skills::TierName(skill.tier)) + "): " +
                    r->description;
      filled = true;
    }
    if (!filled) exploratory.push_back(s);
  }
  std::sort(exploratory.begin(), exploratory.end());

  // LLM requests for the exploratory slots run concurrently; their results
  // are claimed in slot order so deduplication stays deterministic.
  std::vector<std::future<LlmOutcome>> llm_results(n);
  if (llm_) {
    for (size_t e = 0; e < exploratory.size(); ++e) {
      const int s = exploratory[e];
      const size_t d = e % n_diag;
      std::filesystem::path prefix;
      if (!request.transcript_dir.empty()) {
        prefix = request.transcript_dir /
                 (request.tag + "-c" + std::to_string(s));
      }
      llm_results[s] = std::async(std::launch::async, [&, d, prefix] {
        return llm_->Propose(parent, diagnoses[d], matches[d], prefix);
      });
    }
  }

  std::mt19937_64 rng(request.seed);
  std::vector<std::vector<StrategyId>> orders;
  for (size_t d = 0; d < n_diag; ++d) orders.push_back(SeededOrder(rng));

  // LLM designs are claimed before any rule fallback runs, so which
  // request finished first cannot decide between an LLM proposal and a rule
  // proposal for the same design.
  std::vector<std::string> fallback_notes(n);
  for (size_t e = 0; e < exploratory.size(); ++e) {
    const int s = exploratory[e];
    const size_t d = e % n_diag;
    Proposal& p = slots[s];
    target(p, d);
    if (!llm_) continue;
    LlmOutcome out = llm_results[s].get();
    p.transcripts = out.transcripts;
    if (out.design && group.Claim(*out.design)) {
      p.design = std::move(out.design);
      p.kind = trajectory::ProposerKind::kLlm;
      p.strategy = out.strategy;
      p.model = config_.llm.model;
      p.rationale = out.rationale;
      continue;
    }
    fallback_notes[s] = "LLM proposal unusable (" +
                        (out.design ? std::string("duplicate of a sibling")
                                    : out.error) +
                        "); rule fallback: ";
  }

  for (size_t e = 0; e < exploratory.size(); ++e) {
    const int s = exploratory[e];
    const size_t d = e % n_diag;
    Proposal& p = slots[s];
    if (p.design) continue;
    const PatternId pattern = diagnoses[d].pattern;
    // First strategies the library has no record of on this pattern, then
    // recorded ones that are not prohibited.
    for (int pass = 0; pass < 2 && !p.design; ++pass) {
      for (StrategyId strategy : orders[d]) {
        if (group.Tried(d, strategy)) continue;
        const skills::Skill* known = library.Find(pattern, strategy);
        if (pass == 0 ? known != nullptr
                      : (known == nullptr || known->tier == skills::Tier::kAvoid)) {
          continue;
        }
        if (std::optional<Rewrite> r = group.Try(d, strategy)) {
          p.design = std::move(r->design);
          p.kind = trajectory::ProposerKind::kRule;
          p.strategy = strategy;
          p.rationale = fallback_notes[s] + r->description;
          break;
        }
      }
    }
    if (!p.design) {
      p.rationale = fallback_notes[s] + "no untried strategy applies to the " +
                    std::string(PatternName(pattern)) + " region";
    }
  }
  return slots;
}

}  // namespace rtlopt::proposer
