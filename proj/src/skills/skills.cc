#include "rtlopt/skills/skills.h"

#include <algorithm>

#include "rtlopt/common/canonical_json.h"

namespace rtlopt::skills {

using nlohmann::json;

std::string_view TierName(Tier t) {
  switch (t) {
    case Tier::kHigh:
      return "high";
    case Tier::kMedium:
      return "medium";
    case Tier::kLow:
      return "low";
    case Tier::kAvoid:
      return "avoid";
  }
  return "unknown";
}

namespace {

int TierRank(Tier t) {
  switch (t) {
    case Tier::kHigh:
      return 0;
    case Tier::kMedium:
      return 1;
    case Tier::kLow:
      return 2;
    case Tier::kAvoid:
      return 3;
  }
  return 4;
}

Tier ParseTier(const std::string& name) {
  for (Tier t : {Tier::kHigh, Tier::kMedium, Tier::kLow, Tier::kAvoid}) {
    if (TierName(t) == name) return t;
  }
  throw SkillError("unknown tier '" + name + "'");
}

}  // namespace

std::string SkillId(PatternId p, StrategyId s) {
  return std::string(PatternName(p)) + "/" + std::string(StrategyName(s));
}

std::string Skill::id() const { return SkillId(pattern, strategy); }

Tier AssignTier(const Skill& skill) {
  const int occ = skill.occurrence_count;
  const double r =
      occ == 0 ? 0.0 : static_cast<double>(skill.sec_pass_count) / occ;
  const double m = skill.mean_advantage;
  if (occ >= 2 && (r < 0.5 || m >= 0.5)) return Tier::kAvoid;
  if (occ >= 3 && r >= 0.8 && m <= -0.5) return Tier::kHigh;
  if (occ >= 2 && r >= 0.6 && m < 0.0) return Tier::kMedium;
  return Tier::kLow;
}

const Skill* SkillLibrary::Find(PatternId p, StrategyId s) const {
  auto it = entries_.find({p, s});
  return it == entries_.end() ? nullptr : &it->second;
}

void SkillLibrary::Put(Skill skill) {
  // The mean is over passing applications only; without any it is 0.
  if (skill.sec_pass_count == 0) skill.mean_advantage = 0.0;
  skill.tier = AssignTier(skill);
  Key key{skill.pattern, skill.strategy};
  entries_[key] = std::move(skill);
}

void SkillLibrary::Distill(const std::string& run_id,
                           const trajectory::IterationRecord& iteration) {
  if (!iteration.finalized) {
    throw SkillError("iteration " + std::to_string(iteration.index) +
                     " is not finalized");
  }
  if (!distilled_.insert({run_id, iteration.index}).second) return;
  provenance_.insert(run_id);

  struct Batch {
    int occurrences = 0;
    std::vector<double> advantages;
  };
  std::map<Key, Batch> batches;
  for (const trajectory::CandidateRecord& c : iteration.candidates) {
    std::set<Key> applied;
    for (const trajectory::PathEvent& e : c.path_events) {
      if (e.transformation) {
        applied.insert({e.diagnosis.pattern, e.transformation->strategy});
      }
    }
    for (const Key& key : applied) {
      Batch& b = batches[key];
      ++b.occurrences;
      if (c.sec_pass()) b.advantages.push_back(c.advantage.value_or(0.0));
    }
  }
  for (auto& [key, batch] : batches) {
    Skill s;
    if (const Skill* existing = Find(key.first, key.second)) {
      s = *existing;
    } else {
      s.pattern = key.first;
      s.strategy = key.second;
      s.template_text = std::string(StrategyTemplate(key.second));
    }
    // Summing in sorted order keeps the result independent of the order in
    // which candidates were recorded.
    std::sort(batch.advantages.begin(), batch.advantages.end());
    double sum = s.mean_advantage * s.sec_pass_count;
    for (double a : batch.advantages) sum += a;
    s.occurrence_count += batch.occurrences;
    s.sec_pass_count += static_cast<int>(batch.advantages.size());
    if (s.sec_pass_count > 0) s.mean_advantage = sum / s.sec_pass_count;
    Put(std::move(s));
  }
}

void SkillLibrary::DistillRun(const trajectory::RunState& state) {
  for (const trajectory::IterationRecord& it : state.iterations) {
    if (it.finalized) Distill(state.run_id, it);
  }
}

SkillMatch SkillLibrary::Match(PatternId pattern) const {
  SkillMatch m;
  for (const auto& [key, skill] : entries_) {
    if (key.first != pattern) continue;
    (skill.tier == Tier::kAvoid ? m.prohibited : m.recommended).push_back(skill);
  }
  std::sort(m.recommended.begin(), m.recommended.end(),
            [](const Skill& a, const Skill& b) {
              if (a.tier != b.tier) return TierRank(a.tier) < TierRank(b.tier);
              if (a.mean_advantage != b.mean_advantage) {
                return a.mean_advantage < b.mean_advantage;
              }
              return StrategyName(a.strategy) < StrategyName(b.strategy);
            });
  return m;
}

SkillLibrary SkillLibrary::Merge(const std::vector<SkillLibrary>& libraries) {
  SkillLibrary out;
  std::vector<std::string> conflicts;
  for (const SkillLibrary& lib : libraries) {
    // Summing counts is only sound for disjoint evidence.
    for (const DistillKey& k : lib.distilled_) {
      if (!out.distilled_.insert(k).second) {
        throw SkillError("iteration " + std::to_string(k.second) + " of run " +
                         k.first + " is counted in more than one library");
      }
    }
    out.provenance_.insert(lib.provenance_.begin(), lib.provenance_.end());
    for (const auto& [key, skill] : lib.entries_) {
      auto it = out.entries_.find(key);
      if (it == out.entries_.end()) {
        out.Put(skill);
        continue;
      }
      Skill merged = it->second;
      if (merged.template_text != skill.template_text) {
        conflicts.push_back(skill.id());
        continue;
      }
      const int passes = merged.sec_pass_count + skill.sec_pass_count;
      if (passes > 0) {
        merged.mean_advantage =
            (merged.mean_advantage * merged.sec_pass_count +
             skill.mean_advantage * skill.sec_pass_count) /
            passes;
      }
      merged.occurrence_count += skill.occurrence_count;
      merged.sec_pass_count = passes;
      if (merged.notes.empty()) {
        merged.notes = skill.notes;
      } else if (!skill.notes.empty() && skill.notes != merged.notes) {
        merged.notes += "\n" + skill.notes;
      }
      out.Put(std::move(merged));
    }
  }
  if (!conflicts.empty()) {
    std::sort(conflicts.begin(), conflicts.end());
    conflicts.erase(std::unique(conflicts.begin(), conflicts.end()),
                    conflicts.end());
    std::string msg = "incompatible templates for";
    for (const std::string& c : conflicts) msg += " " + c;
    throw SkillError(msg);
  }
  return out;
}

json SkillLibrary::ToJson() const {
  std::vector<const Skill*> ordered;
  for (const auto& [key, skill] : entries_) ordered.push_back(&skill);
  std::sort(ordered.begin(), ordered.end(),
            [](const Skill* a, const Skill* b) { return a->id() < b->id(); });
  json skills = json::array();
  for (const Skill* s : ordered) {
    skills.push_back({{"id", s->id()},
                      {"pattern", PatternName(s->pattern)},
                      {"strategy", StrategyName(s->strategy)},
                      {"occurrence_count", s->occurrence_count},
                      {"sec_pass_count", s->sec_pass_count},
                      {"mean_advantage", s->mean_advantage},
                      {"tier", TierName(s->tier)},
                      {"template", s->template_text},
                      {"notes", s->notes}});
  }
  json distilled = json::array();
  for (const auto& [run, t] : distilled_) {
    distilled.push_back({{"run_id", run}, {"iteration", t}});
  }
  return {{"schema_version", kLibraryVersion},
          {"provenance", provenance_},
          {"distilled", distilled},
          {"skills", skills}};
}

SkillLibrary SkillLibrary::FromJson(const json& j) {
  try {
    if (!j.is_object()) throw SkillError("skill library must be a JSON object");
    const int version = j.at("schema_version").get<int>();
    if (version != kLibraryVersion) {
      throw SkillError("unsupported skill library schema_version " +
                       std::to_string(version) + " (expected " +
                       std::to_string(kLibraryVersion) + ")");
    }
    SkillLibrary lib;
    for (const json& r : j.at("provenance")) lib.provenance_.insert(r.get<std::string>());
    for (const json& d : j.at("distilled")) {
      lib.distilled_.insert(
          {d.at("run_id").get<std::string>(), d.at("iteration").get<int>()});
    }
    for (const json& e : j.at("skills")) {
      Skill s;
      auto p = ParsePattern(e.at("pattern").get<std::string>());
      auto st = ParseStrategy(e.at("strategy").get<std::string>());
      if (!p || !st) throw SkillError("unknown pattern or strategy in " + e.dump());
      s.pattern = *p;
      s.strategy = *st;
      if (e.contains("id") && e.at("id").get<std::string>() != s.id()) {
        throw SkillError("skill id " + e.at("id").get<std::string>() +
                         " does not match its pattern and strategy");
      }
      s.occurrence_count = e.at("occurrence_count").get<int>();
      s.sec_pass_count = e.at("sec_pass_count").get<int>();
      s.mean_advantage = e.at("mean_advantage").get<double>();
      s.tier = ParseTier(e.at("tier").get<std::string>());
      s.template_text = e.at("template").get<std::string>();
      s.notes = e.value("notes", "");
      if (s.sec_pass_count < 0 || s.sec_pass_count > s.occurrence_count) {
        throw SkillError("skill " + s.id() + " has inconsistent counts");
      }
      if (AssignTier(s) != s.tier) {
        throw SkillError("skill " + s.id() + " is labelled " +
                         std::string(TierName(s.tier)) + " but its record says " +
                         std::string(TierName(AssignTier(s))));
      }
      if (s.sec_pass_count == 0 && s.mean_advantage != 0.0) {
        throw SkillError("skill " + s.id() +
                         " has a mean advantage but no passing applications");
      }
      if (lib.entries_.count({s.pattern, s.strategy})) {
        throw SkillError("duplicate skill " + s.id());
      }
      lib.entries_[{s.pattern, s.strategy}] = std::move(s);
    }
    return lib;
  } catch (const json::exception& e) {
    throw SkillError(std::string("malformed skill library: ") + e.what());
  }
}

void SkillLibrary::Export(const std::filesystem::path& path) const {
  WriteFileAtomic(path, CanonicalDump(ToJson()));
}

SkillLibrary SkillLibrary::Import(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw SkillError(path.string() + ": " + e.what());
  }
  return FromJson(j);
}

}  // namespace rtlopt::skills
