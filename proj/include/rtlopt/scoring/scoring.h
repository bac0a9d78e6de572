#ifndef RTLOPT_SCORING_SCORING_H_
#define RTLOPT_SCORING_SCORING_H_

#include <optional>
#include <vector>

#include "json.hpp"
#include "rtlopt/eda/ppa.h"

namespace rtlopt::scoring {

// Bound applied when a baseline metric is zero.
inline constexpr double kNormCap = 10.0;

struct ScoreWeights {
  double alpha = 0.5;   // WNS
  double beta = 0.35;   // TNS
  double gamma = 0.15;  // area
  double area_penalty = 0.5;
  double area_penalty_threshold = 0.1;

  void Validate() const;  // throws ConfigError
};

struct CandidateScore {
  double wns_norm = 0.0;
  double tns_norm = 0.0;
  double area_norm = 0.0;
  double penalty = 0.0;
  double score = 0.0;

  friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

// Relative change against the baseline. A zero baseline maps zero to 0 and
// anything else to +-kNormCap.
double Normalize(double value, double baseline);

// Weighted normalized PPA plus the area penalty. Lower is better.
CandidateScore Score(const eda::PpaMetrics& metrics,
                     const eda::PpaMetrics& baseline,
                     const ScoreWeights& weights = {});

// One candidate as seen by the selection rule.
struct Contender {
  bool sec_pass = false;
  std::optional<double> score;  // empty when evaluation failed
};

// Index of the SEC-passing candidate with the lowest score, provided it
// beats `parent_score` strictly; ties go to the smallest index. Empty means
// the parent stays.
std::optional<size_t> SelectNext(double parent_score,
                                 const std::vector<Contender>& group);

struct GroupStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::vector<double> advantages;
};

// Standardized scores. Groups of at most one, or with stddev below 1e-12,
// get all-zero advantages.
GroupStats GroupAdvantage(const std::vector<double>& scores);

nlohmann::json ToJson(const ScoreWeights& w);
ScoreWeights ScoreWeightsFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const CandidateScore& s);
CandidateScore CandidateScoreFromJson(const nlohmann::json& j);

}  // namespace rtlopt::scoring

#endif  // RTLOPT_SCORING_SCORING_H_
