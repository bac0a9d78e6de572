#include "rtlopt/scoring/scoring.h"

#include <cmath>
#include <numeric>

#include "rtlopt/common/error.h"

namespace rtlopt::scoring {

void ScoreWeights::Validate() const {
  for (double w : {alpha, beta, gamma}) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ConfigError("score weights must lie in [0, 1]");
    }
  }
  if (!(area_penalty >= 0.0 && area_penalty <= 1.0)) {
    throw ConfigError("area penalty must lie in [0, 1]");
  }
  if (!(area_penalty_threshold > 0.0)) {
    throw ConfigError("area penalty threshold must be > 0");
  }
}

double Normalize(double value, double baseline) {
  if (std::fabs(baseline) < 1e-9) {
    if (std::fabs(value) < 1e-9) return 0.0;
    return value > 0 ? kNormCap : -kNormCap;
  }
  return (value - baseline) / baseline;
}

CandidateScore Score(const eda::PpaMetrics& metrics,
                     const eda::PpaMetrics& baseline,
                     const ScoreWeights& weights) {
  CandidateScore s;
  s.wns_norm = Normalize(metrics.wns, baseline.wns);
  s.tns_norm = Normalize(metrics.tns, baseline.tns);
  s.area_norm = Normalize(metrics.area, baseline.area);
  s.penalty =
      s.area_norm > weights.area_penalty_threshold ? weights.area_penalty : 0.0;
  s.score = weights.alpha * s.wns_norm + weights.beta * s.tns_norm +
            weights.gamma * s.area_norm + s.penalty;
  return s;
}

std::optional<size_t> SelectNext(double parent_score,
                                 const std::vector<Contender>& group) {
  std::optional<size_t> best;
  double best_score = parent_score;
  for (size_t i = 0; i < group.size(); ++i) {
    const Contender& c = group[i];
    if (!c.sec_pass || !c.score) continue;
    if (*c.score < best_score) {
      best = i;
      best_score = *c.score;
    }
  }
  return best;
}

GroupStats GroupAdvantage(const std::vector<double>& scores) {
  GroupStats g;
  g.advantages.assign(scores.size(), 0.0);
  if (scores.empty()) return g;
  const double n = static_cast<double>(scores.size());
  g.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double var = 0.0;
  for (double s : scores) var += (s - g.mean) * (s - g.mean);
  g.stddev = std::sqrt(var / n);
  if (scores.size() <= 1 || g.stddev < 1e-12) return g;
  for (size_t i = 0; i < scores.size(); ++i) {
    g.advantages[i] = (scores[i] - g.mean) / g.stddev;
  }
  return g;
}

nlohmann::json ToJson(const ScoreWeights& w) {
  return {{"alpha", w.alpha},
          {"beta", w.beta},
          {"gamma", w.gamma},
          {"area_penalty", w.area_penalty},
          {"area_penalty_threshold", w.area_penalty_threshold}};
}

ScoreWeights ScoreWeightsFromJson(const nlohmann::json& j) {
  ScoreWeights w;
  for (const auto& [key, value] : j.items()) {
    if (key == "alpha") {
      w.alpha = value.get<double>();
    } else if (key == "beta") {
      w.beta = value.get<double>();
    } else if (key == "gamma") {
      w.gamma = value.get<double>();
    } else if (key == "area_penalty") {
      w.area_penalty = value.get<double>();
    } else if (key == "area_penalty_threshold") {
      w.area_penalty_threshold = value.get<double>();
    } else {
      throw ConfigError("unknown key weights." + key);
    }
  }
  return w;
}

nlohmann::json ToJson(const CandidateScore& s) {
  return {{"wns_norm", s.wns_norm},
          {"tns_norm", s.tns_norm},
          {"area_norm", s.area_norm},
          {"penalty", s.penalty},
          {"score", s.score}};
}

CandidateScore CandidateScoreFromJson(const nlohmann::json& j) {
  CandidateScore s;
  s.wns_norm = j.at("wns_norm").get<double>();
  s.tns_norm = j.at("tns_norm").get<double>();
  s.area_norm = j.at("area_norm").get<double>();
  s.penalty = j.at("penalty").get<double>();
  s.score = j.at("score").get<double>();
  return s;
}

}  // namespace rtlopt::scoring
