#ifndef RTLOPT_EDA_PPA_H_
#define RTLOPT_EDA_PPA_H_

#include "json.hpp"

namespace rtlopt::eda {

// Post-synthesis quality of one design. Slack values are in ns; a negative
// WNS means timing is violated. TNS sums the negative endpoint slacks, so
// tns <= min(wns, 0).
struct PpaMetrics {
  double wns = 0.0;
  double tns = 0.0;
  double area = 0.0;

  // Throws std::invalid_argument when the slack relations do not hold.
  void Validate() const;
  friend bool operator==(const PpaMetrics&, const PpaMetrics&) = default;
};

nlohmann::json ToJson(const PpaMetrics& m);
PpaMetrics PpaMetricsFromJson(const nlohmann::json& j);

}  // namespace rtlopt::eda

#endif  // RTLOPT_EDA_PPA_H_
