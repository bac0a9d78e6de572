#include "rtlopt/eda/ppa.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtlopt::eda {

void PpaMetrics::Validate() const {
  if (!std::isfinite(wns) || !std::isfinite(tns) || !std::isfinite(area)) {
    throw std::invalid_argument("metrics must be finite");
  }
  if (tns > 0.0) throw std::invalid_argument("TNS must be <= 0");
  // Sums of negative slacks may round a hair above the worst one.
  if (tns > std::min(wns, 0.0) + 1e-9) {
    throw std::invalid_argument("TNS must be <= min(WNS, 0)");
  }
  if (wns > 0.0 && tns != 0.0) {
    throw std::invalid_argument("TNS must be 0 when timing is met");
  }
  if (area < 0.0) throw std::invalid_argument("area must be >= 0");
}

nlohmann::json ToJson(const PpaMetrics& m) {
  return {{"wns_ns", m.wns}, {"tns_ns", m.tns}, {"area", m.area}};
}

PpaMetrics PpaMetricsFromJson(const nlohmann::json& j) {
  PpaMetrics m;
  m.wns = j.at("wns_ns").get<double>();
  m.tns = j.at("tns_ns").get<double>();
  m.area = j.at("area").get<double>();
  return m;
}

}  // namespace rtlopt::eda
