#ifndef RTLOPT_TIMING_TIMING_REPORT_H_
#define RTLOPT_TIMING_TIMING_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rtlopt::timing {

// One combinational stage of a timing path.
struct TimingStage {
  std::string node;  // "<owner>#<index>" for built-in paths, tool name otherwise
  std::string op;    // operator name, e.g. "add"
  double delay_ns = 0.0;
  std::string file;
  std::optional<int> line;  // absent when the stage has no RTL location

  friend bool operator==(const TimingStage&, const TimingStage&) = default;
};

struct TimingPath {
  std::string startpoint;
  std::string endpoint;
  double slack_ns = 0.0;
  std::vector<TimingStage> stages;  // launch to capture order

  double StageDelaySum() const;
  friend bool operator==(const TimingPath&, const TimingPath&) = default;
};

// All endpoints, worst slack first; ties ordered by endpoint name.
struct TimingReport {
  double clock_ns = 0.0;
  std::vector<TimingPath> endpoints;

  // Sorts endpoints and checks endpoint names are unique. Throws
  // std::invalid_argument on duplicates.
  void Normalize();
  friend bool operator==(const TimingReport&, const TimingReport&) = default;
};

// Canonical interchange schema:
// {clock_ns, endpoints:[{startpoint, endpoint, slack_ns,
//   stages:[{node, op, delay_ns, loc:{file, line}}]}]}
nlohmann::json ToJson(const TimingReport& report);
nlohmann::json ToJson(const TimingPath& path);
// Throws std::invalid_argument on schema violations.
TimingReport TimingReportFromJson(const nlohmann::json& j);
TimingPath TimingPathFromJson(const nlohmann::json& j);

}  // namespace rtlopt::timing

#endif  // RTLOPT_TIMING_TIMING_REPORT_H_
