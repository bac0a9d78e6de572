#include "rtlopt/timing/timing_report.h"

#include <algorithm>
#include <stdexcept>

namespace rtlopt::timing {

double TimingPath::StageDelaySum() const {
  double sum = 0.0;
  for (const TimingStage& s : stages) sum += s.delay_ns;
  return sum;
}

void TimingReport::Normalize() {
  std::stable_sort(endpoints.begin(), endpoints.end(),
                   [](const TimingPath& a, const TimingPath& b) {
                     if (a.slack_ns != b.slack_ns) return a.slack_ns < b.slack_ns;
                     return a.endpoint < b.endpoint;
                   });
  std::vector<std::string> names;
  for (const TimingPath& p : endpoints) names.push_back(p.endpoint);
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw std::invalid_argument("timing report has duplicate endpoint names");
  }
}

nlohmann::json ToJson(const TimingPath& path) {
  nlohmann::json stages = nlohmann::json::array();
  for (const TimingStage& s : path.stages) {
    nlohmann::json loc = nullptr;
    if (s.line) loc = {{"file", s.file}, {"line", *s.line}};
    stages.push_back(
        {{"node", s.node}, {"op", s.op}, {"delay_ns", s.delay_ns}, {"loc", loc}});
  }
  return {{"startpoint", path.startpoint},
          {"endpoint", path.endpoint},
          {"slack_ns", path.slack_ns},
          {"stages", stages}};
}

nlohmann::json ToJson(const TimingReport& report) {
  nlohmann::json endpoints = nlohmann::json::array();
  for (const TimingPath& p : report.endpoints) endpoints.push_back(ToJson(p));
  return {{"clock_ns", report.clock_ns}, {"endpoints", endpoints}};
}

namespace {

const nlohmann::json& Field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("timing report: missing '") + key +
                                "'");
  }
  return j.at(key);
}

double Number(const nlohmann::json& j, const char* key) {
  const nlohmann::json& v = Field(j, key);
  if (!v.is_number()) {
    throw std::invalid_argument(std::string("timing report: '") + key +
                                "' must be a number");
  }
  return v.get<double>();
}

std::string String(const nlohmann::json& j, const char* key) {
  const nlohmann::json& v = Field(j, key);
  if (!v.is_string()) {
    throw std::invalid_argument(std::string("timing report: '") + key +
                                "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

TimingPath TimingPathFromJson(const nlohmann::json& j) {
  TimingPath p;
  p.startpoint = String(j, "startpoint");
  p.endpoint = String(j, "endpoint");
  p.slack_ns = Number(j, "slack_ns");
  const nlohmann::json& stages = Field(j, "stages");
  if (!stages.is_array()) {
    throw std::invalid_argument("timing report: 'stages' must be an array");
  }
  for (const nlohmann::json& s : stages) {
    TimingStage st;
    st.node = String(s, "node");
    st.op = String(s, "op");
    st.delay_ns = Number(s, "delay_ns");
    if (s.contains("loc") && !s.at("loc").is_null()) {
      const nlohmann::json& loc = s.at("loc");
      st.file = String(loc, "file");
      const nlohmann::json& line = Field(loc, "line");
      if (!line.is_number_integer()) {
        throw std::invalid_argument("timing report: 'line' must be an integer");
      }
      st.line = line.get<int>();
    }
    p.stages.push_back(std::move(st));
  }
  return p;
}

TimingReport TimingReportFromJson(const nlohmann::json& j) {
  TimingReport r;
  r.clock_ns = Number(j, "clock_ns");
  const nlohmann::json& endpoints = Field(j, "endpoints");
  if (!endpoints.is_array()) {
    throw std::invalid_argument("timing report: 'endpoints' must be an array");
  }
  for (const nlohmann::json& e : endpoints) {
    r.endpoints.push_back(TimingPathFromJson(e));
  }
  r.Normalize();
  return r;
}

}  // namespace rtlopt::timing
