#include "rtlopt/eda/backend.h"

#include <chrono>

#include "rtlopt/rtl/errors.h"

namespace rtlopt::eda {

void BackendConfig::Validate() const {
  if (!(clock_ns > 0.0)) {
    throw ConfigError("backend.clock_ns must be > 0");
  }
  if (kind == BackendKind::kExternal) {
    if (external.synth_command.empty()) {
      throw ConfigError("backend.external.synth_command is required");
    }
    if (external.sec_command.empty()) {
      throw ConfigError("backend.external.sec_command is required");
    }
    if (external.wns_pattern.empty() || external.tns_pattern.empty() ||
        external.area_pattern.empty()) {
      throw ConfigError(
          "backend.external needs wns_pattern, tns_pattern and area_pattern");
    }
    if (!(external.timeout_s > 0.0)) {
      throw ConfigError("backend.external.timeout_s must be > 0");
    }
  }
}

std::string_view BackendKindName(BackendKind kind) {
  return kind == BackendKind::kBuiltin ? "builtin" : "external";
}

nlohmann::json ToJson(const BackendConfig& c) {
  nlohmann::json j = {{"kind", BackendKindName(c.kind)}, {"clock_ns", c.clock_ns}};
  if (c.kind == BackendKind::kExternal) {
    const ExternalBackendConfig& e = c.external;
    j["external"] = {{"synth_command", e.synth_command},
                     {"sec_command", e.sec_command},
                     {"wns_pattern", e.wns_pattern},
                     {"tns_pattern", e.tns_pattern},
                     {"area_pattern", e.area_pattern},
                     {"sec_pass_pattern", e.sec_pass_pattern},
                     {"report_files", e.report_files},
                     {"timing_report", e.timing_report},
                     {"design_filename", e.design_filename},
                     {"timeout_s", e.timeout_s}};
  }
  return j;
}

namespace {

ExternalBackendConfig ExternalConfigFromJson(const nlohmann::json& j) {
  ExternalBackendConfig e;
  for (const auto& [key, value] : j.items()) {
    if (key == "synth_command") {
      e.synth_command = value.get<std::string>();
    } else if (key == "sec_command") {
      e.sec_command = value.get<std::string>();
    } else if (key == "wns_pattern") {
      e.wns_pattern = value.get<std::string>();
    } else if (key == "tns_pattern") {
      e.tns_pattern = value.get<std::string>();
    } else if (key == "area_pattern") {
      e.area_pattern = value.get<std::string>();
    } else if (key == "sec_pass_pattern") {
      e.sec_pass_pattern = value.get<std::string>();
    } else if (key == "report_files") {
      e.report_files = value.get<std::vector<std::string>>();
    } else if (key == "timing_report") {
      e.timing_report = value.get<std::string>();
    } else if (key == "design_filename") {
      e.design_filename = value.get<std::string>();
    } else if (key == "timeout_s") {
      e.timeout_s = value.get<double>();
    } else {
      throw ConfigError("unknown key backend.external." + key);
    }
  }
  return e;
}

}  // namespace

BackendConfig BackendConfigFromJson(const nlohmann::json& j) {
  BackendConfig c;
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "builtin") {
      c.kind = BackendKind::kBuiltin;
    } else if (kind == "external") {
      c.kind = BackendKind::kExternal;
      c.clock_ns = kExternalDefaultClockNs;
    } else {
      throw ConfigError("backend.kind must be builtin or external, not " + kind);
    }
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      continue;
    } else if (key == "clock_ns") {
      c.clock_ns = value.get<double>();
    } else if (key == "external") {
      c.external = ExternalConfigFromJson(value);
    } else {
      throw ConfigError("unknown key backend." + key);
    }
  }
  return c;
}

std::string_view SecModeName(SecMode mode) {
  switch (mode) {
    case SecMode::kExhaustive:
      return "exhaustive";
    case SecMode::kBoundedSampled:
      return "bounded-sampled";
    case SecMode::kExternal:
      return "external";
    case SecMode::kSkippedBaseline:
      return "skipped-baseline";
  }
  return "unknown";
}

std::optional<SecMode> ParseSecMode(std::string_view name) {
  for (SecMode m : {SecMode::kExhaustive, SecMode::kBoundedSampled,
                    SecMode::kExternal, SecMode::kSkippedBaseline}) {
    if (SecModeName(m) == name) return m;
  }
  return std::nullopt;
}

nlohmann::json ToJson(const Counterexample& cex) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& v : cex.inputs) inputs.push_back(v);
  return {{"inputs", inputs},
          {"frame", cex.frame},
          {"output", cex.output},
          {"golden_value", cex.golden_value},
          {"candidate_value", cex.candidate_value}};
}

nlohmann::json ToJson(const EvalResult& r) {
  nlohmann::json j = {
      {"metrics", r.metrics ? ToJson(*r.metrics) : nlohmann::json(nullptr)},
      {"sec_pass", r.sec_pass},
      {"sec_mode", SecModeName(r.sec_mode)},
      {"timing_report", timing::ToJson(r.timing_report)},
      {"backend_id", r.backend_id},
      {"error", r.error},
      {"note", r.note}};
  return j;
}

EvalResult EvalResultFromJson(const nlohmann::json& j) {
  EvalResult r;
  if (!j.at("metrics").is_null()) r.metrics = PpaMetricsFromJson(j.at("metrics"));
  r.sec_pass = j.at("sec_pass").get<bool>();
  auto mode = ParseSecMode(j.at("sec_mode").get<std::string>());
  if (!mode) throw std::invalid_argument("unknown sec_mode");
  r.sec_mode = *mode;
  r.timing_report = timing::TimingReportFromJson(j.at("timing_report"));
  r.backend_id = j.at("backend_id").get<std::string>();
  r.error = j.at("error").get<std::string>();
  r.note = j.at("note").get<std::string>();
  return r;
}

EvalResult EdaBackend::Evaluate(const rtl::RtlDesign* golden,
                                const rtl::RtlDesign& candidate) const {
  auto start = std::chrono::steady_clock::now();
  EvalResult r;
  r.backend_id = id();
  r.timing_report.clock_ns = clock_ns();
  auto finish = [&]() -> EvalResult {
    r.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return std::move(r);
  };
  try {
    SynthesisResult s = Synthesize(candidate);
    r.metrics = s.metrics;
    r.timing_report = std::move(s.report);
  } catch (const std::exception& e) {
    r.error = std::string("synthesis failed: ") + e.what();
    return finish();
  }
  if (golden == nullptr) {
    r.sec_mode = SecMode::kSkippedBaseline;
    r.sec_pass = true;
    return finish();
  }
  try {
    EquivalenceResult eq = CheckEquivalence(*golden, candidate);
    r.sec_pass = eq.pass;
    r.sec_mode = eq.mode;
    r.note = eq.note;
    if (eq.counterexample) {
      const Counterexample& c = *eq.counterexample;
      if (!r.note.empty()) r.note += "; ";
      r.note += "counterexample: output '" + c.output + "' differs at frame " +
                std::to_string(c.frame);
    }
  } catch (const rtl::InterfaceMismatchError& e) {
    r.sec_pass = false;
    r.note = std::string("interface mismatch: ") + e.what();
  } catch (const std::exception& e) {
    r.sec_pass = false;
    r.note = std::string("equivalence check failed: ") + e.what();
  }
  return finish();
}

}  // namespace rtlopt::eda
