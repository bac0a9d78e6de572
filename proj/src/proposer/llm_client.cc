#include "rtlopt/proposer/llm_client.h"

#include <cmath>
#include <cstdlib>
#include <regex>

#include "httplib.h"
#include "rtlopt/common/canonical_json.h"
#include "rtlopt/common/error.h"
#include "rtlopt/rtl/errors.h"
#include "rtlopt/rtl/parser.h"

namespace rtlopt::proposer {

using nlohmann::json;

void LlmConfig::Validate() const {
  if (base_url.empty() != model.empty()) {
    throw ConfigError("proposer.llm needs both base_url and model");
  }
  if (!base_url.empty() &&
      !std::regex_match(base_url, std::regex(R"(https?://[^/\s]+(/\S*)?)"))) {
    throw ConfigError("proposer.llm.base_url must be an http(s) URL: " +
                      base_url);
  }
  if (!(timeout_s > 0)) throw ConfigError("proposer.llm.timeout_s must be > 0");
  if (max_retries < 0) throw ConfigError("proposer.llm.max_retries must be >= 0");
}

json ToJson(const LlmConfig& c) {
  return {{"base_url", c.base_url},
          {"model", c.model},
          {"api_key_env", c.api_key_env},
          {"timeout_s", c.timeout_s},
          {"max_retries", c.max_retries}};
}

LlmConfig LlmConfigFromJson(const json& j) {
  LlmConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "base_url") {
      c.base_url = value.get<std::string>();
    } else if (key == "model") {
      c.model = value.get<std::string>();
    } else if (key == "api_key_env") {
      c.api_key_env = value.get<std::string>();
    } else if (key == "timeout_s") {
      c.timeout_s = value.get<double>();
    } else if (key == "max_retries") {
      c.max_retries = value.get<int>();
    } else {
      throw ConfigError("unknown key proposer.llm." + key);
    }
  }
  return c;
}

namespace {

const std::regex& FenceRegex() {
  static const std::regex re(R"(```[A-Za-z0-9_-]*[ \t]*\r?\n([\s\S]*?)```)");
  return re;
}

// Reply text with fenced blocks removed.
std::string OutsideCode(std::string_view reply) {
  return std::regex_replace(std::string(reply), FenceRegex(), "");
}

std::string Trim(std::string s) {
  const char* ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // request path of the chat-completions call
};

Endpoint SplitUrl(const std::string& base_url) {
  std::smatch m;
  std::regex_match(base_url, m, std::regex(R"((https?://[^/]+)(/.*)?)"));
  std::string path = m[2].matched ? m[2].str() : "";
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {m[1].str(), path + "/chat/completions"};
}

}  // namespace

std::optional<std::string> ExtractCodeBlock(std::string_view reply) {
  std::string text(reply);
  std::smatch m;
  if (!std::regex_search(text, m, FenceRegex())) return std::nullopt;
  return m[1].str();
}

std::optional<StrategyId> ExtractStrategy(std::string_view reply) {
  std::string text = OutsideCode(reply);
  std::smatch m;
  static const std::regex re(R"((?:^|\n)\s*Strategy:\s*([A-Za-z-]+))");
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return ParseStrategy(m[1].str());
}

LlmClient::LlmClient(LlmConfig config) : config_(std::move(config)) {
  config_.Validate();
}

json LlmClient::BuildRequest(const rtl::RtlDesign& parent,
                             const timing::BottleneckDiagnosis& diagnosis,
                             const skills::SkillMatch& match) const {
  std::string system =
      "You optimize the timing of RTL-lite hardware modules. Rewrite the "
      "module to shorten its critical path while keeping it cycle-for-cycle "
      "equivalent: same ports, same latency, same register reset state. "
      "Answer with exactly one fenced code block holding the complete "
      "rewritten module, no diffs. You may add one line "
      "'Strategy: <name>' outside the block naming the principle used, one "
      "of:";
  for (int s = 0; s <= static_cast<int>(StrategyId::kConstantFold); ++s) {
    system += " " + std::string(StrategyName(static_cast<StrategyId>(s)));
  }
  system += ".";

  std::string user = "Module:\n```\n" + parent.source() + "```\n\n";
  user += "Critical path: " + diagnosis.path.startpoint + " -> " +
          diagnosis.path.endpoint + ", slack " +
          std::to_string(diagnosis.path.slack_ns) + " ns, lines " +
          std::to_string(diagnosis.region.start_line) + "-" +
          std::to_string(diagnosis.region.end_line) + ".\n";
  user += "Bottleneck: " + std::string(PatternName(diagnosis.pattern)) +
          " (" + std::string(RootCauseName(diagnosis.root_cause)) + "). " +
          diagnosis.evidence + "\n";
  if (!match.recommended.empty()) {
    user += "\nTransformations that worked on this bottleneck before:\n";
    for (const skills::Skill& s : match.recommended) {
      user += "- " + std::string(StrategyName(s.strategy)) + " (" +
              std::string(skills::TierName(s.tier)) + "): " + s.template_text +
              "\n";
    }
  }
  if (!match.prohibited.empty()) {
    user += "\nDo not use these transformations; they failed here before:\n";
    for (const skills::Skill& s : match.prohibited) {
      user += "- " + std::string(StrategyName(s.strategy)) + "\n";
    }
  }
  return {{"model", config_.model},
          {"temperature", 0},
          {"messages",
           json::array({{{"role", "system"}, {"content", system}},
                        {{"role", "user"}, {"content", user}}})}};
}

LlmOutcome LlmClient::Propose(
    const rtl::RtlDesign& parent, const timing::BottleneckDiagnosis& diagnosis,
    const skills::SkillMatch& match,
    const std::filesystem::path& transcript_prefix) const {
  LlmOutcome out;
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    out.error = "credential variable " + config_.api_key_env + " is not set";
    return out;
  }
  const json request = BuildRequest(parent, diagnosis, match);
  const Endpoint endpoint = SplitUrl(config_.base_url);
  const std::string parent_text = rtl::Print(parent);

  for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
    out.attempts = attempt;
    json transcript = {{"attempt", attempt},
                       {"url", endpoint.origin + endpoint.path},
                       {"request", request}};
    std::string verdict;
    std::string content;
    {
      httplib::Client client(endpoint.origin);
      const auto sec = static_cast<time_t>(config_.timeout_s);
      const auto usec =
          static_cast<time_t>((config_.timeout_s - sec) * 1e6);
      client.set_connection_timeout(sec, usec);
      client.set_read_timeout(sec, usec);
      client.set_write_timeout(sec, usec);
      httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
      httplib::Result res = client.Post(endpoint.path, headers, request.dump(),
                                        "application/json");
      if (!res) {
        verdict = "transport error: " + httplib::to_string(res.error());
      } else {
        transcript["status"] = res->status;
        transcript["response"] = res->body;
        if (res->status != 200) {
          verdict = "HTTP status " + std::to_string(res->status);
        } else {
          try {
            content = json::parse(res->body)
                          .at("choices")
                          .at(0)
                          .at("message")
                          .at("content")
                          .get<std::string>();
          } catch (const json::exception& e) {
            verdict = std::string("malformed response: ") + e.what();
          }
        }
      }
    }
    if (verdict.empty()) {
      std::optional<std::string> code = ExtractCodeBlock(content);
      if (!code) {
        verdict = "reply has no fenced code block";
      } else {
        try {
          rtl::RtlDesign design = rtl::Parse(*code, parent.file());
          if (!design.SameInterface(parent)) {
            verdict = "interface mismatch: the reply changes the port list";
          } else if (rtl::Print(design) == parent_text) {
            verdict = "reply repeats the parent design";
          } else {
            out.design = std::move(design);
            out.strategy = ExtractStrategy(content);
            out.rationale = Trim(OutsideCode(content));
            verdict = "accepted";
          }
        } catch (const rtl::RtlError& e) {
          verdict = std::string("reply does not parse: ") + e.what();
        }
      }
    }
    transcript["verdict"] = verdict;
    if (!transcript_prefix.empty()) {
      std::filesystem::path file = transcript_prefix;
      file += "-a" + std::to_string(attempt) + ".json";
      WriteFileAtomic(file, CanonicalDump(transcript));
      out.transcripts.push_back(file);
    }
    if (out.design) {
      out.error.clear();
      return out;
    }
    out.error = verdict;
  }
  return out;
}

}  // namespace rtlopt::proposer
