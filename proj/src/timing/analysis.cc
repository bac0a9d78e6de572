#include "rtlopt/timing/analysis.h"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rtlopt::timing {

using rtl::Expr;
using rtl::Op;

std::vector<TimingPath> SelectCriticalPaths(const TimingReport& report, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<TimingPath> paths = report.endpoints;
  std::stable_sort(paths.begin(), paths.end(),
                   [](const TimingPath& a, const TimingPath& b) {
                     if (a.slack_ns != b.slack_ns) return a.slack_ns < b.slack_ns;
                     return a.endpoint < b.endpoint;
                   });
  if (paths.size() > static_cast<size_t>(k)) paths.resize(k);
  return paths;
}

std::string_view RegionConfidenceName(RegionConfidence c) {
  switch (c) {
    case RegionConfidence::kExact:
      return "exact";
    case RegionConfidence::kHeuristic:
      return "heuristic";
    case RegionConfidence::kHeuristicFailed:
      return "heuristic-failed";
  }
  return "unknown";
}

std::string StripSynthesisSuffixes(std::string_view name) {
  std::string s(name);
  while (!s.empty() && s.back() == ']') {
    size_t open = s.rfind('[');
    if (open == std::string::npos) break;
    s.erase(open);
  }
  for (std::string_view suffix : {"_reg", "_q"}) {
    if (s.size() > suffix.size() &&
        s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.erase(s.size() - suffix.size());
    }
  }
  return s;
}

namespace {

int CountLines(const std::string& text) {
  int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  if (!text.empty() && text.back() != '\n') ++lines;
  return std::max(lines, 1);
}

std::string_view Owner(std::string_view node_id) {
  return node_id.substr(0, node_id.rfind('#'));
}

// Identifier tokens of a netlist name such as "u_core/state_reg[2]".
std::vector<std::string> NameTokens(std::string_view name) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    std::string t = StripSynthesisSuffixes(current);
    if (!t.empty() && !std::isdigit(static_cast<unsigned char>(t[0]))) {
      tokens.push_back(t);
    }
    current.clear();
  };
  for (size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '[') {
      size_t close = name.find(']', i);
      if (close == std::string_view::npos) break;
      i = close;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      current += c;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

RtlRegion HeuristicRegion(const TimingPath& path, const rtl::RtlDesign& design) {
  RtlRegion region;
  region.file = design.file();
  std::vector<std::string> tokens = NameTokens(path.startpoint);
  for (std::string& t : NameTokens(path.endpoint)) tokens.push_back(std::move(t));
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

  int lo = 0;
  int hi = 0;
  std::istringstream in(design.source());
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    for (const std::string& t : tokens) {
      std::regex word("(^|[^A-Za-z0-9_$])" +
                      std::regex_replace(t, std::regex(R"([$])"), R"(\$&)") +
                      "($|[^A-Za-z0-9_$])");
      if (std::regex_search(line, word)) {
        if (lo == 0) lo = n;
        hi = n;
        break;
      }
    }
  }
  if (lo == 0) {
    region.start_line = 1;
    region.end_line = CountLines(design.source());
    region.confidence = RegionConfidence::kHeuristicFailed;
  } else {
    region.start_line = lo;
    region.end_line = hi;
    region.confidence = RegionConfidence::kHeuristic;
  }
  return region;
}

const Expr* EndpointRoot(const TimingPath& path, const rtl::RtlDesign& design) {
  if (const rtl::Assign* a = design.FindAssign(path.endpoint)) return a->value.get();
  if (const rtl::Register* r = design.FindRegister(path.endpoint)) {
    return r->next.get();
  }
  return nullptr;
}

}  // namespace

RtlRegion MapPathToRtl(const TimingPath& path, const rtl::RtlDesign& design) {
  RtlRegion region;
  region.file = design.file();
  bool any = false;
  for (const TimingStage& s : path.stages) {
    if (!s.line) continue;
    if (!s.file.empty()) region.file = s.file;
    region.start_line = any ? std::min(region.start_line, *s.line) : *s.line;
    region.end_line = any ? std::max(region.end_line, *s.line) : *s.line;
    any = true;
  }
  if (any) return region;
  // A path without logic maps to the statement driving its endpoint.
  if (design.is_parsed()) {
    for (const rtl::StatementRef& s : design.Statements()) {
      if (s.owner == path.endpoint) {
        region.start_line = region.end_line = s.loc.line;
        return region;
      }
    }
  }
  return HeuristicRegion(path, design);
}

namespace {

struct PathFacts {
  std::vector<const Expr*> nodes;  // resolved stage nodes, launch first
  std::set<std::string> drivers;   // startpoint and intermediate nets
};

// Facts about an endpoint's combinational fan-in cone, expanded through
// nets up to inputs and registers. Route counts saturate at 2.
struct ConeFacts {
  std::set<const Expr*> compares;
  std::map<std::string, int> leaf_routes;

  void Merge(const ConeFacts& other) {
    compares.insert(other.compares.begin(), other.compares.end());
    for (const auto& [name, n] : other.leaf_routes) {
      leaf_routes[name] = std::min(leaf_routes[name] + n, 2);
    }
  }
};

class ConeCollector {
 public:
  explicit ConeCollector(const rtl::RtlDesign& design) : design_(design) {}

  ConeFacts Collect(const Expr& e) {
    ConeFacts facts;
    if (e.op == Op::kVar) {
      if (const rtl::Assign* a = design_.FindAssign(e.name)) {
        auto it = nets_.find(e.name);
        if (it == nets_.end()) {
          it = nets_.emplace(e.name, Collect(*a->value)).first;
        }
        facts.Merge(it->second);
      } else {
        facts.leaf_routes[e.name] = 1;
      }
      return facts;
    }
    if (e.op == Op::kEq) facts.compares.insert(&e);
    for (const rtl::ExprPtr& c : e.operands) facts.Merge(Collect(*c));
    return facts;
  }

 private:
  const rtl::RtlDesign& design_;
  std::map<std::string, ConeFacts, std::less<>> nets_;
};

std::map<std::string, int> Fanouts(const rtl::RtlDesign& design) {
  std::map<std::string, int> out;
  for (const rtl::StatementRef& s : design.Statements()) {
    rtl::VisitPreorder(*s.root, [&](const Expr& n, int) {
      if (n.op == Op::kVar) ++out[n.name];
    });
  }
  return out;
}

bool IsRegisterVersusConstant(const Expr& eq, const rtl::RtlDesign& design) {
  const Expr& a = *eq.operands[0];
  const Expr& b = *eq.operands[1];
  auto is_reg = [&](const Expr& x) {
    return x.op == Op::kVar && design.FindRegister(x.name) != nullptr;
  };
  return (is_reg(a) && b.op == Op::kConst) || (is_reg(b) && a.op == Op::kConst);
}

std::string FormatStage(const TimingStage& s, const Expr* node) {
  std::string out = s.op + " " + s.node;
  if (node != nullptr) out += " (" + std::to_string(node->OperandWidth()) + "-bit)";
  return out;
}

}  // namespace

BottleneckDiagnosis Diagnose(const TimingPath& path,
                             const rtl::RtlDesign& design) {
  BottleneckDiagnosis d;
  d.path = path;
  d.region = MapPathToRtl(path, design);

  PathFacts facts;
  facts.drivers.insert(path.startpoint);
  for (const TimingStage& s : path.stages) {
    facts.nodes.push_back(design.FindNode(s.node));
    std::string_view owner = Owner(s.node);
    if (owner != path.endpoint && design.FindAssign(owner) != nullptr) {
      facts.drivers.insert(std::string(owner));
    }
  }
  auto op_of = [&](size_t i) -> std::optional<Op> {
    if (facts.nodes[i] != nullptr) return facts.nodes[i]->op;
    return rtl::ParseOpName(path.stages[i].op);
  };
  auto label = [&](RootCause cause, PatternId pattern, std::string evidence) {
    d.root_cause = cause;
    d.pattern = pattern;
    d.evidence = std::move(evidence);
    return d;
  };

  // (1) Wide arithmetic: one wide carry chain, or narrow ones in series whose
  // carry chains add up to the same length.
  int arith_bits = 0;
  std::vector<std::string> arith;
  for (size_t i = 0; i < path.stages.size(); ++i) {
    const Expr* n = facts.nodes[i];
    if (n == nullptr) continue;
    if (n->op != Op::kAdd && n->op != Op::kSub && n->op != Op::kLt) continue;
    int w = n->OperandWidth();
    arith_bits += w;
    arith.push_back(FormatStage(path.stages[i], n));
    if (w >= kWideArithmeticBits) {
      return label(RootCause::kWideArithmetic, PatternId::kWideArithmetic,
                 "carry chain of " + FormatStage(path.stages[i], n));
    }
  }
  if (arith_bits >= kWideArithmeticBits) {
    std::string ev = std::to_string(arith.size()) +
                     " arithmetic stages in series, " +
                     std::to_string(arith_bits) + " carry bits:";
    for (const std::string& a : arith) ev += " " + a;
    return label(RootCause::kWideArithmetic, PatternId::kWideArithmetic, ev);
  }

  ConeFacts cone;
  const Expr* root = design.is_parsed() ? EndpointRoot(path, design) : nullptr;
  if (root != nullptr) cone = ConeCollector(design).Collect(*root);

  // (2) Chain of comparisons feeding one endpoint.
  if (static_cast<int>(cone.compares.size()) >= kCompareChainLength) {
    bool decode = std::any_of(cone.compares.begin(), cone.compares.end(),
                              [&](const Expr* e) {
                                return IsRegisterVersusConstant(*e, design);
                              });
    return label(RootCause::kWideCompare,
               decode ? PatternId::kDeepDecodeFsm : PatternId::kWideComparison,
               std::to_string(cone.compares.size()) +
                   " equality comparisons feed endpoint " + path.endpoint +
                   (decode ? " (state register decoded against constants)"
                           : ""));
  }

  // (3) Consecutive multiplexers.
  int run = 0;
  int best_run = 0;
  for (size_t i = 0; i < path.stages.size(); ++i) {
    run = op_of(i) == Op::kMux ? run + 1 : 0;
    best_run = std::max(best_run, run);
  }
  if (best_run >= kMuxCascadeLength) {
    return label(RootCause::kMuxCascade, PatternId::kMuxHeavySelection,
               std::to_string(best_run) + " multiplexers in series");
  }

  // (4) A driver on the path with high structural fanout.
  if (design.is_parsed()) {
    std::map<std::string, int> fanout = Fanouts(design);
    for (const std::string& driver : facts.drivers) {
      auto it = fanout.find(driver);
      if (it != fanout.end() && it->second >= kHighFanout) {
        return label(RootCause::kHighFanout, PatternId::kHighFanoutControl,
                   driver + " drives " + std::to_string(it->second) + " sinks");
      }
    }
  }

  // (5) A 1-bit control signal selecting wide data.
  for (size_t i = 0; i < path.stages.size(); ++i) {
    const Expr* n = facts.nodes[i];
    if (n == nullptr || n->op != Op::kMux) continue;
    if (n->operands[0]->width == 1 && n->OperandWidth() >= kCouplingDataBits) {
      return label(RootCause::kControlDataCoupling,
                 PatternId::kControlDataCoupling,
                 "1-bit condition gates " + FormatStage(path.stages[i], n));
    }
  }

  // (6) A source reaching the endpoint along more than one route.
  for (const auto& [name, routes] : cone.leaf_routes) {
    if (routes >= 2) {
      return label(RootCause::kReconvergent, PatternId::kReconvergentLogic,
                 name + " reaches " + path.endpoint + " along more than one route");
    }
  }

  // (7) Depth.
  const int stages = static_cast<int>(path.stages.size());
  label(RootCause::kExcessiveDepth, PatternId::kExcessiveDepth,
      std::to_string(stages) + " logic stages");
  if (stages < kDeepPathStages) {
    d.severity = Severity::kLow;
    d.evidence += "; no dominant structural cause";
  }
  return d;
}

nlohmann::json ToJson(const RtlRegion& region) {
  return {{"file", region.file},
          {"start_line", region.start_line},
          {"end_line", region.end_line},
          {"confidence", RegionConfidenceName(region.confidence)}};
}

nlohmann::json ToJson(const BottleneckDiagnosis& diagnosis) {
  return {{"path", ToJson(diagnosis.path)},
          {"pattern", PatternName(diagnosis.pattern)},
          {"root_cause", RootCauseName(diagnosis.root_cause)},
          {"severity", diagnosis.severity == Severity::kLow ? "low" : "normal"},
          {"rtl_region", ToJson(diagnosis.region)},
          {"evidence", diagnosis.evidence}};
}

RtlRegion RtlRegionFromJson(const nlohmann::json& j) {
  RtlRegion r;
  r.file = j.at("file").get<std::string>();
  r.start_line = j.at("start_line").get<int>();
  r.end_line = j.at("end_line").get<int>();
  const std::string c = j.at("confidence").get<std::string>();
  if (c == "exact") {
    r.confidence = RegionConfidence::kExact;
  } else if (c == "heuristic") {
    r.confidence = RegionConfidence::kHeuristic;
  } else if (c == "heuristic-failed") {
    r.confidence = RegionConfidence::kHeuristicFailed;
  } else {
    throw std::invalid_argument("unknown region confidence '" + c + "'");
  }
  return r;
}

BottleneckDiagnosis BottleneckDiagnosisFromJson(const nlohmann::json& j) {
  BottleneckDiagnosis d;
  d.path = TimingPathFromJson(j.at("path"));
  auto pattern = ParsePattern(j.at("pattern").get<std::string>());
  auto cause = ParseRootCause(j.at("root_cause").get<std::string>());
  if (!pattern || !cause) throw std::invalid_argument("unknown pattern or root cause");
  d.pattern = *pattern;
  d.root_cause = *cause;
  d.severity = j.at("severity").get<std::string>() == "low" ? Severity::kLow
                                                           : Severity::kNormal;
  d.region = RtlRegionFromJson(j.at("rtl_region"));
  d.evidence = j.at("evidence").get<std::string>();
  return d;
}

}  // namespace rtlopt::timing
