#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rtlopt/eda/builtin_backend.h"
#include "rtlopt/rtl/errors.h"
#include "rtlopt/rtl/parser.h"

namespace rtlopt::eda {

using rtl::Expr;
using rtl::Op;

namespace {

int CeilLog2(int w) {
  int bits = 0;
  while ((1 << bits) < w) ++bits;
  return bits;
}

double ToNs(int64_t ps) { return static_cast<double>(ps) / 1000.0; }

}  // namespace

int64_t NodeDelayPs(const Expr& e) {
  const int w = e.OperandWidth();
  switch (e.op) {
    case Op::kConst:
    case Op::kVar:
      return 0;
    case Op::kNot:
    case Op::kSlice:
    case Op::kShl:
    case Op::kShr:
      return 50;
    case Op::kAnd:
    case Op::kOr:
    case Op::kXor:
      return 100;
    case Op::kMux:
      return 150;
    case Op::kEq:
      return 50 + 20 * CeilLog2(w);
    case Op::kLt:
    case Op::kAdd:
    case Op::kSub:
      return 50 + 20 * static_cast<int64_t>(w);
  }
  return 0;
}

double NodeArea(const Expr& e) {
  const double w = e.OperandWidth();
  switch (e.op) {
    case Op::kNot:
      return 1.0;
    case Op::kAnd:
    case Op::kOr:
    case Op::kXor:
      return 2.0 * w;
    case Op::kMux:
      return 3.0 * w;
    case Op::kEq:
    case Op::kLt:
      return 2.0 * w;
    case Op::kAdd:
    case Op::kSub:
      return 4.0 * w;
    default:
      return 0.0;
  }
}

double RegisterArea(int width) { return 6.0 * width; }

namespace {

class TimingAnalyzer {
 public:
  explicit TimingAnalyzer(const rtl::RtlDesign& design) : design_(design) {
    for (const rtl::StatementRef& s : design.Statements()) {
      rtl::VisitPreorder(*s.root, [&](const Expr& n, int i) {
        node_ids_[&n] = rtl::NodeId(s.owner, i);
      });
    }
    for (size_t i : design.assign_order()) {
      const rtl::Assign& a = design.assigns()[i];
      net_arrival_[a.target] = Arrival(*a.value);
    }
  }

  // Longest combinational delay from any startpoint to `e`, excluding
  // clock-to-q.
  int64_t Arrival(const Expr& e) {
    auto memo = arrival_.find(&e);
    if (memo != arrival_.end()) return memo->second;
    int64_t t = 0;
    if (e.op == Op::kVar) {
      auto it = net_arrival_.find(e.name);
      t = it == net_arrival_.end() ? 0 : it->second;
    } else if (e.op != Op::kConst) {
      int64_t worst = 0;
      for (const rtl::ExprPtr& c : e.operands) worst = std::max(worst, Arrival(*c));
      t = worst + NodeDelayPs(e);
    }
    arrival_[&e] = t;
    return t;
  }

  timing::TimingPath TracePath(const std::string& endpoint, const Expr& root,
                               int64_t clock_ps) {
    timing::TimingPath path;
    path.endpoint = endpoint;
    const int64_t delay = kClockToQPs + Arrival(root) + kSetupPs;
    path.slack_ns = ToNs(clock_ps - delay);
    const Expr* e = &root;
    while (true) {
      if (e->op == Op::kVar) {
        if (const rtl::Assign* a = design_.FindAssign(e->name)) {
          e = a->value.get();
          continue;
        }
        path.startpoint = e->name;
        break;
      }
      if (e->op == Op::kConst) {
        path.startpoint = rtl::PrintExpr(*e);
        break;
      }
      timing::TimingStage st;
      st.node = node_ids_.at(e);
      st.op = std::string(rtl::OpName(e->op));
      st.delay_ns = ToNs(NodeDelayPs(*e));
      st.file = design_.file();
      st.line = e->loc.line;
      path.stages.push_back(std::move(st));
      const Expr* next = e->operands[0].get();
      int64_t best = Arrival(*next);
      for (size_t i = 1; i < e->operands.size(); ++i) {
        int64_t t = Arrival(*e->operands[i]);
        if (t > best) {
          best = t;
          next = e->operands[i].get();
        }
      }
      e = next;
    }
    std::reverse(path.stages.begin(), path.stages.end());
    return path;
  }

 private:
  const rtl::RtlDesign& design_;
  std::unordered_map<const Expr*, std::string> node_ids_;
  std::unordered_map<const Expr*, int64_t> arrival_;
  std::unordered_map<std::string, int64_t> net_arrival_;
};

}  // namespace

SynthesisResult AnalyzeTiming(const rtl::RtlDesign& design, double clock_ns) {
  if (!design.is_parsed()) {
    throw BackendError("the built-in backend needs an RTL-lite design");
  }
  if (!(clock_ns > 0.0)) throw BackendError("clock period must be > 0");
  const int64_t clock_ps = std::llround(clock_ns * 1000.0);

  TimingAnalyzer sta(design);
  SynthesisResult out;
  out.report.clock_ns = clock_ns;
  for (const rtl::Port& p : design.ports()) {
    if (p.direction != rtl::PortDirection::kOutput) continue;
    out.report.endpoints.push_back(
        sta.TracePath(p.name, *design.FindAssign(p.name)->value, clock_ps));
  }
  for (const rtl::Register& r : design.registers()) {
    out.report.endpoints.push_back(sta.TracePath(r.name, *r.next, clock_ps));
  }
  out.report.Normalize();

  int64_t tns_ps = 0;
  int64_t wns_ps = clock_ps;
  bool any = false;
  for (const timing::TimingPath& p : out.report.endpoints) {
    int64_t slack_ps = std::llround(p.slack_ns * 1000.0);
    wns_ps = any ? std::min(wns_ps, slack_ps) : slack_ps;
    any = true;
    tns_ps += std::min<int64_t>(slack_ps, 0);
  }
  out.metrics.wns = ToNs(wns_ps);
  out.metrics.tns = ToNs(tns_ps);

  double area = 0.0;
  for (const rtl::StatementRef& s : design.Statements()) {
    rtl::VisitPreorder(*s.root, [&](const Expr& n, int) { area += NodeArea(n); });
  }
  for (const rtl::Register& r : design.registers()) area += RegisterArea(r.width);
  out.metrics.area = area;
  return out;
}

BuiltinBackend::BuiltinBackend(double clock_ns, SecOptions sec)
    : clock_ns_(clock_ns), sec_(sec) {}

SynthesisResult BuiltinBackend::Synthesize(const rtl::RtlDesign& design) const {
  return AnalyzeTiming(design, clock_ns_);
}

EquivalenceResult BuiltinBackend::CheckEquivalence(
    const rtl::RtlDesign& golden, const rtl::RtlDesign& candidate) const {
  return CheckEquivalenceBuiltin(golden, candidate, sec_);
}

}  // namespace rtlopt::eda
