#include "rtlopt/rtl/ast.h"

#include <algorithm>
#include <regex>

#include "rtlopt/rtl/errors.h"

namespace rtlopt::rtl {

std::string_view OpName(Op op) {
  switch (op) {
    case Op::kConst:
      return "const";
    case Op::kVar:
      return "var";
    case Op::kNot:
      return "not";
    case Op::kAnd:
      return "and";
    case Op::kOr:
      return "or";
    case Op::kXor:
      return "xor";
    case Op::kAdd:
      return "add";
    case Op::kSub:
      return "sub";
    case Op::kEq:
      return "eq";
    case Op::kLt:
      return "lt";
    case Op::kShl:
      return "shl_const";
    case Op::kShr:
      return "shr_const";
    case Op::kSlice:
      return "slice";
    case Op::kMux:
      return "mux";
  }
  return "unknown";
}

std::optional<Op> ParseOpName(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Op::kMux); ++i) {
    Op op = static_cast<Op>(i);
    if (OpName(op) == name) return op;
  }
  return std::nullopt;
}

int Expr::OperandWidth() const {
  switch (op) {
    case Op::kConst:
    case Op::kVar:
      return width;
    case Op::kMux:
      return operands[1]->width;
    default:
      return operands[0]->width;
  }
}

uint64_t WidthMask(int width) {
  return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
}

ExprPtr MakeConst(int width, uint64_t value, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kConst;
  e->width = width;
  e->value = value & WidthMask(width);
  e->loc = loc;
  return e;
}

ExprPtr MakeVar(std::string name, int width, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kVar;
  e->width = width;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}

ExprPtr MakeNot(ExprPtr a, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kNot;
  e->width = a->width;
  e->operands = {std::move(a)};
  e->loc = loc;
  return e;
}

ExprPtr MakeBinary(Op op, ExprPtr a, ExprPtr b, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->width = (op == Op::kEq || op == Op::kLt) ? 1 : a->width;
  e->operands = {std::move(a), std::move(b)};
  e->loc = loc;
  return e;
}

ExprPtr MakeShift(Op op, ExprPtr a, int amount, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->width = a->width;
  e->amount = amount;
  e->operands = {std::move(a)};
  e->loc = loc;
  return e;
}

ExprPtr MakeSlice(ExprPtr a, int hi, int lo, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kSlice;
  e->width = hi - lo + 1;
  e->hi = hi;
  e->lo = lo;
  e->operands = {std::move(a)};
  e->loc = loc;
  return e;
}

ExprPtr MakeMux(ExprPtr cond, ExprPtr then_value, ExprPtr else_value,
                SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->op = Op::kMux;
  e->width = then_value->width;
  e->operands = {std::move(cond), std::move(then_value),
                 std::move(else_value)};
  e->loc = loc;
  return e;
}

ExprPtr WithOperands(const Expr& e, std::vector<ExprPtr> operands) {
  auto copy = std::make_shared<Expr>(e);
  copy->operands = std::move(operands);
  return copy;
}

bool StructurallyEqual(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.op != b.op || a.width != b.width || a.value != b.value ||
      a.name != b.name || a.hi != b.hi || a.lo != b.lo ||
      a.amount != b.amount || a.operands.size() != b.operands.size()) {
    return false;
  }
  for (size_t i = 0; i < a.operands.size(); ++i) {
    if (!StructurallyEqual(*a.operands[i], *b.operands[i])) return false;
  }
  return true;
}

int CountOperators(const Expr& e) {
  if (e.is_leaf()) return 0;
  int n = 1;
  for (const ExprPtr& c : e.operands) n += CountOperators(*c);
  return n;
}

int OperatorDepth(const Expr& e) {
  if (e.is_leaf()) return 0;
  int d = 0;
  for (const ExprPtr& c : e.operands) d = std::max(d, OperatorDepth(*c));
  return d + 1;
}

std::string NodeId(std::string_view owner, int preorder_index) {
  std::string id(owner);
  id += '#';
  id += std::to_string(preorder_index);
  return id;
}

RtlDesign RtlDesign::Opaque(std::string source, std::string file) {
  RtlDesign d;
  static const std::regex kModule(R"(\bmodule\s+([A-Za-z_][A-Za-z0-9_$]*))");
  std::smatch m;
  if (std::regex_search(source, m, kModule)) d.body_.name = m[1].str();
  d.source_ = std::move(source);
  d.file_ = std::move(file);
  if (d.file_.empty()) {
    d.file_ = (d.body_.name.empty() ? std::string("design") : d.body_.name) +
              ".v";
  }
  return d;
}

std::optional<SignalInfo> RtlDesign::Lookup(std::string_view name) const {
  auto it = signals_.find(name);
  if (it == signals_.end()) return std::nullopt;
  return it->second;
}

std::vector<StatementRef> RtlDesign::Statements() const {
  std::vector<StatementRef> out;
  out.reserve(body_.assigns.size() + body_.registers.size());
  for (const Assign& a : body_.assigns) {
    out.push_back({a.target, a.value.get(), a.loc, false});
  }
  for (const Register& r : body_.registers) {
    out.push_back({r.name, r.next.get(), r.loc, true});
  }
  return out;
}

const Assign* RtlDesign::FindAssign(std::string_view target) const {
  for (const Assign& a : body_.assigns) {
    if (a.target == target) return &a;
  }
  return nullptr;
}

const Register* RtlDesign::FindRegister(std::string_view name) const {
  for (const Register& r : body_.registers) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const Expr* RtlDesign::FindNode(std::string_view node_id) const {
  size_t hash = node_id.rfind('#');
  if (hash == std::string_view::npos) return nullptr;
  std::string_view owner = node_id.substr(0, hash);
  int index = 0;
  for (char c : node_id.substr(hash + 1)) {
    if (c < '0' || c > '9') return nullptr;
    index = index * 10 + (c - '0');
  }
  const Expr* root = nullptr;
  if (const Assign* a = FindAssign(owner)) {
    root = a->value.get();
  } else if (const Register* r = FindRegister(owner)) {
    root = r->next.get();
  }
  if (root == nullptr) return nullptr;
  const Expr* found = nullptr;
  VisitPreorder(*root, [&](const Expr& n, int i) {
    if (i == index) found = &n;
  });
  return found;
}

std::map<std::string, SourceLoc> RtlDesign::SourceMap() const {
  std::map<std::string, SourceLoc> out;
  for (const StatementRef& s : Statements()) {
    VisitPreorder(*s.root, [&](const Expr& n, int i) {
      out[NodeId(s.owner, i)] = n.loc;
    });
  }
  return out;
}

int RtlDesign::input_bits() const {
  int bits = 0;
  for (const Port& p : body_.ports) {
    if (p.direction == PortDirection::kInput) bits += p.width;
  }
  return bits;
}

bool RtlDesign::SameInterface(const RtlDesign& other) const {
  return body_.ports == other.body_.ports;
}

}  // namespace rtlopt::rtl
