#ifndef RTLOPT_RTL_AST_H_
#define RTLOPT_RTL_AST_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtlopt::rtl {

inline constexpr int kMaxWidth = 64;

enum class Op : uint8_t {
  kConst,
  kVar,
  kNot,
  kAnd,
  kOr,
  kXor,
  kAdd,
  kSub,
  kEq,
  kLt,
  kShl,
  kShr,
  kSlice,
  kMux,
};

// "const", "var", "not", "and", ..., "shl_const", "shr_const", "slice", "mux".
std::string_view OpName(Op op);
std::optional<Op> ParseOpName(std::string_view name);

// 1-based source position.
struct SourceLoc {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Arithmetic is unsigned modulo 2^width and never
// extends operands implicitly.
struct Expr {
  Op op = Op::kConst;
  int width = 1;  // result width
  std::vector<ExprPtr> operands;
  uint64_t value = 0;  // kConst
  std::string name;    // kVar
  int hi = 0;          // kSlice
  int lo = 0;          // kSlice
  int amount = 0;      // kShl, kShr
  SourceLoc loc;

  bool is_leaf() const { return op == Op::kConst || op == Op::kVar; }
  // Width the delay and area tables are keyed on: the first data operand.
  int OperandWidth() const;
};

uint64_t WidthMask(int width);

ExprPtr MakeConst(int width, uint64_t value, SourceLoc loc = {});
ExprPtr MakeVar(std::string name, int width, SourceLoc loc = {});
ExprPtr MakeNot(ExprPtr a, SourceLoc loc = {});
// kAnd/kOr/kXor/kAdd/kSub/kEq/kLt. Result width is 1 for kEq and kLt.
ExprPtr MakeBinary(Op op, ExprPtr a, ExprPtr b, SourceLoc loc = {});
ExprPtr MakeShift(Op op, ExprPtr a, int amount, SourceLoc loc = {});
ExprPtr MakeSlice(ExprPtr a, int hi, int lo, SourceLoc loc = {});
ExprPtr MakeMux(ExprPtr cond, ExprPtr then_value, ExprPtr else_value,
                SourceLoc loc = {});
// Copy of `e` with new operands; other fields kept.
ExprPtr WithOperands(const Expr& e, std::vector<ExprPtr> operands);

// Equality of shape and payload, ignoring source locations.
bool StructurallyEqual(const Expr& a, const Expr& b);

// Number of operator (non-leaf) nodes and operator depth of a tree.
int CountOperators(const Expr& e);
int OperatorDepth(const Expr& e);

enum class PortDirection { kInput, kOutput };

struct Port {
  std::string name;
  PortDirection direction = PortDirection::kInput;
  int width = 1;

  friend bool operator==(const Port&, const Port&) = default;
};

struct Wire {
  std::string name;
  int width = 1;
};

struct Register {
  std::string name;
  int width = 1;
  ExprPtr next;
  SourceLoc loc;  // location of the nonblocking update
};

struct Assign {
  std::string target;
  ExprPtr value;
  SourceLoc loc;
};

enum class SignalKind { kInput, kOutput, kWire, kRegister };

struct SignalInfo {
  SignalKind kind;
  int width;
};

// Mutable design body, used to build or rewrite designs before elaboration.
struct DesignDraft {
  std::string name;
  std::vector<Port> ports;
  std::vector<Wire> wires;
  std::vector<Register> registers;
  std::vector<Assign> assigns;
};

// A statement is an assign or a register update; statements own expression
// trees. Assigns come first, then registers, in declaration order.
struct StatementRef {
  std::string owner;  // assign target or register name
  const Expr* root = nullptr;
  SourceLoc loc;
  bool is_register = false;
};

// An elaborated RTL design, or opaque source text for external backends.
// Immutable after construction; safe to share between threads.
class RtlDesign {
 public:
  RtlDesign() = default;

  // A design that is only text (external toolchains). The top name is taken
  // from the first `module <name>` occurrence when present.
  static RtlDesign Opaque(std::string source, std::string file = "");

  bool is_parsed() const { return parsed_; }
  const std::string& name() const { return body_.name; }
  const std::string& source() const { return source_; }
  const std::string& file() const { return file_; }
  const std::vector<Port>& ports() const { return body_.ports; }
  const std::vector<Wire>& wires() const { return body_.wires; }
  const std::vector<Register>& registers() const { return body_.registers; }
  const std::vector<Assign>& assigns() const { return body_.assigns; }
  const DesignDraft& draft() const { return body_; }

  std::optional<SignalInfo> Lookup(std::string_view name) const;
  // Assign indices ordered so that every net is computed after its inputs.
  const std::vector<size_t>& assign_order() const { return assign_order_; }
  std::vector<StatementRef> Statements() const;
  const Assign* FindAssign(std::string_view target) const;
  const Register* FindRegister(std::string_view name) const;

  // Stable node ids have the form "<owner>#<preorder index>".
  const Expr* FindNode(std::string_view node_id) const;
  // Expression node id -> source position, for every operator and leaf.
  std::map<std::string, SourceLoc> SourceMap() const;

  int input_bits() const;
  bool SameInterface(const RtlDesign& other) const;

 private:
  friend RtlDesign Elaborate(DesignDraft draft, std::string source,
                             std::string file);

  bool parsed_ = false;
  DesignDraft body_;
  std::string source_;
  std::string file_;
  std::map<std::string, SignalInfo, std::less<>> signals_;
  std::vector<size_t> assign_order_;
};

std::string NodeId(std::string_view owner, int preorder_index);

// Visits `e` in preorder; `fn(node, preorder_index)`.
template <typename Fn>
void VisitPreorder(const Expr& e, Fn&& fn) {
  int index = 0;
  auto rec = [&](auto&& self, const Expr& n) -> void {
    fn(n, index++);
    for (const ExprPtr& child : n.operands) self(self, *child);
  };
  rec(rec, e);
}

}  // namespace rtlopt::rtl

#endif  // RTLOPT_RTL_AST_H_
