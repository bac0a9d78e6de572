#include "rtlopt/rtl/parser.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rtlopt/rtl/errors.h"

namespace rtlopt::rtl {
namespace {

enum class TokenKind { kIdent, kNumber, kSized, kPunct, kEof };

struct Token {
  TokenKind kind = TokenKind::kEof;
  std::string text;  // identifier or punctuation
  uint64_t value = 0;
  int width = 0;  // kSized
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> Tokenize() {
    std::vector<Token> out;
    while (true) {
      SkipIgnored();
      Token t;
      t.loc = {line_, column_};
      if (pos_ >= text_.size()) {
        t.kind = TokenKind::kEof;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = TokenKind::kIdent;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_' || text_[pos_] == '$')) {
          t.text += Advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        LexNumber(t);
      } else {
        LexPunct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char Advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  bool Peek(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }

  void SkipIgnored() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        Advance();
      } else if (Peek("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') Advance();
      } else if (Peek("/*")) {
        SourceLoc start{line_, column_};
        Advance();
        Advance();
        while (pos_ < text_.size() && !Peek("*/")) Advance();
        if (pos_ >= text_.size()) {
          throw RtlError(RtlErrorKind::kSyntax, start, "",
                         "unterminated block comment");
        }
        Advance();
        Advance();
      } else {
        return;
      }
    }
  }

  void LexNumber(Token& t) {
    std::string digits;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      char c = Advance();
      if (c != '_') digits += c;
    }
    if (digits.size() > 19) {
      throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                     "number too large");
    }
    uint64_t n = std::stoull(digits);
    if (pos_ >= text_.size() || text_[pos_] != '\'') {
      t.kind = TokenKind::kNumber;
      t.value = n;
      return;
    }
    Advance();  // '
    if (n < 1 || n > kMaxWidth) {
      throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                     "literal width must be in [1, 64]");
    }
    if (pos_ >= text_.size()) {
      throw RtlError(RtlErrorKind::kSyntax, t.loc, "", "truncated literal");
    }
    char base_char = static_cast<char>(
        std::tolower(static_cast<unsigned char>(Advance())));
    int base = base_char == 'b' ? 2 : base_char == 'd' ? 10
               : base_char == 'h' ? 16 : base_char == 'o' ? 8 : 0;
    if (base == 0) {
      throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                     "literal base must be b, o, d or h");
    }
    unsigned __int128 value = 0;
    int ndigits = 0;
    while (pos_ < text_.size()) {
      char c = static_cast<char>(
          std::tolower(static_cast<unsigned char>(text_[pos_])));
      int digit;
      if (c == '_') {
        Advance();
        continue;
      } else if (c >= '0' && c <= '9') {
        digit = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        digit = 10 + (c - 'a');
      } else {
        break;
      }
      if (digit >= base) {
        throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                       "digit out of range for literal base");
      }
      Advance();
      value = value * base + digit;
      if (value > ~uint64_t{0}) {
        throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                       "literal value too large");
      }
      ++ndigits;
    }
    if (ndigits == 0) {
      throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                     "literal has no digits");
    }
    uint64_t v = static_cast<uint64_t>(value);
    int width = static_cast<int>(n);
    if ((v & ~WidthMask(width)) != 0) {
      throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                     "literal value does not fit in " +
                         std::to_string(width) + " bits");
    }
    t.kind = TokenKind::kSized;
    t.width = width;
    t.value = v;
  }

  void LexPunct(Token& t) {
    static const char* kTwoChar[] = {"<=", "==", "<<", ">>"};
    for (const char* p : kTwoChar) {
      if (Peek(p)) {
        t.kind = TokenKind::kPunct;
        t.text = p;
        Advance();
        Advance();
        return;
      }
    }
    char c = text_[pos_];
    static const std::string_view kSingle = "()[]:;,=?~&|^+-<";
    if (kSingle.find(c) == std::string_view::npos) {
      throw RtlError(RtlErrorKind::kSyntax, t.loc, "",
                     std::string("unexpected character '") + c + "'");
    }
    t.kind = TokenKind::kPunct;
    t.text = std::string(1, Advance());
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

const std::unordered_set<std::string>& Keywords() {
  static const std::unordered_set<std::string> kKeywords = {
      "module", "endmodule", "input", "output", "wire",
      "reg",    "assign",    "always_ff", "begin", "end"};
  return kKeywords;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  DesignDraft ParseModule() {
    DesignDraft d;
    ExpectKeyword("module");
    d.name = ExpectIdent().text;
    ExpectPunct("(");
    if (!IsPunct(")")) ParsePorts(d);
    ExpectPunct(")");
    ExpectPunct(";");
    bool seen_always = false;
    while (!IsKeyword("endmodule")) {
      if (Cur().kind == TokenKind::kEof) Fail("expected 'endmodule'");
      if (IsKeyword("wire") || IsKeyword("reg")) {
        bool is_reg = Cur().text == "reg";
        Next();
        int width = ParseOptionalRange();
        while (true) {
          Token id = ExpectIdent();
          if (is_reg) {
            d.registers.push_back({id.text, width, nullptr, id.loc});
            reg_decl_locs_[id.text] = id.loc;
          } else {
            d.wires.push_back({id.text, width});
          }
          if (!IsPunct(",")) break;
          Next();
        }
        ExpectPunct(";");
      } else if (IsKeyword("assign")) {
        Next();
        Token target = ExpectIdent();
        ExpectPunct("=");
        ExprPtr e = ParseExpr();
        ExpectPunct(";");
        d.assigns.push_back({target.text, std::move(e), target.loc});
      } else if (IsKeyword("always_ff")) {
        if (seen_always) Fail("only one always_ff block is allowed");
        seen_always = true;
        Next();
        ExpectKeyword("begin");
        while (!IsKeyword("end")) {
          if (Cur().kind == TokenKind::kEof) Fail("expected 'end'");
          Token target = ExpectIdent();
          ExpectPunct("<=");
          ExprPtr e = ParseExpr();
          ExpectPunct(";");
          updates_.push_back({target, std::move(e)});
        }
        Next();
      } else {
        Fail("expected a declaration, 'assign' or 'always_ff'");
      }
    }
    Next();
    if (Cur().kind != TokenKind::kEof) Fail("unexpected text after endmodule");
    AttachUpdates(d);
    return d;
  }

 private:
  struct Update {
    Token target;
    ExprPtr value;
  };

  const Token& Cur() const { return tokens_[pos_]; }
  void Next() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }
  bool IsPunct(std::string_view p) const {
    return Cur().kind == TokenKind::kPunct && Cur().text == p;
  }
  bool IsKeyword(std::string_view k) const {
    return Cur().kind == TokenKind::kIdent && Cur().text == k;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    const Token& t = Cur();
    std::string found = t.kind == TokenKind::kEof ? "end of input"
                        : t.kind == TokenKind::kNumber || t.kind == TokenKind::kSized
                            ? "number"
                            : "'" + t.text + "'";
    throw RtlError(RtlErrorKind::kSyntax, t.loc, "",
                   message + ", found " + found);
  }

  void ExpectPunct(std::string_view p) {
    if (!IsPunct(p)) Fail("expected '" + std::string(p) + "'");
    Next();
  }
  void ExpectKeyword(std::string_view k) {
    if (!IsKeyword(k)) Fail("expected '" + std::string(k) + "'");
    Next();
  }
  Token ExpectIdent() {
    if (Cur().kind != TokenKind::kIdent || Keywords().count(Cur().text)) {
      Fail("expected an identifier");
    }
    Token t = Cur();
    Next();
    return t;
  }
  uint64_t ExpectNumber() {
    if (Cur().kind != TokenKind::kNumber) Fail("expected a decimal number");
    uint64_t v = Cur().value;
    Next();
    return v;
  }

  int ParseOptionalRange() {
    if (!IsPunct("[")) return 1;
    SourceLoc loc = Cur().loc;
    Next();
    uint64_t hi = ExpectNumber();
    ExpectPunct(":");
    uint64_t lo = ExpectNumber();
    ExpectPunct("]");
    if (lo != 0) {
      throw RtlError(RtlErrorKind::kBadWidth, loc, "",
                     "ranges must have the form [W-1:0]");
    }
    if (hi + 1 > kMaxWidth) {
      throw RtlError(RtlErrorKind::kBadWidth, loc, "",
                     "widths must be in [1, 64]");
    }
    return static_cast<int>(hi) + 1;
  }

  void ParsePorts(DesignDraft& d) {
    PortDirection dir = PortDirection::kInput;
    int width = 1;
    bool have_dir = false;
    while (true) {
      if (IsKeyword("input") || IsKeyword("output")) {
        dir = Cur().text == "input" ? PortDirection::kInput
                                    : PortDirection::kOutput;
        Next();
        width = ParseOptionalRange();
        have_dir = true;
      } else if (!have_dir) {
        Fail("expected 'input' or 'output'");
      }
      Token id = ExpectIdent();
      d.ports.push_back({id.text, dir, width});
      port_locs_[id.text] = id.loc;
      if (!IsPunct(",")) break;
      Next();
    }
  }

  void AttachUpdates(DesignDraft& d) {
    for (Update& u : updates_) {
      auto it = std::find_if(d.registers.begin(), d.registers.end(),
                             [&](const Register& r) {
                               return r.name == u.target.text;
                             });
      if (it == d.registers.end()) {
        bool declared =
            port_locs_.count(u.target.text) ||
            std::any_of(d.wires.begin(), d.wires.end(), [&](const Wire& w) {
              return w.name == u.target.text;
            });
        throw RtlError(
            declared ? RtlErrorKind::kIllegalDriver : RtlErrorKind::kUndeclared,
            u.target.loc, u.target.text,
            declared ? "'" + u.target.text +
                           "' is not a register and cannot take '<='"
                     : "'" + u.target.text + "' is not declared");
      }
      if (it->next != nullptr) {
        throw RtlError(RtlErrorKind::kMultipleDrivers, u.target.loc,
                       u.target.text,
                       "register '" + u.target.text + "' updated twice");
      }
      it->next = std::move(u.value);
      it->loc = u.target.loc;
    }
    for (const Register& r : d.registers) {
      if (r.next == nullptr) {
        throw RtlError(RtlErrorKind::kMissingDriver, reg_decl_locs_[r.name],
                       r.name, "register '" + r.name + "' is never updated");
      }
    }
  }

  // Expressions. Widths are resolved during elaboration; vars carry 0 here.
  ExprPtr ParseExpr() { return ParseMux(); }

  ExprPtr ParseMux() {
    ExprPtr cond = ParseBinaryLevel(0);
    if (!IsPunct("?")) return cond;
    SourceLoc loc = Cur().loc;
    Next();
    ExprPtr t = ParseExpr();
    ExpectPunct(":");
    ExprPtr e = ParseExpr();
    return MakeMux(std::move(cond), std::move(t), std::move(e), loc);
  }

  // Levels: | ^ & == < (shift) (+ -)
  ExprPtr ParseBinaryLevel(int level) {
    struct Level {
      std::vector<std::pair<std::string_view, Op>> ops;
    };
    static const Level kLevels[] = {
        {{{"|", Op::kOr}}},
        {{{"^", Op::kXor}}},
        {{{"&", Op::kAnd}}},
        {{{"==", Op::kEq}}},
        {{{"<", Op::kLt}}},
        {{{"<<", Op::kShl}, {">>", Op::kShr}}},
        {{{"+", Op::kAdd}, {"-", Op::kSub}}},
    };
    constexpr int kNumLevels = sizeof(kLevels) / sizeof(kLevels[0]);
    if (level == kNumLevels) return ParseUnary();
    ExprPtr lhs = ParseBinaryLevel(level + 1);
    while (true) {
      std::optional<Op> op;
      for (const auto& [text, o] : kLevels[level].ops) {
        if (IsPunct(text)) op = o;
      }
      if (!op) return lhs;
      SourceLoc loc = Cur().loc;
      Next();
      if (*op == Op::kShl || *op == Op::kShr) {
        uint64_t amount = ExpectNumber();
        if (amount > kMaxWidth) {
          throw RtlError(RtlErrorKind::kBadLiteral, loc, "",
                         "shift amount must be at most 64");
        }
        lhs = MakeShift(*op, std::move(lhs), static_cast<int>(amount), loc);
      } else {
        ExprPtr rhs = ParseBinaryLevel(level + 1);
        lhs = MakeBinary(*op, std::move(lhs), std::move(rhs), loc);
      }
    }
  }

  ExprPtr ParseUnary() {
    if (IsPunct("~")) {
      SourceLoc loc = Cur().loc;
      Next();
      return MakeNot(ParseUnary(), loc);
    }
    return ParsePrimary();
  }

  ExprPtr ParsePrimary() {
    const Token& t = Cur();
    if (IsPunct("(")) {
      Next();
      ExprPtr e = ParseExpr();
      ExpectPunct(")");
      return e;
    }
    if (t.kind == TokenKind::kSized) {
      ExprPtr e = MakeConst(t.width, t.value, t.loc);
      Next();
      return e;
    }
    if (t.kind == TokenKind::kNumber) {
      throw RtlError(RtlErrorKind::kBadLiteral, t.loc, "",
                     "unsized literal; write a width, e.g. 8'd" +
                         std::to_string(t.value));
    }
    Token id = ExpectIdent();
    ExprPtr var = MakeVar(id.text, 0, id.loc);
    if (!IsPunct("[")) return var;
    SourceLoc loc = Cur().loc;
    Next();
    uint64_t hi = ExpectNumber();
    uint64_t lo = hi;
    if (IsPunct(":")) {
      Next();
      lo = ExpectNumber();
    }
    ExpectPunct("]");
    if (hi > kMaxWidth || lo > hi) {
      throw RtlError(RtlErrorKind::kBadSlice, loc, id.text,
                     "slice bounds must satisfy hi >= lo");
    }
    return MakeSlice(std::move(var), static_cast<int>(hi),
                     static_cast<int>(lo), loc);
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::vector<Update> updates_;
  std::unordered_map<std::string, SourceLoc> port_locs_;
  std::unordered_map<std::string, SourceLoc> reg_decl_locs_;
};

using SymbolTable = std::unordered_map<std::string, SignalInfo>;

// Rebuilds `e` with widths from `symbols`, enforcing the width rules.
ExprPtr Resolve(const Expr& e, const SymbolTable& symbols) {
  auto mismatch = [&](const std::string& what) -> RtlError {
    return RtlError(RtlErrorKind::kWidthMismatch, e.loc, "", what);
  };
  switch (e.op) {
    case Op::kConst:
      if (e.width < 1 || e.width > kMaxWidth) {
        throw RtlError(RtlErrorKind::kBadWidth, e.loc, "",
                       "constant width must be in [1, 64]");
      }
      return MakeConst(e.width, e.value, e.loc);
    case Op::kVar: {
      auto it = symbols.find(e.name);
      if (it == symbols.end()) {
        throw RtlError(RtlErrorKind::kUndeclared, e.loc, e.name,
                       "'" + e.name + "' is not declared");
      }
      return MakeVar(e.name, it->second.width, e.loc);
    }
    case Op::kNot:
      return MakeNot(Resolve(*e.operands[0], symbols), e.loc);
    case Op::kAnd:
    case Op::kOr:
    case Op::kXor:
    case Op::kAdd:
    case Op::kSub:
    case Op::kEq:
    case Op::kLt: {
      ExprPtr a = Resolve(*e.operands[0], symbols);
      ExprPtr b = Resolve(*e.operands[1], symbols);
      if (a->width != b->width) {
        throw mismatch("operands of '" + std::string(OpName(e.op)) +
                       "' have widths " + std::to_string(a->width) + " and " +
                       std::to_string(b->width));
      }
      return MakeBinary(e.op, std::move(a), std::move(b), e.loc);
    }
    case Op::kShl:
    case Op::kShr:
      if (e.amount < 0 || e.amount > kMaxWidth) {
        throw RtlError(RtlErrorKind::kBadLiteral, e.loc, "",
                       "shift amount must be in [0, 64]");
      }
      return MakeShift(e.op, Resolve(*e.operands[0], symbols), e.amount,
                       e.loc);
    case Op::kSlice: {
      const Expr& base = *e.operands[0];
      if (base.op != Op::kVar) {
        throw RtlError(RtlErrorKind::kBadSlice, e.loc, "",
                       "only identifiers can be sliced");
      }
      ExprPtr a = Resolve(base, symbols);
      if (e.lo < 0 || e.hi < e.lo || e.hi >= a->width) {
        throw RtlError(RtlErrorKind::kBadSlice, e.loc, base.name,
                       "slice [" + std::to_string(e.hi) + ":" +
                           std::to_string(e.lo) + "] outside '" + base.name +
                           "' of width " + std::to_string(a->width));
      }
      return MakeSlice(std::move(a), e.hi, e.lo, e.loc);
    }
    case Op::kMux: {
      ExprPtr c = Resolve(*e.operands[0], symbols);
      ExprPtr t = Resolve(*e.operands[1], symbols);
      ExprPtr f = Resolve(*e.operands[2], symbols);
      if (c->width != 1) {
        throw mismatch("mux condition has width " + std::to_string(c->width) +
                       ", expected 1");
      }
      if (t->width != f->width) {
        throw mismatch("mux arms have widths " + std::to_string(t->width) +
                       " and " + std::to_string(f->width));
      }
      return MakeMux(std::move(c), std::move(t), std::move(f), e.loc);
    }
  }
  throw mismatch("unknown operator");
}

void CollectVars(const Expr& e, std::vector<const Expr*>& out) {
  if (e.op == Op::kVar) {
    out.push_back(&e);
    return;
  }
  for (const ExprPtr& c : e.operands) CollectVars(*c, out);
}

}  // namespace

RtlDesign Elaborate(DesignDraft draft, std::string source, std::string file) {
  SymbolTable symbols;
  auto declare = [&](const std::string& name, SignalKind kind, int width,
                     SourceLoc loc) {
    if (width < 1 || width > kMaxWidth) {
      throw RtlError(RtlErrorKind::kBadWidth, loc, name,
                     "width of '" + name + "' must be in [1, 64]");
    }
    if (Keywords().count(name)) {
      throw RtlError(RtlErrorKind::kSyntax, loc, name,
                     "'" + name + "' is a keyword");
    }
    if (!symbols.emplace(name, SignalInfo{kind, width}).second) {
      throw RtlError(RtlErrorKind::kRedeclared, loc, name,
                     "'" + name + "' is declared more than once");
    }
  };
  for (const Port& p : draft.ports) {
    declare(p.name,
            p.direction == PortDirection::kInput ? SignalKind::kInput
                                                 : SignalKind::kOutput,
            p.width, {});
  }
  for (const Wire& w : draft.wires) {
    declare(w.name, SignalKind::kWire, w.width, {});
  }
  for (const Register& r : draft.registers) {
    declare(r.name, SignalKind::kRegister, r.width, r.loc);
  }

  // Drivers.
  std::unordered_map<std::string, size_t> driver;
  for (size_t i = 0; i < draft.assigns.size(); ++i) {
    Assign& a = draft.assigns[i];
    auto it = symbols.find(a.target);
    if (it == symbols.end()) {
      throw RtlError(RtlErrorKind::kUndeclared, a.loc, a.target,
                     "'" + a.target + "' is not declared");
    }
    if (it->second.kind == SignalKind::kInput ||
        it->second.kind == SignalKind::kRegister) {
      throw RtlError(RtlErrorKind::kIllegalDriver, a.loc, a.target,
                     "'" + a.target + "' cannot be driven by assign");
    }
    if (!driver.emplace(a.target, i).second) {
      throw RtlError(RtlErrorKind::kMultipleDrivers, a.loc, a.target,
                     "'" + a.target + "' has more than one driver");
    }
    a.value = Resolve(*a.value, symbols);
    if (a.value->width != it->second.width) {
      throw RtlError(RtlErrorKind::kWidthMismatch, a.loc, a.target,
                     "'" + a.target + "' has width " +
                         std::to_string(it->second.width) +
                         " but its value has width " +
                         std::to_string(a.value->width));
    }
  }
  for (Register& r : draft.registers) {
    if (r.next == nullptr) {
      throw RtlError(RtlErrorKind::kMissingDriver, r.loc, r.name,
                     "register '" + r.name + "' is never updated");
    }
    r.next = Resolve(*r.next, symbols);
    if (r.next->width != r.width) {
      throw RtlError(RtlErrorKind::kWidthMismatch, r.loc, r.name,
                     "register '" + r.name + "' has width " +
                         std::to_string(r.width) +
                         " but its next state has width " +
                         std::to_string(r.next->width));
    }
  }
  for (const Port& p : draft.ports) {
    if (p.direction == PortDirection::kOutput && !driver.count(p.name)) {
      throw RtlError(RtlErrorKind::kMissingDriver, {}, p.name,
                     "output '" + p.name + "' is never assigned");
    }
  }
  for (const Wire& w : draft.wires) {
    if (!driver.count(w.name)) {
      throw RtlError(RtlErrorKind::kMissingDriver, {}, w.name,
                     "wire '" + w.name + "' is never assigned");
    }
  }

  // Topological order of the assign graph; any back edge is a cycle.
  std::vector<int> state(draft.assigns.size(), 0);  // 0 new, 1 active, 2 done
  std::vector<size_t> order;
  order.reserve(draft.assigns.size());
  std::function<void(size_t)> visit = [&](size_t i) {
    if (state[i] == 2) return;
    const Assign& a = draft.assigns[i];
    if (state[i] == 1) {
      throw RtlError(RtlErrorKind::kCombinationalCycle, a.loc, a.target,
                     "combinational cycle through '" + a.target + "'");
    }
    state[i] = 1;
    std::vector<const Expr*> vars;
    CollectVars(*a.value, vars);
    for (const Expr* v : vars) {
      auto it = driver.find(v->name);
      if (it != driver.end()) visit(it->second);
    }
    state[i] = 2;
    order.push_back(i);
  };
  for (size_t i = 0; i < draft.assigns.size(); ++i) visit(i);

  RtlDesign d;
  d.parsed_ = true;
  d.body_ = std::move(draft);
  d.source_ = std::move(source);
  d.file_ = file.empty() ? d.body_.name + ".rtl" : std::move(file);
  for (auto& [name, info] : symbols) d.signals_.emplace(name, info);
  d.assign_order_ = std::move(order);
  return d;
}

RtlDesign Parse(std::string_view source, std::string file) {
  Lexer lexer(source);
  Parser parser(lexer.Tokenize());
  DesignDraft draft = parser.ParseModule();
  return Elaborate(std::move(draft), std::string(source), std::move(file));
}

namespace {

std::string RangeText(int width) {
  return width == 1 ? "" : "[" + std::to_string(width - 1) + ":0] ";
}

std::string Operand(const Expr& e) {
  std::string s = PrintExpr(e);
  if (e.is_leaf() || e.op == Op::kSlice || e.op == Op::kNot) return s;
  return "(" + s + ")";
}

std::string_view BinaryToken(Op op) {
  switch (op) {
    case Op::kAnd:
      return "&";
    case Op::kOr:
      return "|";
    case Op::kXor:
      return "^";
    case Op::kAdd:
      return "+";
    case Op::kSub:
      return "-";
    case Op::kEq:
      return "==";
    case Op::kLt:
      return "<";
    case Op::kShl:
      return "<<";
    case Op::kShr:
      return ">>";
    default:
      return "?";
  }
}

}  // namespace

std::string PrintExpr(const Expr& e) {
  switch (e.op) {
    case Op::kConst:
      if (e.width == 1) return e.value ? "1'b1" : "1'b0";
      return std::to_string(e.width) + "'d" + std::to_string(e.value);
    case Op::kVar:
      return e.name;
    case Op::kNot:
      return "~" + Operand(*e.operands[0]);
    case Op::kSlice:
      if (e.hi == e.lo) {
        return e.operands[0]->name + "[" + std::to_string(e.hi) + "]";
      }
      return e.operands[0]->name + "[" + std::to_string(e.hi) + ":" +
             std::to_string(e.lo) + "]";
    case Op::kShl:
    case Op::kShr:
      return Operand(*e.operands[0]) + " " + std::string(BinaryToken(e.op)) +
             " " + std::to_string(e.amount);
    case Op::kMux:
      return Operand(*e.operands[0]) + " ? " + Operand(*e.operands[1]) +
             " : " + Operand(*e.operands[2]);
    default:
      return Operand(*e.operands[0]) + " " + std::string(BinaryToken(e.op)) +
             " " + Operand(*e.operands[1]);
  }
}

std::string Print(const DesignDraft& d) {
  std::string out = "module " + d.name + "(";
  if (d.ports.empty()) {
    out += ");\n";
  } else {
    out += "\n";
    for (size_t i = 0; i < d.ports.size(); ++i) {
      const Port& p = d.ports[i];
      out += "  ";
      out += p.direction == PortDirection::kInput ? "input " : "output ";
      out += RangeText(p.width) + p.name;
      out += i + 1 < d.ports.size() ? ",\n" : "\n";
    }
    out += ");\n";
  }
  for (const Wire& w : d.wires) {
    out += "  wire " + RangeText(w.width) + w.name + ";\n";
  }
  for (const Register& r : d.registers) {
    out += "  reg " + RangeText(r.width) + r.name + ";\n";
  }
  for (const Assign& a : d.assigns) {
    out += "  assign " + a.target + " = " + PrintExpr(*a.value) + ";\n";
  }
  if (!d.registers.empty()) {
    out += "  always_ff begin\n";
    for (const Register& r : d.registers) {
      out += "    " + r.name + " <= " + PrintExpr(*r.next) + ";\n";
    }
    out += "  end\n";
  }
  out += "endmodule\n";
  return out;
}

std::string Print(const RtlDesign& design) {
  if (!design.is_parsed()) return design.source();
  return Print(design.draft());
}

RtlDesign Reparse(const DesignDraft& draft, std::string file) {
  return Parse(Print(draft), std::move(file));
}

bool StructurallyIdentical(const RtlDesign& a, const RtlDesign& b) {
  const DesignDraft& x = a.draft();
  const DesignDraft& y = b.draft();
  if (x.name != y.name || x.ports != y.ports ||
      x.wires.size() != y.wires.size() ||
      x.registers.size() != y.registers.size() ||
      x.assigns.size() != y.assigns.size()) {
    return false;
  }
  for (size_t i = 0; i < x.wires.size(); ++i) {
    if (x.wires[i].name != y.wires[i].name ||
        x.wires[i].width != y.wires[i].width) {
      return false;
    }
  }
  for (size_t i = 0; i < x.registers.size(); ++i) {
    const Register& r = x.registers[i];
    const Register& s = y.registers[i];
    if (r.name != s.name || r.width != s.width ||
        !StructurallyEqual(*r.next, *s.next)) {
      return false;
    }
  }
  for (size_t i = 0; i < x.assigns.size(); ++i) {
    if (x.assigns[i].target != y.assigns[i].target ||
        !StructurallyEqual(*x.assigns[i].value, *y.assigns[i].value)) {
      return false;
    }
  }
  return true;
}

}  // namespace rtlopt::rtl
