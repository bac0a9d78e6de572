#include "rtlopt/proposer/rewrite.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "rtlopt/rtl/parser.h"
#include "rtlopt/rtl/simulate.h"

namespace rtlopt::proposer {
namespace {

using rtl::Expr;
using rtl::ExprPtr;
using rtl::Op;

// Visits every node of `root` in preorder with its parent and the operand
// slot it occupies there.
void Walk(const Expr& root,
          const std::function<void(const Expr& node, int index,
                                   const Expr* parent, int slot)>& fn) {
  int index = 0;
  std::function<void(const Expr&, const Expr*, int)> rec =
      [&](const Expr& n, const Expr* parent, int slot) {
        fn(n, index++, parent, slot);
        for (size_t i = 0; i < n.operands.size(); ++i) {
          rec(*n.operands[i], &n, static_cast<int>(i));
        }
      };
  rec(root, nullptr, -1);
}

int SubtreeSize(const Expr& e) {
  int n = 1;
  for (const ExprPtr& c : e.operands) n += SubtreeSize(*c);
  return n;
}

int NodeLine(const Expr& node, const rtl::StatementRef& stmt) {
  return node.loc.line > 0 ? node.loc.line : stmt.loc.line;
}

ExprPtr& RootOf(rtl::DesignDraft& d, const std::string& owner) {
  for (rtl::Assign& a : d.assigns) {
    if (a.target == owner) return a.value;
  }
  for (rtl::Register& r : d.registers) {
    if (r.name == owner) return r.next;
  }
  throw std::logic_error("no statement drives " + owner);
}

// Every statement root of the draft, assigns first.
std::vector<ExprPtr*> Roots(rtl::DesignDraft& d) {
  std::vector<ExprPtr*> roots;
  for (rtl::Assign& a : d.assigns) roots.push_back(&a.value);
  for (rtl::Register& r : d.registers) roots.push_back(&r.next);
  return roots;
}

// Copy of `root` with the node at preorder `target` replaced by fn(node).
ExprPtr ReplaceNode(const ExprPtr& root, int target,
                    const std::function<ExprPtr(const ExprPtr&)>& fn) {
  int index = 0;
  std::function<ExprPtr(const ExprPtr&)> rec = [&](const ExprPtr& n) {
    const int mine = index;
    const int size = SubtreeSize(*n);
    if (target < mine || target >= mine + size) {
      index += size;
      return n;
    }
    ++index;
    if (mine == target) {
      index += size - 1;
      return fn(n);
    }
    std::vector<ExprPtr> ops;
    for (const ExprPtr& c : n->operands) ops.push_back(rec(c));
    return rtl::WithOperands(*n, std::move(ops));
  };
  return rec(root);
}

// Copy of `root` where every node for which fn returns non-null is replaced,
// top-down; replaced subtrees are not descended into.
ExprPtr ReplaceWhere(const ExprPtr& root,
                     const std::function<ExprPtr(const ExprPtr&)>& fn) {
  if (ExprPtr r = fn(root)) return r;
  bool changed = false;
  std::vector<ExprPtr> ops;
  for (const ExprPtr& c : root->operands) {
    ops.push_back(ReplaceWhere(c, fn));
    changed |= ops.back() != c;
  }
  return changed ? rtl::WithOperands(*root, std::move(ops)) : root;
}

std::string FreshName(const rtl::DesignDraft& d, const std::string& base) {
  std::set<std::string> used;
  for (const rtl::Port& p : d.ports) used.insert(p.name);
  for (const rtl::Wire& w : d.wires) used.insert(w.name);
  for (const rtl::Register& r : d.registers) used.insert(r.name);
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string name = base + "_" + std::to_string(i);
    if (!used.count(name)) return name;
  }
}

void AddWire(rtl::DesignDraft& d, const std::string& name, ExprPtr value) {
  d.wires.push_back({name, value->width});
  d.assigns.push_back({name, std::move(value), {}});
}

const Expr* NodeAt(const Expr& root, int target) {
  const Expr* found = nullptr;
  rtl::VisitPreorder(root, [&](const Expr& n, int i) {
    if (i == target) found = &n;
  });
  return found;
}

// ---------------------------------------------------------------------------
// tree-rebalance

bool IsAssociative(Op op) {
  return op == Op::kAnd || op == Op::kOr || op == Op::kXor || op == Op::kAdd;
}

bool SameChainOp(const Expr& n, Op op, int width) {
  return n.op == op && n.width == width;
}

void ChainLeaves(const ExprPtr& n, Op op, int width,
                 std::vector<ExprPtr>& leaves) {
  if (!SameChainOp(*n, op, width)) {
    leaves.push_back(n);
    return;
  }
  for (const ExprPtr& c : n->operands) ChainLeaves(c, op, width, leaves);
}

int ChainDepth(const Expr& n, Op op, int width) {
  if (!SameChainOp(n, op, width)) return 0;
  int d = 0;
  for (const ExprPtr& c : n.operands) d = std::max(d, ChainDepth(*c, op, width));
  return d + 1;
}

int CeilLog2(int n) {
  int d = 0;
  while ((1 << d) < n) ++d;
  return d;
}

bool IsRebalanceRoot(const Expr& n, const Expr* parent) {
  if (!IsAssociative(n.op)) return false;
  if (parent && SameChainOp(*parent, n.op, n.width)) return false;
  std::vector<ExprPtr> leaves;
  for (const ExprPtr& c : n.operands) ChainLeaves(c, n.op, n.width, leaves);
  const int count = static_cast<int>(leaves.size());
  return count >= 3 && ChainDepth(n, n.op, n.width) > CeilLog2(count);
}

ExprPtr BalancedTree(Op op, const std::vector<ExprPtr>& leaves, size_t lo,
                     size_t hi) {
  if (hi - lo == 1) return leaves[lo];
  const size_t mid = lo + (hi - lo + 1) / 2;
  return rtl::MakeBinary(op, BalancedTree(op, leaves, lo, mid),
                         BalancedTree(op, leaves, mid, hi));
}

std::string RebalanceTree(rtl::DesignDraft& d, const RewriteSite& site) {
  ExprPtr& root = RootOf(d, site.owner);
  std::string description;
  root = ReplaceNode(root, site.node, [&](const ExprPtr& n) {
    std::vector<ExprPtr> leaves;
    ChainLeaves(n, n->op, n->width, leaves);
    ExprPtr tree = BalancedTree(n->op, leaves, 0, leaves.size());
    description = "rebalanced a " + std::to_string(leaves.size()) +
                  "-operand " + std::string(rtl::OpName(n->op)) +
                  " chain from depth " +
                  std::to_string(ChainDepth(*n, n->op, n->width)) + " to " +
                  std::to_string(ChainDepth(*tree, n->op, n->width));
    return tree;
  });
  return description;
}

// ---------------------------------------------------------------------------
// common-subexpression-extraction

std::string ExtractCommonSubexpression(rtl::DesignDraft& d,
                                       const RewriteSite& site) {
  const Expr* target = NodeAt(*RootOf(d, site.owner), site.node);
  const std::string key = rtl::PrintExpr(*target);
  const std::string name = FreshName(d, "cse");
  ExprPtr value;
  int replaced = 0;
  for (ExprPtr* root : Roots(d)) {
    *root = ReplaceWhere(*root, [&](const ExprPtr& n) -> ExprPtr {
      if (n->is_leaf() || rtl::PrintExpr(*n) != key) return nullptr;
      if (!value) value = n;
      ++replaced;
      return rtl::MakeVar(name, n->width);
    });
  }
  AddWire(d, name, value);
  return "factored " + std::to_string(replaced) + " copies of (" + key +
         ") into wire " + name;
}

// ---------------------------------------------------------------------------
// condition-precompute

std::string PrecomputeCondition(rtl::DesignDraft& d, const RewriteSite& site) {
  const std::string name = FreshName(d, site.owner + "_cond");
  ExprPtr& root = RootOf(d, site.owner);
  ExprPtr cond;
  root = ReplaceNode(root, site.node, [&](const ExprPtr& mux) {
    cond = mux->operands[0];
    return rtl::WithOperands(
        *mux, {rtl::MakeVar(name, 1), mux->operands[1], mux->operands[2]});
  });
  AddWire(d, name, cond);
  return "hoisted mux condition (" + rtl::PrintExpr(*cond) + ") into wire " +
         name;
}

// ---------------------------------------------------------------------------
// mux-restructure

int ElseChainLength(const Expr& n) {
  int len = 0;
  for (const Expr* m = &n; m->op == Op::kMux; m = m->operands[2].get()) ++len;
  return len;
}

bool IsMuxChainRoot(const Expr& n, const Expr* parent, int slot) {
  if (n.op != Op::kMux) return false;
  if (parent && parent->op == Op::kMux && slot == 2) return false;
  return ElseChainLength(n) >= 3;
}

ExprPtr OrTree(const std::vector<ExprPtr>& conds, size_t lo, size_t hi) {
  if (hi - lo == 1) return conds[lo];
  const size_t mid = lo + (hi - lo + 1) / 2;
  return rtl::MakeBinary(Op::kOr, OrTree(conds, lo, mid),
                         OrTree(conds, mid, hi));
}

// Selects values[i] for the first true conds[i] in [lo, hi), else `other`.
ExprPtr Selection(const std::vector<ExprPtr>& conds,
                  const std::vector<ExprPtr>& values, size_t lo, size_t hi,
                  const ExprPtr& other) {
  const size_t n = hi - lo;
  if (n == 0) return other;
  if (n <= 2) {
    return rtl::MakeMux(conds[lo], values[lo],
                        Selection(conds, values, lo + 1, hi, other));
  }
  // Split the n + 1 selectable values, larger half first. When one of the
  // first m conditions holds, the first true one lies among them, so the
  // last of them can serve as that half's default.
  const size_t m = (n + 2) / 2;
  ExprPtr first = Selection(conds, values, lo, lo + m - 1, values[lo + m - 1]);
  ExprPtr rest = Selection(conds, values, lo + m, hi, other);
  return rtl::MakeMux(OrTree(conds, lo, lo + m), first, rest);
}

std::string RestructureMux(rtl::DesignDraft& d, const RewriteSite& site) {
  ExprPtr& root = RootOf(d, site.owner);
  size_t length = 0;
  root = ReplaceNode(root, site.node, [&](const ExprPtr& n) {
    std::vector<ExprPtr> conds, values;
    ExprPtr m = n;
    while (m->op == Op::kMux) {
      conds.push_back(m->operands[0]);
      values.push_back(m->operands[1]);
      m = m->operands[2];
    }
    length = conds.size();
    return Selection(conds, values, 0, conds.size(), m);
  });
  return "restructured a " + std::to_string(length) +
         "-deep mux chain into a balanced selection tree";
}

// ---------------------------------------------------------------------------
// signal-replication and selective-register-insertion

int CountReads(const rtl::RtlDesign& design, const std::string& name) {
  int reads = 0;
  for (const rtl::StatementRef& s : design.Statements()) {
    rtl::VisitPreorder(*s.root, [&](const Expr& n, int) {
      if (n.op == Op::kVar && n.name == name) ++reads;
    });
  }
  return reads;
}

// Moves the later half of the reads of `from` (statement order, preorder)
// to `to`. Returns the number moved.
int RepartitionReads(rtl::DesignDraft& d, const std::string& from,
                     const std::string& to, int reads) {
  const int keep = (reads + 1) / 2;
  int seen = 0;
  for (ExprPtr* root : Roots(d)) {
    *root = ReplaceWhere(*root, [&](const ExprPtr& n) -> ExprPtr {
      if (n->op != Op::kVar || n->name != from) return nullptr;
      return seen++ < keep ? nullptr : rtl::MakeVar(to, n->width);
    });
  }
  return reads - keep;
}

bool IsInternalWire(const rtl::RtlDesign& design, const std::string& name) {
  auto info = design.Lookup(name);
  return info && info->kind == rtl::SignalKind::kWire;
}

std::string ReplicateSignal(rtl::DesignDraft& d, const rtl::RtlDesign& design,
                            const RewriteSite& site) {
  const std::string twin = FreshName(d, site.owner + "_rep");
  const int moved =
      RepartitionReads(d, site.owner, twin, CountReads(design, site.owner));
  AddWire(d, twin, RootOf(d, site.owner));
  return "replicated the driver of " + site.owner + " as " + twin +
         " and moved " + std::to_string(moved) + " readers to it";
}

std::string DuplicateRegister(rtl::DesignDraft& d,
                              const rtl::RtlDesign& design,
                              const RewriteSite& site) {
  const std::string twin = FreshName(d, site.owner + "_rep");
  const int moved =
      RepartitionReads(d, site.owner, twin, CountReads(design, site.owner));
  const rtl::Register* reg = design.FindRegister(site.owner);
  d.registers.push_back({twin, reg->width, RootOf(d, site.owner), {}});
  return "duplicated register " + site.owner + " as " + twin + " and moved " +
         std::to_string(moved) + " readers to it";
}

// ---------------------------------------------------------------------------
// constant-fold

bool IsConst(const Expr& e, uint64_t value) {
  return e.op == Op::kConst && e.value == value;
}

// The folded replacement for `n`, or null when nothing folds.
ExprPtr Fold(const Expr& node) {
  const Expr* n = &node;
  if (n->is_leaf()) return nullptr;
  const bool all_const =
      std::all_of(n->operands.begin(), n->operands.end(),
                  [](const ExprPtr& c) { return c->op == Op::kConst; });
  if (all_const) return rtl::MakeConst(n->width, rtl::EvaluateExpr(*n, {}));
  const uint64_t ones = rtl::WidthMask(n->width);
  const ExprPtr& a = n->operands[0];
  switch (n->op) {
    case Op::kAnd:
    case Op::kOr:
    case Op::kXor:
    case Op::kAdd: {
      const ExprPtr& b = n->operands[1];
      for (int side = 0; side < 2; ++side) {
        const ExprPtr& c = side == 0 ? a : b;
        const ExprPtr& other = side == 0 ? b : a;
        if (n->op == Op::kAnd && IsConst(*c, 0)) return rtl::MakeConst(n->width, 0);
        if (n->op == Op::kAnd && IsConst(*c, ones)) return other;
        if (n->op == Op::kOr && IsConst(*c, ones)) return rtl::MakeConst(n->width, ones);
        if (n->op != Op::kAnd && IsConst(*c, 0)) return other;
      }
      return nullptr;
    }
    case Op::kSub:
      return IsConst(*n->operands[1], 0) ? a : nullptr;
    case Op::kShl:
    case Op::kShr:
      return n->amount == 0 ? a : nullptr;
    case Op::kEq:
      return rtl::StructurallyEqual(*a, *n->operands[1]) ? rtl::MakeConst(1, 1)
                                                          : nullptr;
    case Op::kLt:
      return rtl::StructurallyEqual(*a, *n->operands[1]) ? rtl::MakeConst(1, 0)
                                                          : nullptr;
    case Op::kMux:
      if (a->op == Op::kConst) return a->value ? n->operands[1] : n->operands[2];
      if (rtl::StructurallyEqual(*n->operands[1], *n->operands[2])) {
        return n->operands[1];
      }
      return nullptr;
    default:
      return nullptr;
  }
}

std::string FoldConstant(rtl::DesignDraft& d, const RewriteSite& site) {
  ExprPtr& root = RootOf(d, site.owner);
  std::string before, after;
  root = ReplaceNode(root, site.node, [&](const ExprPtr& n) {
    ExprPtr folded = Fold(*n);
    before = rtl::PrintExpr(*n);
    after = rtl::PrintExpr(*folded);
    return folded;
  });
  return "folded (" + before + ") to " + after;
}

// ---------------------------------------------------------------------------
// decomposition

bool IsDecomposable(const Expr& root) {
  if (rtl::CountOperators(root) < 2) return false;
  return std::any_of(root.operands.begin(), root.operands.end(),
                     [](const ExprPtr& c) { return !c->is_leaf(); });
}

std::string Decompose(rtl::DesignDraft& d, const RewriteSite& site) {
  ExprPtr root = RootOf(d, site.owner);
  std::vector<ExprPtr> ops = root->operands;
  std::vector<std::string> names;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (ops[i]->is_leaf()) continue;
    std::string name = FreshName(d, site.owner + "_s" + std::to_string(i));
    AddWire(d, name, ops[i]);
    ops[i] = rtl::MakeVar(name, ops[i]->width);
    names.push_back(name);
  }
  RootOf(d, site.owner) = rtl::WithOperands(*root, std::move(ops));
  std::string list;
  for (const std::string& n : names) list += (list.empty() ? "" : ", ") + n;
  return "split " + site.owner + " into staged wires " + list;
}

}  // namespace

std::vector<RewriteSite> FindSites(const rtl::RtlDesign& design,
                                   StrategyId strategy) {
  if (!design.is_parsed()) return {};
  std::vector<RewriteSite> sites;
  const std::vector<rtl::StatementRef> statements = design.Statements();

  if (strategy == StrategyId::kCommonSubexpressionExtraction) {
    std::map<std::string, int> counts;
    std::vector<std::pair<std::string, RewriteSite>> first;
    for (const rtl::StatementRef& s : statements) {
      Walk(*s.root, [&](const Expr& n, int i, const Expr*, int) {
        if (n.is_leaf()) return;
        std::string key = rtl::PrintExpr(n);
        if (counts[key]++ == 0) {
          first.push_back({key, {s.owner, i, NodeLine(n, s)}});
        }
      });
    }
    for (const auto& [key, site] : first) {
      if (counts[key] >= 2) sites.push_back(site);
    }
    return sites;
  }

  for (const rtl::StatementRef& s : statements) {
    switch (strategy) {
      case StrategyId::kSignalReplication:
        if (!s.is_register && IsInternalWire(design, s.owner) &&
            CountReads(design, s.owner) >= 2) {
          sites.push_back({s.owner, 0, s.loc.line});
        }
        continue;
      case StrategyId::kSelectiveRegisterInsertion:
        if (s.is_register && CountReads(design, s.owner) >= 2) {
          sites.push_back({s.owner, 0, s.loc.line});
        }
        continue;
      case StrategyId::kDecomposition:
        if (IsDecomposable(*s.root)) {
          sites.push_back({s.owner, 0, NodeLine(*s.root, s)});
        }
        continue;
      default:
        break;
    }
    Walk(*s.root, [&](const Expr& n, int i, const Expr* parent, int slot) {
      bool hit = false;
      switch (strategy) {
        case StrategyId::kTreeRebalance:
          hit = IsRebalanceRoot(n, parent);
          break;
        case StrategyId::kConditionPrecompute:
          hit = n.op == Op::kMux && !n.operands[0]->is_leaf();
          break;
        case StrategyId::kMuxRestructure:
          hit = IsMuxChainRoot(n, parent, slot);
          break;
        case StrategyId::kConstantFold:
          hit = Fold(n) != nullptr;
          break;
        default:
          break;
      }
      if (hit) sites.push_back({s.owner, i, NodeLine(n, s)});
    });
  }
  return sites;
}

Rewrite ApplyAt(const rtl::RtlDesign& design, StrategyId strategy,
                const RewriteSite& site) {
  std::vector<RewriteSite> sites = FindSites(design, strategy);
  auto it = std::find_if(sites.begin(), sites.end(), [&](const RewriteSite& s) {
    return s.owner == site.owner && s.node == site.node;
  });
  if (it == sites.end()) {
    throw NotApplicableError(std::string(StrategyName(strategy)) +
                             " does not apply at " + site.node_id());
  }
  rtl::DesignDraft d = design.draft();
  std::string description;
  switch (strategy) {
    case StrategyId::kTreeRebalance:
      description = RebalanceTree(d, *it);
      break;
    case StrategyId::kCommonSubexpressionExtraction:
      description = ExtractCommonSubexpression(d, *it);
      break;
    case StrategyId::kConditionPrecompute:
      description = PrecomputeCondition(d, *it);
      break;
    case StrategyId::kMuxRestructure:
      description = RestructureMux(d, *it);
      break;
    case StrategyId::kSignalReplication:
      description = ReplicateSignal(d, design, *it);
      break;
    case StrategyId::kSelectiveRegisterInsertion:
      description = DuplicateRegister(d, design, *it);
      break;
    case StrategyId::kConstantFold:
      description = FoldConstant(d, *it);
      break;
    case StrategyId::kDecomposition:
      description = Decompose(d, *it);
      break;
  }
  return {rtl::Reparse(d, design.file()), strategy, *it, description};
}

std::vector<RewriteSite> FindSitesInRegion(const rtl::RtlDesign& design,
                                           StrategyId strategy,
                                           const timing::RtlRegion& region) {
  std::vector<RewriteSite> sites = FindSites(design, strategy);
  std::erase_if(sites, [&](const RewriteSite& s) {
    return s.line < region.start_line || s.line > region.end_line;
  });
  return sites;
}

Rewrite ApplyStrategy(const rtl::RtlDesign& design, StrategyId strategy,
                      const timing::RtlRegion& region) {
  std::vector<RewriteSite> sites = FindSitesInRegion(design, strategy, region);
  if (sites.empty()) {
    throw NotApplicableError(
        std::string(StrategyName(strategy)) + " has no site in lines " +
        std::to_string(region.start_line) + "-" +
        std::to_string(region.end_line));
  }
  return ApplyAt(design, strategy, sites.front());
}

}  // namespace rtlopt::proposer
