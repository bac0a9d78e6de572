#ifndef RTLOPT_PROPOSER_REWRITE_H_
#define RTLOPT_PROPOSER_REWRITE_H_

#include <string>
#include <vector>

#include "rtlopt/common/error.h"
#include "rtlopt/common/taxonomy.h"
#include "rtlopt/rtl/ast.h"
#include "rtlopt/timing/analysis.h"

namespace rtlopt::proposer {

// The region holds no structure the strategy can rewrite.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

// One place a strategy can rewrite: an expression node of a statement.
struct RewriteSite {
  std::string owner;  // assign target or register name
  int node = 0;       // preorder index within the statement
  int line = 0;       // source line of the node

  std::string node_id() const { return rtl::NodeId(owner, node); }
  friend bool operator==(const RewriteSite&, const RewriteSite&) = default;
};

struct Rewrite {
  rtl::RtlDesign design;
  StrategyId strategy = StrategyId::kTreeRebalance;
  RewriteSite site;
  std::string description;
};

// Every site of `design` where `strategy` applies, in statement order then
// preorder. The rewrites:
//
//   tree-rebalance       a chain of one associative operator whose depth
//                        exceeds ceil(log2(operands)) becomes a balanced tree
//   common-subexpression-extraction
//                        an operator subtree occurring twice or more moves
//                        into a fresh wire read by every occurrence
//   condition-precompute a compound mux condition moves into a 1-bit wire
//   mux-restructure      an else-chain of three or more muxes becomes a
//                        balanced selection tree; the upper select is the OR
//                        of the first half's conditions, which keeps the
//                        chain's priority order
//   signal-replication   a wire read twice or more gets a twin driver and the
//                        later half of its readers move to the twin
//   selective-register-insertion
//                        the same for a register: a duplicate register with
//                        the same next state (no added latency)
//   constant-fold        constant operands and identity or annihilator
//                        constants are folded
//   decomposition        the operator operands of a statement root move into
//                        staged wires
std::vector<RewriteSite> FindSites(const rtl::RtlDesign& design,
                                   StrategyId strategy);

// Rewrites `site`. Throws NotApplicableError when `site` is not one of
// FindSites(design, strategy).
Rewrite ApplyAt(const rtl::RtlDesign& design, StrategyId strategy,
                const RewriteSite& site);

// Sites whose line falls inside `region`.
std::vector<RewriteSite> FindSitesInRegion(const rtl::RtlDesign& design,
                                           StrategyId strategy,
                                           const timing::RtlRegion& region);

// Rewrites the first site inside `region`. Deterministic. Throws
// NotApplicableError when the region has no site.
Rewrite ApplyStrategy(const rtl::RtlDesign& design, StrategyId strategy,
                      const timing::RtlRegion& region);

}  // namespace rtlopt::proposer

#endif  // RTLOPT_PROPOSER_REWRITE_H_
