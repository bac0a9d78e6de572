#ifndef RTLOPT_RTL_PARSER_H_
#define RTLOPT_RTL_PARSER_H_

#include <string>
#include <string_view>

#include "rtlopt/rtl/ast.h"

namespace rtlopt::rtl {

// Parses and elaborates RTL-lite source:
//
//   module <name>(input [W-1:0] a, output y, ...);
//     wire [W-1:0] t, u;
//     reg [W-1:0] q;
//     assign t = <expr>;
//     always_ff begin
//       q <= <expr>;
//     end
//   endmodule
//
// Expression operators, loosest binding first: ?:, |, ^, &, ==, <,
// << >> (constant amount), + -, ~. Literals are sized (8'd3, 4'b1010, 8'hff).
// Throws RtlError on syntax or semantic errors.
RtlDesign Parse(std::string_view source, std::string file = "");

// Validates a draft and builds the immutable design. `source` is kept as-is.
RtlDesign Elaborate(DesignDraft draft, std::string source, std::string file);

// Canonical text: one statement per line, two-space indent. Parsing the
// output reproduces a structurally identical design.
std::string Print(const DesignDraft& design);
std::string Print(const RtlDesign& design);
std::string PrintExpr(const Expr& e);

// Parse(Print(draft)); rewrites use this so source and source map agree.
RtlDesign Reparse(const DesignDraft& draft, std::string file = "");

// Same ports, wires, registers and statements, ignoring source positions.
bool StructurallyIdentical(const RtlDesign& a, const RtlDesign& b);

}  // namespace rtlopt::rtl

#endif  // RTLOPT_RTL_PARSER_H_
