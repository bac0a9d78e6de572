#include "rtlopt/rtl/errors.h"

namespace rtlopt::rtl {

std::string_view RtlErrorKindName(RtlErrorKind kind) {
  switch (kind) {
    case RtlErrorKind::kSyntax:
      return "syntax error";
    case RtlErrorKind::kUndeclared:
      return "undeclared identifier";
    case RtlErrorKind::kRedeclared:
      return "redeclared identifier";
    case RtlErrorKind::kMultipleDrivers:
      return "multiple drivers";
    case RtlErrorKind::kMissingDriver:
      return "missing driver";
    case RtlErrorKind::kIllegalDriver:
      return "illegal driver";
    case RtlErrorKind::kCombinationalCycle:
      return "combinational cycle";
    case RtlErrorKind::kWidthMismatch:
      return "width mismatch";
    case RtlErrorKind::kBadWidth:
      return "bad width";
    case RtlErrorKind::kBadSlice:
      return "bad slice";
    case RtlErrorKind::kBadLiteral:
      return "bad literal";
  }
  return "error";
}

namespace {

std::string Format(RtlErrorKind kind, SourceLoc loc,
                   const std::string& message) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
         std::string(RtlErrorKindName(kind)) + ": " + message;
}

}  // namespace

RtlError::RtlError(RtlErrorKind kind, SourceLoc loc, std::string subject,
                   std::string message)
    : Error(Format(kind, loc, message)),
      kind_(kind),
      loc_(loc),
      subject_(std::move(subject)) {}

}  // namespace rtlopt::rtl
