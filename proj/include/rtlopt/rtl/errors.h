#ifndef RTLOPT_RTL_ERRORS_H_
#define RTLOPT_RTL_ERRORS_H_

#include <string>

#include "rtlopt/common/error.h"
#include "rtlopt/rtl/ast.h"

namespace rtlopt::rtl {

enum class RtlErrorKind {
  kSyntax,
  kUndeclared,
  kRedeclared,
  kMultipleDrivers,
  kMissingDriver,
  kIllegalDriver,
  kCombinationalCycle,
  kWidthMismatch,
  kBadWidth,
  kBadSlice,
  kBadLiteral,
};

std::string_view RtlErrorKindName(RtlErrorKind kind);

// Parse or elaboration failure, located in the source text.
class RtlError : public Error {
 public:
  RtlError(RtlErrorKind kind, SourceLoc loc, std::string subject,
           std::string message);

  RtlErrorKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }
  // Offending identifier, when there is one.
  const std::string& subject() const { return subject_; }

 private:
  RtlErrorKind kind_;
  SourceLoc loc_;
  std::string subject_;
};

// Port vectors differ between two designs that must share an interface.
class InterfaceMismatchError : public Error {
 public:
  using Error::Error;
};

// Simulation stimulus does not fit the design.
class StimulusError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtlopt::rtl

#endif  // RTLOPT_RTL_ERRORS_H_
