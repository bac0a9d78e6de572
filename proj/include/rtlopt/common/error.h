#ifndef RTLOPT_COMMON_ERROR_H_
#define RTLOPT_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace rtlopt {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or incomplete configuration, detected before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtlopt

#endif  // RTLOPT_COMMON_ERROR_H_
