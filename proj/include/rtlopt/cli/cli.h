#ifndef RTLOPT_CLI_CLI_H_
#define RTLOPT_CLI_CLI_H_

#include <ostream>

namespace rtlopt::cli {

enum ExitCode {
  kExitOk = 0,
  // Bad invocation, configuration, or input file.
  kExitConfig = 1,
  // The design could not be evaluated (baseline or backend failure).
  kExitBackend = 2,
  // Golden and candidate port lists differ.
  kExitInterface = 3,
};

// Entry point of the rtlopt tool. Subcommands: optimize, eval, show,
// skills {list,export,import,merge}, report. Never throws.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace rtlopt::cli

#endif  // RTLOPT_CLI_CLI_H_
