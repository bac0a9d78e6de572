#include "rtlopt/eda/external_backend.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <regex>
#include <sstream>

#include "rtlopt/common/canonical_json.h"
#include "rtlopt/common/hash.h"
#include "rtlopt/rtl/errors.h"

namespace rtlopt::eda {

namespace fs = std::filesystem;

std::string CommandResult::StderrTail(int lines) const {
  size_t pos = stderr_text.size();
  if (pos > 0 && stderr_text[pos - 1] == '\n') --pos;
  for (int seen = 0; pos > 0; --pos) {
    if (stderr_text[pos - 1] == '\n' && ++seen == lines) break;
  }
  return stderr_text.substr(pos);
}

std::string SubstitutePlaceholders(
    const std::string& tmpl,
    const std::map<std::string, std::string>& bindings) {
  static const std::regex kPlaceholder(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
  std::string out;
  auto begin = std::sregex_iterator(tmpl.begin(), tmpl.end(), kPlaceholder);
  size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    auto binding = bindings.find(m[1].str());
    if (binding == bindings.end()) {
      throw ConfigError("command template '" + tmpl +
                        "' uses unbound placeholder {" + m[1].str() + "}");
    }
    out.append(tmpl, last, m.position(0) - last);
    out += binding->second;
    last = m.position(0) + m.length(0);
  }
  out.append(tmpl, last);
  return out;
}

namespace {

void SetNonBlocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

CommandResult RunExternal(const std::string& tmpl,
                          const std::map<std::string, std::string>& bindings,
                          const fs::path& workdir, double timeout_s) {
  CommandResult result;
  result.command = SubstitutePlaceholders(tmpl, bindings);
  fs::create_directories(workdir);

  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0) throw BackendError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    if (chdir(workdir.c_str()) != 0) _exit(127);
    execl("/bin/sh", "sh", "-c", result.command.c_str(),
          static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(out_pipe[1]);
  close(err_pipe[1]);
  SetNonBlocking(out_pipe[0]);
  SetNonBlocking(err_pipe[0]);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_s));
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.stdout_text, &result.stderr_text};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    int n = poll(fds, 2, static_cast<int>(std::min<int64_t>(left.count(), 1000)));
    if (n < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || fds[i].revents == 0) continue;
      ssize_t got = read(fds[i].fd, buf, sizeof(buf));
      if (got > 0) {
        sinks[i]->append(buf, static_cast<size_t>(got));
      } else if (got == 0 || (errno != EAGAIN && errno != EINTR)) {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (pollfd& p : fds) {
    if (p.fd >= 0) close(p.fd);
  }
  // The streams may close before the process exits.
  int status = 0;
  while (!result.timed_out) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid || (done < 0 && errno != EINTR)) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      break;
    }
    usleep(10000);
  }
  if (result.timed_out) {
    kill(-pid, SIGKILL);
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
  }
  if (!result.timed_out && WIFEXITED(status)) {
    result.exit_status = WEXITSTATUS(status);
  }
  return result;
}

ExternalBackend::ExternalBackend(ExternalBackendConfig config, double clock_ns,
                                 fs::path work_root)
    : config_(std::move(config)),
      clock_ns_(clock_ns),
      work_root_(std::move(work_root)) {}

fs::path ExternalBackend::DesignDir(const rtl::RtlDesign& design) const {
  return work_root_ / ContentHash(design.source());
}

std::map<std::string, std::string> ExternalBackend::Bindings(
    const rtl::RtlDesign& design, const fs::path& dir) const {
  std::ostringstream clock;
  clock << clock_ns_;
  return {{"design_dir", dir.string()},
          {"top", design.name()},
          {"clock_ns", clock.str()}};
}

fs::path ExternalBackend::Stage(const rtl::RtlDesign& design) const {
  fs::path dir = DesignDir(design);
  fs::create_directories(dir);
  std::string file =
      SubstitutePlaceholders(config_.design_filename, {{"top", design.name()}});
  WriteFileAtomic(dir / file, design.source());
  return dir;
}

namespace {

double Extract(const std::string& pattern, const std::string& text,
               const std::string& what) {
  std::smatch m;
  std::regex re(pattern);
  if (!std::regex_search(text, m, re) || m.size() < 2) {
    throw BackendError("extraction pattern for " + what + " did not match");
  }
  try {
    return std::stod(m[1].str());
  } catch (const std::exception&) {
    throw BackendError("extracted " + what + " '" + m[1].str() +
                       "' is not a number");
  }
}

}  // namespace

SynthesisResult ExternalBackend::Synthesize(const rtl::RtlDesign& design) const {
  fs::path dir = Stage(design);
  CommandResult run = RunExternal(config_.synth_command, Bindings(design, dir),
                                  dir, config_.timeout_s);
  if (run.timed_out) {
    throw BackendError("synthesis timed out after " +
                       std::to_string(config_.timeout_s) + " s");
  }
  if (run.exit_status != 0) {
    throw BackendError("synthesis exited with status " +
                       std::to_string(run.exit_status) + ": " +
                       run.StderrTail());
  }
  std::string text;
  if (config_.report_files.empty()) {
    text = run.stdout_text;
  } else {
    for (const std::string& f : config_.report_files) {
      fs::path p = dir / f;
      if (!fs::exists(p)) throw BackendError("missing report file " + p.string());
      text += ReadFile(p);
      text += '\n';
    }
  }
  SynthesisResult out;
  out.metrics.wns = Extract(config_.wns_pattern, text, "WNS");
  out.metrics.tns = Extract(config_.tns_pattern, text, "TNS");
  out.metrics.area = Extract(config_.area_pattern, text, "area");
  // Tools report TNS as a positive magnitude or a negative sum; the
  // canonical form is non-positive.
  if (out.metrics.tns > 0.0) out.metrics.tns = -out.metrics.tns;
  out.report.clock_ns = clock_ns_;
  if (!config_.timing_report.empty()) {
    fs::path p = dir / config_.timing_report;
    if (!fs::exists(p)) throw BackendError("missing timing report " + p.string());
    try {
      out.report = timing::TimingReportFromJson(nlohmann::json::parse(ReadFile(p)));
      out.report.Normalize();
    } catch (const std::exception& e) {
      throw BackendError("bad timing report " + p.string() + ": " + e.what());
    }
  }
  return out;
}

EquivalenceResult ExternalBackend::CheckEquivalence(
    const rtl::RtlDesign& golden, const rtl::RtlDesign& candidate) const {
  if (golden.is_parsed() && candidate.is_parsed() &&
      !golden.SameInterface(candidate)) {
    throw rtl::InterfaceMismatchError("port lists of '" + golden.name() +
                                      "' and '" + candidate.name() + "' differ");
  }
  fs::path golden_dir = Stage(golden);
  fs::path dir = Stage(candidate);
  auto bindings = Bindings(candidate, dir);
  bindings["golden_dir"] = golden_dir.string();
  CommandResult run =
      RunExternal(config_.sec_command, bindings, dir, config_.timeout_s);
  EquivalenceResult r;
  r.mode = SecMode::kExternal;
  if (run.timed_out) {
    r.pass = false;
    r.note = "SEC timed out after " + std::to_string(config_.timeout_s) + " s";
    return r;
  }
  r.pass = run.exit_status == 0;
  if (r.pass && !config_.sec_pass_pattern.empty()) {
    r.pass = std::regex_search(run.stdout_text, std::regex(config_.sec_pass_pattern));
  }
  if (!r.pass) {
    r.note = "SEC exited with status " + std::to_string(run.exit_status);
    std::string tail = run.StderrTail(5);
    if (!tail.empty()) r.note += ": " + tail;
  }
  return r;
}

}  // namespace rtlopt::eda
