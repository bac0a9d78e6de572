#ifndef RTLOPT_TESTS_SUPPORT_CORPUS_H_
#define RTLOPT_TESTS_SUPPORT_CORPUS_H_

#include <filesystem>
#include <string>

#include "rtlopt/common/canonical_json.h"
#include "rtlopt/rtl/parser.h"

namespace rtlopt::testing {

inline std::filesystem::path CorpusPath(const std::string& name) {
  return std::filesystem::path(RTLOPT_CORPUS_DIR) / name;
}

// Parses tests/corpus/<name>, keeping the file name for region mapping.
inline rtl::RtlDesign LoadCorpus(const std::string& name) {
  return rtl::Parse(ReadFile(CorpusPath(name)), name);
}

}  // namespace rtlopt::testing

#endif  // RTLOPT_TESTS_SUPPORT_CORPUS_H_
