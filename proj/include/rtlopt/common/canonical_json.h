#ifndef RTLOPT_COMMON_CANONICAL_JSON_H_
#define RTLOPT_COMMON_CANONICAL_JSON_H_

#include <filesystem>
#include <string>

#include "json.hpp"

namespace rtlopt {

// Serializes `value` with sorted object keys, two-space indentation, a
// trailing newline and floating-point numbers printed with 17 significant
// digits. Equal documents always produce identical bytes, and dumping a
// reparsed document reproduces the original text.
std::string CanonicalDump(const nlohmann::json& value);

// Writes `contents` to `path` through a sibling temporary file and a rename,
// so readers never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace rtlopt

#endif  // RTLOPT_COMMON_CANONICAL_JSON_H_
