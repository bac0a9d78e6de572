#ifndef RTLOPT_COMMON_HASH_H_
#define RTLOPT_COMMON_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace rtlopt {

// 64-bit FNV-1a. Stable across platforms; used for content addressing.
uint64_t Fnv1a64(std::string_view data);

// 16 lowercase hex digits of Fnv1a64(data).
std::string ContentHash(std::string_view data);

}  // namespace rtlopt

#endif  // RTLOPT_COMMON_HASH_H_
