#pragma once

#include <cstdint>
#include <string_view>

namespace qcert {

inline constexpr std::string_view kToolVersion = "qcert 0.1.0";

// FNV-1a, used for config hashes and payload fingerprints in file headers.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    return fnv1a64(std::string_view(static_cast<const char*>(data), len));
}

}  // namespace qcert
