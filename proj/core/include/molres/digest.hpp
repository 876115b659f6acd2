#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace molres {

/// FNV-1a 64-bit content digest, rendered as 16 hex characters.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

inline std::string content_digest(std::string_view data) { return hex16(fnv1a64(data)); }

} // namespace molres
