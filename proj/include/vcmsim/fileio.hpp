#pragma once

// =============================================================================
// Small file utilities
// =============================================================================
// Whole-file reads and a stable content fingerprint. Every artifact the tools
// emit embeds the fingerprints of the configuration files that produced it,
// so a result can always be traced to exact inputs. FNV-1a is not
// cryptographic — it identifies configurations, it does not authenticate
// them.
// =============================================================================

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "vcmsim/errors.hpp"

namespace vcmsim {

/// Read an entire file as bytes.
inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw format_error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// 64-bit FNV-1a over a byte string.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x00000100000001b3ULL;
    }
    return h;
}

/// Fixed-width lowercase hex of a 64-bit value.
inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

/// Content fingerprint of a file (hex FNV-1a of its bytes).
inline std::string file_fingerprint(const std::string& path) {
    return hex64(fnv1a64(read_file_bytes(path)));
}

} // namespace vcmsim
