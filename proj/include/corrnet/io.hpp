#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

namespace corrnet {

// Shortest stable decimal form used by every CSV writer, so repeated runs
// of a command are byte-identical.
inline std::string fmt_g(double v, int significant = 10) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
    return buf;
}

inline std::string fmt_f(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s = buf;
    // A value that rounds to zero prints without the residual sign.
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
}

// FNV-1a, used for the provenance config hash in output headers.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// mt19937_64 is pinned by the standard; the reductions below avoid the
// implementation-defined std::uniform_*_distribution so sampled output is
// identical across platforms.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t reject_from =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = gen();
    while (x >= reject_from) x = gen();
    return x % n;
}

inline double uniform_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace corrnet
