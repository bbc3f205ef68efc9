#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

namespace mzp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Wall-clock deadline. A non-finite limit never expires.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    explicit Deadline(double seconds = kInf) : start_(Clock::now()), limit_(seconds) {}

    double elapsed() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }
    double remaining() const { return limit_ - elapsed(); }
    bool expired() const { return limit_ < kInf && elapsed() >= limit_; }
    double limit() const { return limit_; }

    /// A child deadline capped by this one.
    Deadline sub(double seconds) const {
        double r = remaining();
        return Deadline(seconds < r ? seconds : r);
    }

private:
    Clock::time_point start_;
    double limit_;
};

/// Portable RNG helpers. std distributions are implementation-defined, so
/// draws that must replay across toolchains go through these.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

/// 64-bit FNV-1a, used for content digests (not for security).
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex_digest(std::uint64_t h) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace mzp
