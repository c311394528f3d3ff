#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace meforge::rng {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double to_unit(std::uint64_t x) {
    // 53 high bits -> [0, 1)
    return static_cast<double>(x >> 11) * 0x1p-53;
}

/// Keyed counter-based pseudorandom function. Pure 64-bit integer
/// arithmetic, so values are identical across platforms and runs.
class Prf {
public:
    explicit Prf(std::uint64_t seed) : key_(mix64(seed ^ 0xa0761d6478bd642fULL)) {}

    std::uint64_t operator()(std::string_view bytes, std::uint64_t counter) const {
        std::uint64_t h = key_ ^ mix64(0x1000193ULL + bytes.size());
        std::uint64_t chunk = 0;
        int filled = 0;
        for (unsigned char c : bytes) {
            chunk |= static_cast<std::uint64_t>(c) << (8 * filled);
            if (++filled == 8) {
                h = mix64(h ^ chunk);
                chunk = 0;
                filled = 0;
            }
        }
        if (filled > 0) h = mix64(h ^ chunk);
        return mix64(h ^ mix64(counter));
    }

    double unit(std::string_view bytes, std::uint64_t counter) const {
        return to_unit((*this)(bytes, counter));
    }

private:
    std::uint64_t key_;
};

/// Substream seed for task `index` under a master seed. Partitioned
/// Monte Carlo work derives one substream per task and merges results
/// in task-index order.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master ^ 0x8bb84b93962eacc9ULL) + index);
}

/// Sequential deterministic stream (SplitMix64). Not a std engine on
/// purpose: libstdc++ distributions are implementation-defined, and the
/// project pins numeric payloads bit-for-bit.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_unit() { return to_unit(next_u64()); }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny compared to 2^64
        // in every use, so the bias is far below double precision.
        return next_u64() % n;
    }

    /// Standard normal via Box-Muller (deterministic, portable).
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;  // (0, 1]
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Compensated (Kahan) accumulator for long partial sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace meforge::rng
