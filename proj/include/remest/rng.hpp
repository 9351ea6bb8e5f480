#pragma once

#include <cstdint>

namespace remest {

/// SplitMix64 generator. Small, fast, and trivially seedable, which is what
/// the replication scheme needs: substreams are derived from (master seed,
/// replication index) by a fixed counter formula, so replication r always
/// sees the same stream no matter how work is scheduled across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Substream for replication `rep` of master seed `master`.
    static Rng for_replication(std::uint64_t master, std::uint64_t rep) {
        return Rng(mix(master + 0x9E3779B97F4A7C15ull * (rep + 1)));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
        z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
        return z ^ (z >> 33);
    }

    std::uint64_t state_;
};

/// Compensated (Kahan) accumulator for long sums compared at 1e-9.
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

} // namespace remest
