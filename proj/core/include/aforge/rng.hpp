#pragma once

#include <cstdint>
#include <cmath>

namespace aforge {

/// Counter-based random stream. Each (key, counter) pair maps to a fixed
/// 64-bit word, so streams are reproducible across platforms and can be
/// split freely: derive a sub-stream key with derive() and never worry
/// about consumption order between workers.
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Stateless word at a given counter.
    std::uint64_t at(std::uint64_t counter) const {
        return mix(mix(key_) ^ mix(counter * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    }

    std::uint64_t next_u64() { return at(counter_++); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Independent sub-stream keyed by a tag.
    Rng derive(std::uint64_t tag) const { return Rng(mix(key_ ^ mix(tag))); }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace aforge
