#pragma once

// Deterministic counter-based randomness. Each (seed, stream) pair yields an
// independent Gaussian stream; streams never share state, so rounding trials
// can run in any order or in parallel with identical results.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qmc {

/// 64-bit seed for the counter-based generator. Same seed, same bits out.
struct RngSeed {
    std::uint64_t value = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Standard-normal stream keyed by (seed, stream). Values come from
/// splitmix64 of a running counter pushed through Box-Muller, so the k-th
/// draw is a pure function of (seed, stream, k).
class NormalStream {
  public:
    NormalStream(RngSeed seed, std::uint64_t stream)
        : key_(detail::splitmix64(seed.value ^
                                  detail::splitmix64(0x6a09e667f3bcc909ULL + stream))) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

  private:
    // uniform in the open interval (0,1)
    double next_unit() {
        std::uint64_t x = detail::splitmix64(key_ + counter_++);
        return (double(x >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qmc
