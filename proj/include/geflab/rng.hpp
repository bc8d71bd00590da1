#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace geflab {

// Seeded, splittable random stream: xoshiro256++ with its state expanded from
// (master_seed, task_id) through SplitMix64.  Every independent unit of work
// (a GEF sample, an MC chunk) owns its own stream, so results are
// bit-reproducible and independent of thread scheduling.
//
// Gaussian variates are produced by explicit Box-Muller so that the output
// does not depend on the standard library's normal_distribution internals.
class RngStream {
  public:
    RngStream(uint64_t master_seed, uint64_t task_id) {
        uint64_t x = master_seed;
        x ^= 0x9e3779b97f4a7c15ull * (task_id + 1);
        for (auto& si : s_) {
            si = splitmix64(x);
        }
        // Guard against the all-zero state (cannot occur for random x, but
        // master_seed/task_id are user-controlled).
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard real normal N(0,1).  Consumes exactly two words.
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Circularly symmetric complex normal with E|Z|^2 = 1, i.e. independent
    // real and imaginary parts of variance 1/2 each.  Consumes two words.
    std::complex<double> cnormal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double rad = std::sqrt(-std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

  private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

} // namespace geflab
