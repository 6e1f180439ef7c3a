#pragma once

#include <cstdint>

namespace lfc {

// Counter-based pseudo-random values built on the splitmix64 finalizer.
// Every consumer derives values as a pure function of (seed, role, counters),
// so results are independent of evaluation order, thread schedule and
// platform. Streams are split by role constant, one role per mask plane
// (lenslet mask, sensor mask, key perturbation, occlusion shuffle).
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace rng_role {
constexpr uint64_t lenslet_mask = 1;  // per-lenslet phase/amplitude mask
constexpr uint64_t sensor_mask = 2;   // full-aperture amplitude mask at the sensor
constexpr uint64_t perturb = 3;       // key perturbation multipliers
constexpr uint64_t occlude = 4;       // random occlusion pixel choice
}  // namespace rng_role

inline uint64_t stream_value(uint64_t seed, uint64_t role, uint64_t a, uint64_t b) {
    uint64_t h = splitmix64(seed ^ splitmix64(role));
    h = splitmix64(h ^ a);
    return splitmix64(h ^ b);
}

// Uniform double in [0,1) from the top 53 bits (exact mantissa width).
inline double to_unit(uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double uniform01(uint64_t seed, uint64_t role, uint64_t a, uint64_t b) {
    return to_unit(stream_value(seed, role, a, b));
}

// Small sequential generator for the few places that want a stream
// (occlusion shuffles). Same splitmix64 core.
class SequentialRng {
  public:
    explicit SequentialRng(uint64_t seed) : state_(seed) {}
    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // unbiased integer in [0, n) by rejection
    uint64_t below(uint64_t n) {
        uint64_t limit = ~0ull - (~0ull % n);
        uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

  private:
    uint64_t state_;
};

}  // namespace lfc
