#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace navsim {

// splitmix64: used both to derive child seeds and to hash tag strings so
// that every randomized component gets an independent, reproducible stream.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_tag(std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a, folded through splitmix
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    uint64_t s = h;
    return splitmix64(s);
}

// Child seed for a named sub-stream: derive_seed(seed, "lidar"), etc.
inline uint64_t derive_seed(uint64_t parent, std::string_view tag) {
    uint64_t s = parent ^ hash_tag(tag);
    return splitmix64(s);
}

inline uint64_t derive_seed(uint64_t parent, uint64_t index) {
    uint64_t s = parent ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

// Deterministic RNG wrapper. Raw mt19937_64 draws are mapped to doubles by
// hand because the standard <random> distributions are
// implementation-defined; logs must be byte-identical for a given seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1): 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Modulo bias is < n / 2^64, far below any
    // tolerance in this project, and keeps the draw count fixed at one.
    uint64_t uniform_int(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    // Box-Muller; caches the spare so draw count stays deterministic.
    double normal(double mean, double stddev) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return mean + stddev * r * std::cos(a);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace navsim
