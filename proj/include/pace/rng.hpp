#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace pace {

// Deterministic random source. Distribution transforms are hand-rolled so
// that identical seeds give identical streams regardless of the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (spare discarded to keep the stream
    // position a simple function of call count).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Uniform integer in [0, n).
    std::int64_t randint(std::int64_t n) {
        return static_cast<std::int64_t>(uniform() * static_cast<double>(n)) % n;
    }

    std::string serialize() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }

    void deserialize(const std::string& state) {
        std::istringstream is(state);
        is >> gen_;
    }

private:
    std::mt19937_64 gen_;
};

// FNV-1a, used for seed derivation and parameter fingerprints.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, const std::string& purpose) {
    std::uint64_t h = fnv1a64(purpose.data(), purpose.size());
    return base ^ h;
}

}  // namespace pace
