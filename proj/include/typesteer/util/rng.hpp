#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace typesteer {

// Deterministic, platform-independent generator (splitmix64 core).
// std::mt19937 is portable but its distributions are not; all sampling
// helpers here are fully specified.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). n must be > 0.
    size_t below(size_t n) {
        // Multiply-shift; bias is negligible for the small n used here.
        return static_cast<size_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform in [0, 1).
    double real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return real() < p; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = real();
        double u2 = real();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream; identical for (seed, index) regardless of
    // how the parent has been used.
    Rng child(uint64_t index) const {
        Rng mixer(state_ ^ (0xd6e8feb86659fd93ull * (index + 1)));
        return Rng(mixer.next_u64());
    }

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace typesteer
