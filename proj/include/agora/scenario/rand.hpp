#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace agora::scenario {

struct Point {
    double x = 0;
    double y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(const Point& a, const Point& b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Deterministic sampling helpers. Distribution shapes are implemented by
// hand (modulo ranges, sum-of-uniforms normal) instead of <random>
// distributions, whose outputs are implementation-defined; this keeps every
// generated scenario byte-identical across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    std::uint64_t u64(std::uint64_t lo, std::uint64_t hi) {  // inclusive
        return lo + eng_() % (hi - lo + 1);
    }

    double unit() { return double(eng_() >> 11) / double(std::uint64_t(1) << 53); }

    bool chance(double p) { return unit() < p; }

    // Irwin-Hall(12) approximation of a standard normal; exact-arithmetic
    // deterministic, adequate for synthesizing residence clouds.
    double normal(double mean, double stddev) {
        double s = 0;
        for (int i = 0; i < 12; ++i) s += unit();
        return mean + (s - 6.0) * stddev;
    }

    std::uint64_t raw() { return eng_(); }

    // Derives an independent stream for a named purpose.
    SeededRng fork(std::uint64_t salt) const {
        std::uint64_t x = seed_ ^ (salt * 0x9e3779b97f4a7c15ull);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4568bull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return SeededRng(x ^ (x >> 31));
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
};

}  // namespace agora::scenario
