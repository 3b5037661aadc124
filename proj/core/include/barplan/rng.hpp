#pragma once

#include <cstdint>
#include <random>

namespace barplan {

namespace detail {
// splitmix64; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Seeded random stream. Planner operations take an RngStream by reference;
/// independent work units (one per search candidate, one per IK restart
/// batch) get their own stream via split(), so results do not depend on
/// evaluation order. Splitting is pure: split(k) on equal-seed streams
/// yields equal child streams.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(detail::mix64(seed)) {}

    /// Derive an independent child stream from this stream's seed and a key.
    /// Does not advance this stream.
    RngStream split(std::uint64_t key) const {
        return RngStream(detail::mix64(seed_ ^ detail::mix64(key)));
    }

    RngStream split2(std::uint64_t k1, std::uint64_t k2) const {
        return split(detail::mix64(k1) ^ detail::mix64(detail::mix64(k2) + 0x517cc1b727220a95ULL));
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace barplan
