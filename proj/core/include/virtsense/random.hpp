#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace virtsense {

/// Seeded generator whose distributions are implemented here rather than
/// taken from <random>, so a given seed yields identical streams on every
/// standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer on [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);
    double normal();

    /// k distinct indices from [0, n), in sampling order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);
    /// Index drawn with probability weights[i] / sum(weights).
    std::size_t weighted_index(std::span<const double> weights, double total);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(i)]);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace virtsense
