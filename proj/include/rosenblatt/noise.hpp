#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rosenblatt {

enum class NoiseKind { Rademacher, StandardGaussian };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// Counter-based random stream.
///
/// Draw k of stream `seed` is splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15),
/// so any draw can be computed without generating the ones before it, and
/// independent streams are obtained by deriving new seeds (derive_seed).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t counter) const;

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform(std::uint64_t counter) const;

private:
    std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of sub-stream `index` of `master`; used for per-path seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// i.i.d. mean-zero, unit-variance innovations xi_1..xi_n.
struct NoiseSequence {
    NoiseKind kind = NoiseKind::Rademacher;
    std::uint64_t seed = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Rademacher: xi_k = +1 if the top bit of draw k is set, else -1.
/// Gaussian: Box-Muller cosine branch on draws 2k and 2k+1.
NoiseSequence make_noise(NoiseKind kind, std::uint64_t seed, std::size_t n);

/// Deterministic all-ones prefix (the arbitrage witness path).
NoiseSequence all_ones_noise(std::size_t n);

}  // namespace rosenblatt
