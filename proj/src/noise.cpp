#include "rosenblatt/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rosenblatt {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::string_view to_string(NoiseKind kind) {
    return kind == NoiseKind::Rademacher ? "rademacher" : "gaussian";
}

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "rademacher") return NoiseKind::Rademacher;
    if (name == "gaussian") return NoiseKind::StandardGaussian;
    throw std::invalid_argument("unknown noise kind '" + std::string(name) + "' (expected rademacher|gaussian)");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    return splitmix64(seed_ + (counter + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ kStreamSalt) + (index + 1) * kGolden);
}

NoiseSequence make_noise(NoiseKind kind, std::uint64_t seed, std::size_t n) {
    NoiseSequence s{kind, seed, std::vector<double>(n)};
    const CounterRng rng(seed);
    if (kind == NoiseKind::Rademacher) {
        for (std::size_t k = 0; k < n; ++k) s.values[k] = (rng.bits(k) >> 63) ? 1.0 : -1.0;
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            const double u1 = rng.uniform(2 * k), u2 = rng.uniform(2 * k + 1);
            s.values[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
    }
    return s;
}

NoiseSequence all_ones_noise(std::size_t n) {
    return NoiseSequence{NoiseKind::Rademacher, 0, std::vector<double>(n, 1.0)};
}

}  // namespace rosenblatt
