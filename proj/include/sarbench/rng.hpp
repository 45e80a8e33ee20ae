/**
 * @file rng.hpp
 * @brief Deterministic pseudorandom source used by every stochastic step.
 *
 * Generator: xoshiro256** (Blackman & Vigna), state seeded by four successive
 * SplitMix64 outputs of the 64-bit seed. Only integer arithmetic is involved in
 * next_u64(), so a given seed yields the same raw sequence on every platform.
 *
 * Derived variates:
 *   - uniform():       (next_u64() >> 11) * 2^-53, in [0, 1)
 *   - uniform_index(): Lemire's multiply-shift with rejection (unbiased)
 *   - normal():        Marsaglia polar method, spare value cached
 *   - gamma(shape):    Marsaglia-Tsang squeeze, shape >= 1
 *
 * Instances are single-owner; derive() produces independent child streams.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace sarbench {

/// SplitMix64 finalizer; also used to derive per-sample seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Deterministic seed for stream `stream` of parent seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) noexcept;

    SeededRng(const SeededRng&) = delete;
    SeededRng& operator=(const SeededRng&) = delete;
    SeededRng(SeededRng&&) noexcept = default;
    SeededRng& operator=(SeededRng&&) noexcept = default;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;
    double normal() noexcept;
    double normal(double mean, double std) noexcept { return mean + std * normal(); }
    double gamma(double shape, double scale = 1.0) noexcept;

    /// k distinct indices from [0, n), uniformly, in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    /// Independent child generator; does not advance this one.
    SeededRng derive(std::uint64_t stream) const noexcept {
        return SeededRng(derive_seed(seed_, stream));
    }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    std::optional<double> spare_normal_;
};

}  // namespace sarbench
