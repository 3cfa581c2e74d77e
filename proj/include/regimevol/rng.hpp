#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace regimevol {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Every draw is a pure function of (key, counter), so samples are addressable
// by (seed, path, step, stream) and independent of execution order.
struct Philox4x32 {
    static constexpr std::uint32_t kMultA = 0xD2511F53u;
    static constexpr std::uint32_t kMultB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t prod0 = std::uint64_t(kMultA) * ctr[0];
            const std::uint64_t prod1 = std::uint64_t(kMultB) * ctr[2];
            const auto hi0 = std::uint32_t(prod0 >> 32), lo0 = std::uint32_t(prod0);
            const auto hi1 = std::uint32_t(prod1 >> 32), lo1 = std::uint32_t(prod1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        return ctr;
    }
};

// Logical substreams; keeps chain draws, Brownian increments, and retries
// from ever colliding in counter space.
enum class RngStream : std::uint32_t {
    GaussianIncrement = 0,
    ChainExact = 1,
    ChainDiscretized = 2,
    RejectionRetry = 3,
    PowerIteration = 4,
};

// Addressable random source: one 128-bit Philox block per (path, step, stream, retry).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)} {}

    std::array<std::uint32_t, 4> raw(std::uint64_t step, std::uint32_t path,
                                     RngStream stream, std::uint32_t retry = 0) const {
        const std::array<std::uint32_t, 4> ctr = {
            std::uint32_t(step), std::uint32_t(step >> 32) ^ retry, path,
            std::uint32_t(stream)};
        return Philox4x32::block(ctr, key_);
    }

    // Two uniforms in (0,1), 53-bit resolution, never exactly 0.
    std::array<double, 2> uniform_pair(std::uint64_t step, std::uint32_t path,
                                       RngStream stream, std::uint32_t retry = 0) const {
        const auto w = raw(step, path, stream, retry);
        return {to_unit((std::uint64_t(w[0]) << 32) | w[1]),
                to_unit((std::uint64_t(w[2]) << 32) | w[3])};
    }

    double uniform(std::uint64_t step, std::uint32_t path, RngStream stream,
                   std::uint32_t retry = 0) const {
        return uniform_pair(step, path, stream, retry)[0];
    }

    // Box-Muller; one block yields one N(0,1) deviate (second root unused so
    // that draw n never depends on draw n-1).
    double standard_normal(std::uint64_t step, std::uint32_t path, RngStream stream,
                           std::uint32_t retry = 0) const {
        const auto u = uniform_pair(step, path, stream, retry);
        return std::sqrt(-2.0 * std::log(u[0])) * std::cos(2.0 * M_PI * u[1]);
    }

    std::uint64_t seed() const { return std::uint64_t(key_[0]) | (std::uint64_t(key_[1]) << 32); }

private:
    static double to_unit(std::uint64_t bits) {
        const std::uint64_t mantissa = bits >> 11;  // 53 bits
        return (double(mantissa) + 0.5) * 0x1.0p-53;
    }

    std::array<std::uint32_t, 2> key_;
};

}  // namespace regimevol
