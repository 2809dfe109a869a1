#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gafz {

using Complex = std::complex<double>;

/// One sample of the standard complex Gaussian law (density e^{-|z|^2}/pi).
/// Real and imaginary parts are independent N(0, 1/2), so E|a|^2 = 1.
using ComplexSample = Complex;

namespace detail {

// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
// One call encrypts a 128-bit counter under a 64-bit key and yields
// 128 bits of output; distinct counters give independent outputs.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

}  // namespace detail

/// Reproducible random stream. (seed, stream_id) fully determines the output
/// sequence; distinct stream_ids index statistically independent substreams,
/// so parallel workers can each own one without coordination. The stream is
/// counter-based: state is just a position, and copies advance independently.
class RandomStream {
public:
    RandomStream() = default;
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return block_ * 2 + word_; }

    std::uint64_t next_u64() {
        if (word_ == 0) {
            const std::array<std::uint32_t, 4> ctr = {
                static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
            const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                                      static_cast<std::uint32_t>(seed_ >> 32)};
            buf_ = detail::philox4x32_10(ctr, key);
        }
        const int base = word_ * 2;
        const std::uint64_t out =
            static_cast<std::uint64_t>(buf_[base]) | (static_cast<std::uint64_t>(buf_[base + 1]) << 32);
        if (++word_ == 2) {
            word_ = 0;
            ++block_;
        }
        return out;
    }

    /// Uniform on (0,1]; never returns 0, safe under log().
    double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform on [0,1).
    double uniform_half_open() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard complex Gaussian via the exact polar method:
    /// |a|^2 ~ Exp(1), arg(a) uniform.
    Complex standard_complex_gaussian() {
        const double radius = std::sqrt(-std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform_half_open();
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t block_ = 0;
    int word_ = 0;
    std::array<std::uint32_t, 4> buf_{};
};

/// count i.i.d. standard complex Gaussians; count = 0 yields an empty vector.
inline std::vector<ComplexSample> sample_standard_complex_gaussian(RandomStream& stream,
                                                                   std::size_t count) {
    std::vector<ComplexSample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(stream.standard_complex_gaussian());
    return out;
}

/// Exact transition of the stationary complex Ornstein-Uhlenbeck process
/// a(t) = e^{-t/2} W(e^t): conditionally on the current state,
///   a(t + dt) = e^{-dt/2} a(t) + sqrt(1 - e^{-dt}) xi
/// with xi a fresh standard complex Gaussian. The Brownian increment
/// W(e^{t+dt}) - W(e^t) has variance e^{t+dt} - e^t, which after the
/// e^{-(t+dt)/2} damping leaves exactly 1 - e^{-dt}; no discretization error.
inline ComplexSample ou_step(ComplexSample state, double dt, RandomStream& stream) {
    if (!(dt > 0.0)) throw std::invalid_argument("nonpositive time step");
    const double decay = std::exp(-0.5 * dt);
    const double noise = std::sqrt(-std::expm1(-dt));
    return decay * state + noise * stream.standard_complex_gaussian();
}

}  // namespace gafz
