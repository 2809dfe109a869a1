#include <catch2/catch_amalgamated.hpp>
#include <complex>
#include <vector>

#include "gafz/random.hpp"

using gafz::Complex;
using gafz::RandomStream;

TEST_CASE("philox known-answer vectors", "[random]") {
    // Reference vectors for Philox4x32-10 (Random123 kat_vectors).
    auto out = gafz::detail::philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = gafz::detail::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                      {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = gafz::detail::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("identical (seed, stream) replays bit-identically", "[random]") {
    RandomStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RandomStream c(42, 8);
    bool any_diff = false;
    RandomStream a2(42, 7);
    for (int i = 0; i < 64; ++i) any_diff |= (a2.next_u64() != c.next_u64());
    CHECK(any_diff);
}

TEST_CASE("standard complex gaussian moments", "[random]") {
    RandomStream stream(20240901, 0);
    const std::size_t n = 1'000'000;
    auto sample = gafz::sample_standard_complex_gaussian(stream, n);
    REQUIRE(sample.size() == n);

    double mod2 = 0.0;
    Complex mean(0, 0), square(0, 0);
    for (Complex a : sample) {
        mod2 += std::norm(a);
        mean += a;
        square += a * a;
    }
    mod2 /= static_cast<double>(n);
    mean /= static_cast<double>(n);
    square /= static_cast<double>(n);

    // Var(|a|^2) = 1 for the complex Gaussian, so 4 sigma = 4/sqrt(n).
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mod2 - 1.0) < 4.0 * se);
    CHECK(std::abs(mean) < 4.0 * se);
    CHECK(std::abs(square) < 4.0 * se);
}

TEST_CASE("count zero yields empty vector", "[random]") {
    RandomStream stream(1, 0);
    CHECK(gafz::sample_standard_complex_gaussian(stream, 0).empty());
}

TEST_CASE("ou step rejects nonpositive dt", "[random]") {
    RandomStream stream(5, 0);
    CHECK_THROWS_WITH(gafz::ou_step({0.0, 0.0}, 0.0, stream), "nonpositive time step");
    CHECK_THROWS_WITH(gafz::ou_step({0.0, 0.0}, -1.0, stream), "nonpositive time step");
}

TEST_CASE("ou step autocovariance matches exp(-dt/2)", "[random]") {
    // Oracle: a(t) = e^{-t/2} W(e^t) gives Cov(a(0), a(dt)) = e^{-dt/2}.
    const double dt = 0.7;
    const std::size_t n = 100'000;
    RandomStream stream(99, 0);
    Complex cov(0, 0);
    double var0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Complex a0 = stream.standard_complex_gaussian();  // stationary start
        const Complex a1 = gafz::ou_step(a0, dt, stream);
        cov += a0 * std::conj(a1);
        var0 += std::norm(a0);
    }
    cov /= static_cast<double>(n);
    var0 /= static_cast<double>(n);
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(cov - std::exp(-dt / 2.0)) < 3.0 * se);
    CHECK(std::abs(var0 - 1.0) < 4.0 * se);
}

TEST_CASE("ou step composition matches single step in distribution", "[random]") {
    const double s = 0.4, t = 0.9;
    const std::size_t n = 100'000;
    RandomStream stream(123, 1);
    double mod2_two = 0.0, mod2_one = 0.0;
    Complex cross_two(0, 0), cross_one(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex x = stream.standard_complex_gaussian();
        const Complex two = gafz::ou_step(gafz::ou_step(x, s, stream), t, stream);
        const Complex one = gafz::ou_step(x, s + t, stream);
        mod2_two += std::norm(two);
        mod2_one += std::norm(one);
        cross_two += x * std::conj(two);
        cross_one += x * std::conj(one);
    }
    const double se = 4.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mod2_two / n - 1.0) < se);
    CHECK(std::abs(mod2_one / n - 1.0) < se);
    // First cross moments agree: both equal e^{-(s+t)/2}.
    CHECK(std::abs(cross_two / static_cast<double>(n) - cross_one / static_cast<double>(n)) <
          2.0 * se);
}

TEST_CASE("ou step marginal stays standard complex gaussian along a path", "[random]") {
    const std::size_t n = 50'000;
    RandomStream stream(7, 3);
    double mod2 = 0.0;
    Complex square(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Complex a = stream.standard_complex_gaussian();
        for (int step = 0; step < 5; ++step) a = gafz::ou_step(a, 0.3, stream);
        mod2 += std::norm(a);
        square += a * a;
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mod2 / n - 1.0) < 4.0 * se);
    CHECK(std::abs(square / static_cast<double>(n)) < 4.0 * se);
}

TEST_CASE("ou step large dt forgets the initial state", "[random]") {
    const std::size_t n = 50'000;
    RandomStream stream(8, 0);
    double mod2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) mod2 += std::norm(gafz::ou_step({25.0, -25.0}, 200.0, stream));
    CHECK(std::abs(mod2 / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("ou step small dt stays near the state", "[random]") {
    RandomStream stream(9, 0);
    const Complex x(0.8, -0.3);
    const Complex y = gafz::ou_step(x, 1e-12, stream);
    CHECK(std::abs(y - x) < 1e-5);
}
