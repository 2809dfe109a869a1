#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "gafz/random.hpp"
#include "gafz/reconstruct.hpp"
#include "gafz/series.hpp"
#include "gafz/zeros.hpp"

using gafz::Complex;
using gafz::RandomStream;
using gafz::SeriesSpec;

namespace {

double median(std::vector<double> v) {
    REQUIRE(!v.empty());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

SeriesSpec spec_for_radius(double rho, double radius,
                           gafz::Conditioning cond = gafz::Conditioning::none) {
    SeriesSpec s;
    s.rho = rho;
    s.truncation_degree = gafz::truncation_degree_for(rho, radius, 1e-8);
    s.conditioning = cond;
    return s;
}

}  // namespace

TEST_CASE("reconstruction constants", "[reconstruct]") {
    // Closed forms evaluated independently to 30 digits (mpmath oracle).
    CHECK(gafz::c_rho(1.0) == Catch::Approx(0.92569019319303263).epsilon(1e-12));
    CHECK(gafz::c_prime_rho(1.0) == Catch::Approx(1.23539674258752353).epsilon(1e-12));
    CHECK(gafz::c_rho(2.0) == Catch::Approx(0.57179732465794393).epsilon(1e-12));
    CHECK(gafz::c_rho(0.5) == Catch::Approx(0.99042121807717401).epsilon(1e-12));
}

TEST_CASE("reconstruct |f(0)|: origin zero short-circuits to 0", "[reconstruct]") {
    const auto res = gafz::reconstruct_abs_f0({Complex(0, 0), Complex(0.3, 0)}, 1.0, 2);
    CHECK(res.estimate == 0.0);
    CHECK(res.terms_used == 2);
}

TEST_CASE("reconstruct |f(0)|: partial products end at the estimate", "[reconstruct]") {
    const std::vector<Complex> zeros{Complex(0.2, 0.1), Complex(-0.1, 0.4), Complex(0.5, -0.3)};
    const auto res = gafz::reconstruct_abs_f0(zeros, 1.5, 3);
    REQUIRE(res.partial_products.size() == 3);
    CHECK(res.partial_products.back() == res.estimate);
    CHECK(res.estimate > 0.0);
    CHECK_THROWS(gafz::reconstruct_abs_f0({Complex(0.5, 0), Complex(0.1, 0)}, 1.0, 2));
}

TEST_CASE("reconstruct |f(0)|: MC accuracy against the sampled truth", "[reconstruct]") {
    const std::size_t runs = 100;
    std::vector<double> err_090, err_095;
    for (std::size_t i = 0; i < runs; ++i) {
        RandomStream s1(61, i), s2(61, i);
        const auto cv95 = gafz::sample_coefficients(spec_for_radius(1.0, 0.95), s1);
        const auto cv90 = gafz::sample_coefficients(spec_for_radius(1.0, 0.90), s2);
        const double truth = std::abs(cv95.coeffs[0]);
        const auto z95 = gafz::find_zeros(cv95, 0.95);
        const auto z90 = gafz::find_zeros(cv90, 0.90);
        const auto r95 = gafz::reconstruct_abs_f0(z95.points, 1.0,
                                                  static_cast<int>(z95.points.size()));
        const auto r90 = gafz::reconstruct_abs_f0(z90.points, 1.0,
                                                  static_cast<int>(z90.points.size()));
        err_095.push_back(std::abs(r95.estimate - truth) / truth);
        err_090.push_back(std::abs(r90.estimate - truth) / truth);
    }
    CHECK(median(err_095) < 0.15);
    CHECK(median(err_095) < median(err_090));
}

TEST_CASE("jensen estimate: empty product and MC improvement with radius", "[reconstruct]") {
    CHECK(gafz::jensen_estimate({}, 0.1, 1.0) ==
          Catch::Approx(gafz::c_prime_rho(1.0) * std::pow(1.0 - 0.01, -0.5)).epsilon(1e-13));

    const std::size_t runs = 100;
    std::vector<double> log_err_090, log_err_095;
    for (std::size_t i = 0; i < runs; ++i) {
        RandomStream s(62, i);
        const auto cv = gafz::sample_coefficients(spec_for_radius(1.0, 0.95), s);
        const double truth = std::abs(cv.coeffs[0]);
        const auto zs = gafz::find_zeros(cv, 0.95);
        std::vector<Complex> in90, in95;
        for (Complex z : zs.points) {
            if (std::abs(z) < 0.90) in90.push_back(z);
            if (std::abs(z) < 0.95) in95.push_back(z);
        }
        log_err_090.push_back(std::abs(std::log(gafz::jensen_estimate(in90, 0.90, 1.0) / truth)));
        log_err_095.push_back(std::abs(std::log(gafz::jensen_estimate(in95, 0.95, 1.0) / truth)));
    }
    double mean90 = 0.0, mean95 = 0.0;
    for (std::size_t i = 0; i < runs; ++i) {
        mean90 += log_err_090[i];
        mean95 += log_err_095[i];
    }
    CHECK(mean95 < mean90);
}

TEST_CASE("reconstruct |f(zeta)|: reduction at zeta=0 and zero hit", "[reconstruct]") {
    const std::vector<Complex> zeros{Complex(0.15, 0.0), Complex(-0.2, 0.3), Complex(0.0, -0.6)};
    const auto at0 = gafz::reconstruct_abs_f_at(Complex(0, 0), zeros, 2.0, 3);
    const auto f0 = gafz::reconstruct_abs_f0(zeros, 2.0, 3);
    CHECK(at0.estimate == Catch::Approx(f0.estimate).epsilon(1e-14));

    CHECK(gafz::reconstruct_abs_f_at(Complex(0.15, 0.0), zeros, 1.0, 3).estimate == 0.0);
}

TEST_CASE("reconstruct |f(zeta)|: equivariance identity", "[reconstruct]") {
    // Mapping the zeros through T_zeta and reconstructing at the origin must
    // reproduce the direct estimate exactly (same ordering, same product).
    const Complex zeta(0.3, -0.2);
    const std::vector<Complex> zeros{Complex(0.5, 0.1), Complex(-0.3, 0.35), Complex(0.05, -0.4),
                                     Complex(0.7, 0.6)};
    const double rho = 1.3;
    std::vector<Complex> shifted;
    for (Complex z : zeros) shifted.push_back(gafz::mobius(zeta, z).first);
    std::sort(shifted.begin(), shifted.end(),
              [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    const auto direct = gafz::reconstruct_abs_f_at(zeta, zeros, rho, 4);
    const auto via_shift = gafz::reconstruct_abs_f0(shifted, rho, 4);
    CHECK(direct.estimate ==
          Catch::Approx(std::pow(1.0 - std::norm(zeta), -rho / 2.0) * via_shift.estimate)
              .epsilon(1e-12));
}

TEST_CASE("reconstruct |f(zeta)|: MC accuracy at zeta=0.3", "[reconstruct]") {
    const Complex zeta(0.3, 0.0);
    const std::size_t runs = 100;
    std::vector<double> errs;
    for (std::size_t i = 0; i < runs; ++i) {
        RandomStream s(63, i);
        const auto cv = gafz::sample_coefficients(spec_for_radius(1.0, 0.95), s);
        const double truth = std::abs(gafz::evaluate_with_derivative(cv, zeta).first);
        const auto zs = gafz::find_zeros(cv, 0.95);
        const auto res =
            gafz::reconstruct_abs_f_at(zeta, zs.points, 1.0, static_cast<int>(zs.points.size()));
        errs.push_back(std::abs(res.estimate - truth) / truth);
    }
    CHECK(median(errs) < 0.20);
}

TEST_CASE("reconstruct |f'(0)| for conditioned realizations", "[reconstruct]") {
    CHECK_THROWS_WITH(gafz::reconstruct_abs_fprime_at_zero({Complex(0, 0)}, 1.0, 1),
                      "origin zero must be excluded");
    CHECK(gafz::reconstruct_abs_fprime_at_zero({}, 1.0, 0).estimate ==
          Catch::Approx(gafz::c_rho(1.0)));

    const std::size_t runs = 100;
    std::vector<double> errs;
    for (std::size_t i = 0; i < runs; ++i) {
        RandomStream s(64, i);
        const auto cv = gafz::sample_conditioned_at_zero(
            spec_for_radius(1.0, 0.95, gafz::Conditioning::zero_at_origin), s);
        const double truth = std::abs(cv.coeffs[1]);  // f'(0) = c_1 when c_0 = 0
        const auto zs = gafz::find_zeros(cv, 0.95);
        REQUIRE(!zs.points.empty());
        REQUIRE(zs.points[0] == Complex(0.0, 0.0));
        const std::vector<Complex> others(zs.points.begin() + 1, zs.points.end());
        const auto res = gafz::reconstruct_abs_fprime_at_zero(others, 1.0,
                                                              static_cast<int>(others.size()));
        errs.push_back(std::abs(res.estimate - truth) / truth);
    }
    CHECK(median(errs) < 0.20);
}

TEST_CASE("reconstruction is insensitive to doubling the truncation degree", "[reconstruct]") {
    const int base_degree = gafz::truncation_degree_for(1.0, 0.95, 1e-8);
    for (std::size_t i = 0; i < 50; ++i) {
        RandomStream a(65, i), b(65, i);
        SeriesSpec s1 = spec_for_radius(1.0, 0.95);
        SeriesSpec s2 = s1;
        s2.truncation_degree = 2 * base_degree;
        const auto cv1 = gafz::sample_coefficients(s1, a);
        const auto cv2 = gafz::sample_coefficients(s2, b);
        const auto z1 = gafz::find_zeros(cv1, 0.95);
        const auto z2 = gafz::find_zeros(cv2, 0.95);
        const auto r1 = gafz::reconstruct_abs_f0(z1.points, 1.0, static_cast<int>(z1.points.size()));
        const auto r2 = gafz::reconstruct_abs_f0(z2.points, 1.0, static_cast<int>(z2.points.size()));
        if (r1.estimate == 0.0 || r2.estimate == 0.0) continue;
        CHECK(std::abs(r1.estimate - r2.estimate) / r1.estimate < 0.01);
    }
}
