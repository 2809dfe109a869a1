#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <vector>

#include "gafz/random.hpp"
#include "gafz/series.hpp"

using gafz::Complex;
using gafz::CoefficientVector;
using gafz::Conditioning;
using gafz::DomainKind;
using gafz::RandomStream;
using gafz::SeriesSpec;

namespace {

SeriesSpec disk_spec(double rho, int degree, Conditioning cond = Conditioning::none) {
    SeriesSpec s;
    s.domain_kind = DomainKind::unit_disk;
    s.rho = rho;
    s.truncation_degree = degree;
    s.conditioning = cond;
    return s;
}

// Direct-summation oracle: smallest N with sum_{k>N} w_k^2 q^k below the
// relative budget, summing the recurrence out to k_top.
int truncation_oracle(double rho, double r_max, double epsilon, int k_top) {
    const double q = r_max * r_max;
    std::vector<double> t(static_cast<std::size_t>(k_top) + 1);
    t[0] = 1.0;
    for (int k = 1; k <= k_top; ++k) t[k] = t[k - 1] * q * (k - 1 + rho) / k;
    std::vector<double> suffix(t.size() + 1, 0.0);
    for (std::size_t k = t.size(); k-- > 0;) suffix[k] = suffix[k + 1] + t[k];
    const double budget = epsilon * epsilon * std::pow(1.0 - q, -rho);
    for (int n = 1; n < k_top; ++n)
        if (suffix[static_cast<std::size_t>(n) + 1] < budget) return n;
    return k_top;
}

}  // namespace

TEST_CASE("coefficient std devs: closed forms", "[series]") {
    auto w1 = gafz::coefficient_std_devs(disk_spec(1.0, 12));
    for (double w : w1) CHECK(w == Catch::Approx(1.0).epsilon(1e-14));

    auto w2 = gafz::coefficient_std_devs(disk_spec(2.0, 12));
    for (int k = 0; k <= 12; ++k)
        CHECK(w2[static_cast<std::size_t>(k)] == Catch::Approx(std::sqrt(k + 1.0)).epsilon(1e-13));

    SeriesSpec plane;
    plane.domain_kind = DomainKind::plane;
    plane.rho = 1.0;
    plane.truncation_degree = 4;
    auto wp = gafz::coefficient_std_devs(plane);
    CHECK(wp[0] == Catch::Approx(1.0));
    CHECK(wp[1] == Catch::Approx(1.0));
    CHECK(wp[2] == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(wp[3] == Catch::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
}

TEST_CASE("plane family: rho is a pure scale parameter", "[series]") {
    SeriesSpec p1, p3;
    p1.domain_kind = p3.domain_kind = DomainKind::plane;
    p1.rho = 1.0;
    p3.rho = 3.0;
    p1.truncation_degree = p3.truncation_degree = 40;
    auto w1 = gafz::coefficient_std_devs(p1);
    auto w3 = gafz::coefficient_std_devs(p3);
    double scale = 1.0;
    for (std::size_t k = 0; k < w1.size(); ++k) {
        CHECK(w3[k] == Catch::Approx(w1[k] * scale).epsilon(1e-12));
        scale *= std::sqrt(3.0);
    }
}

TEST_CASE("sampling: variance of a single coefficient", "[series]") {
    RandomStream stream(11, 0);
    const std::size_t n = 100'000;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto cv = gafz::sample_coefficients(disk_spec(1.0, 0), stream);
        REQUIRE(cv.coeffs.size() == 1);
        var += std::norm(cv.coeffs[0]);
    }
    CHECK(std::abs(var / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampling: covariance structure on the disk", "[series]") {
    const double rho = 1.0;
    const Complex z(0.3, 0.0), w(0.0, 0.2);
    RandomStream stream(12, 0);
    const std::size_t n = 100'000;
    const SeriesSpec spec = disk_spec(rho, 64);
    Complex cov(0, 0);
    double var_half = 0.0;
    const SeriesSpec spec3 = disk_spec(3.0, 96);
    for (std::size_t i = 0; i < n; ++i) {
        auto cv = gafz::sample_coefficients(spec, stream);
        cov += gafz::evaluate_with_derivative(cv, z).first *
               std::conj(gafz::evaluate_with_derivative(cv, w).first);
        auto cv3 = gafz::sample_coefficients(spec3, stream);
        var_half += std::norm(gafz::evaluate_with_derivative(cv3, Complex(0.5, 0.0)).first);
    }
    cov /= static_cast<double>(n);
    var_half /= static_cast<double>(n);

    const Complex expected = std::pow(1.0 - z * std::conj(w), -rho);
    // |f(z)f(w)| products have second moments of order a few; 4 sigma bands.
    CHECK(std::abs(cov - expected) < 4.0 * 2.0 / std::sqrt(static_cast<double>(n)));
    const double expected3 = std::pow(0.75, -3.0);
    CHECK(std::abs(var_half - expected3) < 4.0 * 2.0 * expected3 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampling: covariance structure on the plane", "[series]") {
    SeriesSpec spec;
    spec.domain_kind = DomainKind::plane;
    spec.rho = 2.0;
    spec.truncation_degree = 48;
    const Complex z(0.7, 0.2), w(-0.4, 0.5);
    RandomStream stream(13, 0);
    const std::size_t n = 100'000;
    Complex cov(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto cv = gafz::sample_coefficients(spec, stream);
        cov += gafz::evaluate_with_derivative(cv, z).first *
               std::conj(gafz::evaluate_with_derivative(cv, w).first);
    }
    cov /= static_cast<double>(n);
    const Complex expected = std::exp(spec.rho * z * std::conj(w));
    CHECK(std::abs(cov - expected) < 4.0 * 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("conditioned sampler: exact zero and Gamma(2,1) first coefficient", "[series]") {
    RandomStream stream(14, 0);
    const std::size_t n = 100'000;
    const SeriesSpec spec = disk_spec(1.0, 8, Conditioning::zero_at_origin);
    double a1_sq = 0.0, a2_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto cv = gafz::sample_conditioned_at_zero(spec, stream);
        REQUIRE(cv.coeffs[0] == Complex(0.0, 0.0));
        a1_sq += std::norm(cv.coeffs[1]);
        a2_sq += std::norm(cv.coeffs[2]);
    }
    // |a_1|^2 ~ Gamma(2,1): mean 2, sd 2 -> 4 sigma band 8/sqrt(n).
    CHECK(std::abs(a1_sq / n - 2.0) < 8.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(a2_sq / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("conditioned sampler: higher coefficients unchanged", "[series]") {
    RandomStream scond(15, 0), sfree(15, 1);
    const std::size_t n = 50'000;
    const SeriesSpec cond = disk_spec(1.0, 6, Conditioning::zero_at_origin);
    const SeriesSpec free_spec = disk_spec(1.0, 6);
    double cond_m2 = 0.0, cond_m4 = 0.0, free_m2 = 0.0, free_m4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto a = gafz::sample_conditioned_at_zero(cond, scond);
        auto b = gafz::sample_coefficients(free_spec, sfree);
        for (std::size_t k = 2; k < a.coeffs.size(); ++k) {
            cond_m2 += std::norm(a.coeffs[k]);
            cond_m4 += std::norm(a.coeffs[k]) * std::norm(a.coeffs[k]);
            free_m2 += std::norm(b.coeffs[k]);
            free_m4 += std::norm(b.coeffs[k]) * std::norm(b.coeffs[k]);
        }
    }
    const double m = static_cast<double>(n) * 5.0;
    CHECK(std::abs(cond_m2 / m - free_m2 / m) < 4.0 * 2.0 / std::sqrt(m));
    CHECK(std::abs(cond_m4 / m - free_m4 / m) < 4.0 * 20.0 / std::sqrt(m));
}

TEST_CASE("conditioned sampler guards", "[series]") {
    RandomStream stream(16, 0);
    CHECK_THROWS(gafz::sample_coefficients(disk_spec(1.0, 4, Conditioning::zero_at_origin), stream));
    CHECK_THROWS(gafz::sample_conditioned_at_zero(disk_spec(1.0, 4), stream));
}

TEST_CASE("evaluate with derivative: hand oracles", "[series]") {
    CoefficientVector constant{disk_spec(1.0, 0), {Complex(1.0, 0.0)}};
    auto [v0, d0] = gafz::evaluate_with_derivative(constant, Complex(0.7, -0.4));
    CHECK(v0 == Complex(1.0, 0.0));
    CHECK(d0 == Complex(0.0, 0.0));

    CoefficientVector linear{disk_spec(1.0, 1), {Complex(0.0, 0.0), Complex(1.0, 0.0)}};
    auto [v1, d1] = gafz::evaluate_with_derivative(linear, Complex(0.5, 0.0));
    CHECK(v1 == Complex(0.5, 0.0));
    CHECK(d1 == Complex(1.0, 0.0));

    // f(z) = 1 + 2z + 3z^2 at z = 0.1: value 1.23, derivative 2.6 (hand Horner).
    CoefficientVector quad{disk_spec(1.0, 2),
                           {Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(3.0, 0.0)}};
    auto [v2, d2] = gafz::evaluate_with_derivative(quad, Complex(0.1, 0.0));
    CHECK(v2.real() == Catch::Approx(1.23).epsilon(1e-14));
    CHECK(d2.real() == Catch::Approx(2.6).epsilon(1e-14));
}

TEST_CASE("truncation degree: hand geometric oracle at rho=1", "[series]") {
    // For rho = 1, r = 0.5: tail sum_{k>N} 0.25^k = 0.25^{N+1}/0.75 and the
    // budget is 1e-12 * (4/3), so the condition is 0.25^{N+1} < 1e-12,
    // giving N = 19 as the smallest admissible degree.
    CHECK(gafz::truncation_degree_for(1.0, 0.5, 1e-6) == 19);
    CHECK(gafz::truncation_degree_for(1.0, 0.5, 1e-6) ==
          truncation_oracle(1.0, 0.5, 1e-6, 100'000));
}

TEST_CASE("truncation degree: brute-force oracle across parameters", "[series]") {
    CHECK(gafz::truncation_degree_for(2.0, 0.9, 1e-6) ==
          truncation_oracle(2.0, 0.9, 1e-6, 100'000));
    CHECK(gafz::truncation_degree_for(0.5, 0.7, 1e-8) ==
          truncation_oracle(0.5, 0.7, 1e-8, 100'000));
    CHECK(gafz::truncation_degree_for(3.0, 0.95, 1e-8) ==
          truncation_oracle(3.0, 0.95, 1e-8, 100'000));
}

TEST_CASE("truncation degree: monotone in radius, boundary errors", "[series]") {
    CHECK(gafz::truncation_degree_for(1.0, 1e-6, 1e-6) <= 2);
    int prev = 0;
    for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const int n = gafz::truncation_degree_for(1.0, r, 1e-6);
        CHECK(n >= prev);
        prev = n;
    }
    CHECK_THROWS_WITH(gafz::truncation_degree_for(1.0, 1.0, 1e-6),
                      "truncation impossible at the boundary");
    CHECK_THROWS(gafz::truncation_degree_for(1.0, 1.5, 1e-6));
}

TEST_CASE("extending the truncation degree preserves low coefficients", "[series]") {
    RandomStream a(77, 5), b(77, 5);
    auto small = gafz::sample_coefficients(disk_spec(1.5, 20), a);
    auto large = gafz::sample_coefficients(disk_spec(1.5, 40), b);
    for (std::size_t k = 0; k < small.coeffs.size(); ++k)
        REQUIRE(small.coeffs[k] == large.coeffs[k]);
}
