#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gafz/random.hpp"

namespace gafz {

enum class DomainKind { unit_disk, plane, conformal_image };
enum class Conditioning { none, zero_at_origin };

/// Description of one Gaussian analytic function family: the hyperbolic
/// disk family with parameter rho (coefficient k has variance |binom(-rho,k)|)
/// or the planar family (variance rho^k / k!), truncated at degree N.
struct SeriesSpec {
    DomainKind domain_kind = DomainKind::unit_disk;
    double rho = 1.0;
    int truncation_degree = 64;
    Conditioning conditioning = Conditioning::none;
    std::string conformal_map_label;  // set iff domain_kind == conformal_image

    void validate() const {
        if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
        if (truncation_degree < 0) throw std::invalid_argument("negative truncation degree");
        if (conditioning == Conditioning::zero_at_origin && truncation_degree < 2)
            throw std::invalid_argument("conditioned spec needs truncation degree >= 2");
    }
};

/// One sampled realization: coeffs[k] is the full coefficient of z^k,
/// i.e. deterministic weight times standard complex Gaussian.
struct CoefficientVector {
    SeriesSpec spec;
    std::vector<Complex> coeffs;
};

/// Coefficient standard deviations of the family, entry k in [0, N].
/// Computed by the multiplicative recurrences
///   disk:  w_k = w_{k-1} * sqrt((k-1+rho)/k),   w_0 = 1
///   plane: w_k = w_{k-1} * sqrt(rho/k),         w_0 = 1
/// which avoid Gamma-function overflow and cancellation at large k.
inline std::vector<double> coefficient_std_devs(const SeriesSpec& spec) {
    spec.validate();
    std::vector<double> w(static_cast<std::size_t>(spec.truncation_degree) + 1);
    w[0] = 1.0;
    for (int k = 1; k <= spec.truncation_degree; ++k) {
        const double ratio = spec.domain_kind == DomainKind::plane
                                 ? spec.rho / k
                                 : (k - 1 + spec.rho) / k;
        w[k] = w[k - 1] * std::sqrt(ratio);
    }
    return w;
}

/// Unconditioned draw: coeffs[k] = w_k * a_k with a_k i.i.d. standard complex
/// Gaussian, generated in index order (extending the truncation degree with
/// the same stream reproduces the lower-order coefficients exactly).
inline CoefficientVector sample_coefficients(const SeriesSpec& spec, RandomStream& stream) {
    spec.validate();
    if (spec.conditioning != Conditioning::none)
        throw std::invalid_argument("use sample_conditioned_at_zero");
    const std::vector<double> w = coefficient_std_devs(spec);
    CoefficientVector cv{spec, {}};
    cv.coeffs.reserve(w.size());
    for (double wk : w) cv.coeffs.push_back(wk * stream.standard_complex_gaussian());
    return cv;
}

/// Draw from the law of the coefficients given that the zero set has a point
/// at the origin: a_0 = 0, the Gaussian factor of a_1 is rotationally
/// symmetric with |a_1|^2 distributed as the sum of two unit-rate
/// exponentials (density t e^{-t}, modulus density 2 r^3 e^{-r^2}), and
/// a_2, a_3, ... stay standard complex Gaussian. Note this differs from
/// Gaussian conditioning on the value f(0) = 0, which would leave a_1 normal.
inline CoefficientVector sample_conditioned_at_zero(const SeriesSpec& spec, RandomStream& stream) {
    spec.validate();
    if (spec.conditioning != Conditioning::zero_at_origin)
        throw std::invalid_argument("spec is not conditioned at zero");
    const std::vector<double> w = coefficient_std_devs(spec);
    CoefficientVector cv{spec, {}};
    cv.coeffs.resize(w.size());
    cv.coeffs[0] = Complex(0.0, 0.0);
    // |a_1|^2 = -log U1 - log U2 is exactly Gamma(2,1); uniform phase.
    const double t = -std::log(stream.uniform()) - std::log(stream.uniform());
    const double angle = 2.0 * std::numbers::pi * stream.uniform_half_open();
    cv.coeffs[1] = w[1] * std::sqrt(t) * Complex(std::cos(angle), std::sin(angle));
    for (std::size_t k = 2; k < w.size(); ++k)
        cv.coeffs[k] = w[k] * stream.standard_complex_gaussian();
    return cv;
}

/// Horner evaluation of the truncated series and its derivative in one pass.
inline std::pair<Complex, Complex> evaluate_with_derivative(const CoefficientVector& cv,
                                                            Complex z) {
    Complex value(0.0, 0.0);
    Complex derivative(0.0, 0.0);
    for (std::size_t k = cv.coeffs.size(); k-- > 0;) {
        derivative = derivative * z + value;
        value = value * z + cv.coeffs[k];
    }
    return {value, derivative};
}

namespace detail {

// Upper bound on t_{k+1}/t_k for all k >= n, where t_k = |binom(-rho,k)| q^k.
// The ratio q (k+rho)/(k+1) is monotone toward q, from above iff rho > 1.
inline double disk_tail_ratio_bound(double q, double rho, int n) {
    return q * std::max(1.0, (n + rho) / (n + 1));
}

// sum_{k>N} |binom(-rho,k)| q^k, summed directly with a geometric bound on
// the remainder once terms are negligible.
inline double disk_tail_variance(double q, double rho, int N) {
    double term = 1.0;
    for (int k = 1; k <= N + 1; ++k) term *= q * (k - 1 + rho) / k;
    double sum = 0.0;
    for (int k = N + 1;; ++k) {
        sum += term;
        const double ratio = disk_tail_ratio_bound(q, rho, k);
        if (ratio < 1.0) {
            const double remainder = term * ratio / (1.0 - ratio);
            if (remainder <= 1e-9 * sum) return sum + remainder;
        }
        term *= q * (k + rho) / (k + 1);
    }
}

}  // namespace detail

/// Smallest N whose relative truncation error at radius r_max is below
/// epsilon^2: the tail variance sum_{k>N} w_k^2 r_max^{2k} must drop below
/// epsilon^2 * (1-r_max^2)^{-rho} (the full variance at r_max). A geometric
/// majorant locates the crossover, then the tail sum pins it exactly.
inline int truncation_degree_for(double rho, double r_max, double epsilon) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(r_max > 0.0 && r_max < 1.0))
        throw std::invalid_argument("truncation impossible at the boundary");
    const double q = r_max * r_max;
    const double budget = epsilon * epsilon * std::pow(1.0 - q, -rho);
    double term = 1.0;  // t_N at N = 0
    int n = 0;
    for (;; ++n) {
        if (n >= 2'000'000) throw std::runtime_error("truncation degree search did not converge");
        const double next = term * q * (n + rho) / (n + 1);
        const double ratio = detail::disk_tail_ratio_bound(q, rho, n + 1);
        if (ratio < 1.0 && next / (1.0 - ratio) < budget) break;
        term = next;
    }
    while (detail::disk_tail_variance(q, rho, n) >= budget) ++n;
    while (n > 1 && detail::disk_tail_variance(q, rho, n - 1) < budget) --n;
    return std::max(n, 1);
}

}  // namespace gafz
