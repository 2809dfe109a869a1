#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gafz/conformal.hpp"
#include "gafz/random.hpp"

namespace gafz {

/// Euler's constant, fixed to 16 digits.
inline constexpr double euler_gamma = 0.5772156649015329;

/// c_rho = e^{(rho - gamma - gamma rho)/2} rho^{-rho/2}.
inline double c_rho(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    return std::exp(0.5 * (rho - euler_gamma - euler_gamma * rho)) * std::pow(rho, -0.5 * rho);
}

/// c'_rho = e^{rho/2 - gamma/2}.
inline double c_prime_rho(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    return std::exp(0.5 * (rho - euler_gamma));
}

/// A truncated reconstruction product with its convergence diagnostics:
/// partial_products[k-1] is the estimate after k factors.
struct ReconstructionResult {
    double estimate = 0.0;
    int terms_used = 0;
    std::vector<double> partial_products;
};

namespace detail {

inline ReconstructionResult weighted_product(const std::vector<double>& moduli, double rho,
                                             int terms, double prefactor) {
    ReconstructionResult res;
    res.partial_products.reserve(static_cast<std::size_t>(terms));
    double running = prefactor;
    for (int k = 1; k <= terms; ++k) {
        running *= std::exp(0.5 * rho / k) * moduli[static_cast<std::size_t>(k - 1)];
        res.partial_products.push_back(running);
    }
    res.terms_used = terms;
    res.estimate = res.partial_products.empty() ? prefactor : res.partial_products.back();
    return res;
}

}  // namespace detail

/// |f(0)| from the zeros ordered by increasing modulus:
/// c_rho * prod_{k<=K} e^{rho/(2k)} |z_k|. A zero at the origin makes the
/// answer exactly 0.
inline ReconstructionResult reconstruct_abs_f0(const std::vector<Complex>& zeros_by_modulus,
                                               double rho, int terms) {
    if (terms < 0 || static_cast<std::size_t>(terms) > zeros_by_modulus.size())
        throw std::invalid_argument("terms outside [0, zero count]");
    for (std::size_t k = 1; k < std::min<std::size_t>(zeros_by_modulus.size(),
                                                      static_cast<std::size_t>(terms)); ++k)
        if (std::abs(zeros_by_modulus[k]) < std::abs(zeros_by_modulus[k - 1]))
            throw std::invalid_argument("zeros must be sorted by increasing modulus");
    std::vector<double> moduli;
    moduli.reserve(static_cast<std::size_t>(terms));
    for (int k = 0; k < terms; ++k) {
        const double m = std::abs(zeros_by_modulus[static_cast<std::size_t>(k)]);
        if (m == 0.0) return {0.0, terms, std::vector<double>(static_cast<std::size_t>(terms), 0.0)};
        moduli.push_back(m);
    }
    return detail::weighted_product(moduli, rho, terms, c_rho(rho));
}

/// Jensen-style estimate of |f(0)| from the zeros inside radius r:
/// c'_rho (1-r^2)^{-rho/2} prod_{|z|<r} |z|. The empty product is allowed.
inline double jensen_estimate(const std::vector<Complex>& zeros_within_r, double r, double rho) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    double product = c_prime_rho(rho) * std::pow(1.0 - r * r, -0.5 * rho);
    for (Complex z : zeros_within_r) {
        if (!(std::abs(z) < r)) throw std::invalid_argument("zero outside stated radius");
        product *= std::abs(z);
    }
    return product;
}

/// |f(zeta)| from the zeros ordered by increasing pseudo-hyperbolic distance
/// |T_zeta(z)| (the ordering is the same as by hyperbolic distance):
/// c_rho (1-|zeta|^2)^{-rho/2} prod e^{rho/(2k)} |(z_k - zeta)/(1 - conj(zeta) z_k)|.
inline ReconstructionResult reconstruct_abs_f_at(Complex zeta, const std::vector<Complex>& zeros,
                                                 double rho, int terms) {
    if (!(std::abs(zeta) < 1.0)) throw std::invalid_argument("zeta must lie inside the unit disk");
    if (terms < 0 || static_cast<std::size_t>(terms) > zeros.size())
        throw std::invalid_argument("terms outside [0, zero count]");
    std::vector<double> distances;
    distances.reserve(zeros.size());
    for (Complex z : zeros) distances.push_back(std::abs(mobius(zeta, z).first));
    std::sort(distances.begin(), distances.end());
    for (int k = 0; k < terms; ++k)
        if (distances[static_cast<std::size_t>(k)] == 0.0)
            return {0.0, terms, std::vector<double>(static_cast<std::size_t>(terms), 0.0)};
    const double prefactor = c_rho(rho) * std::pow(1.0 - std::norm(zeta), -0.5 * rho);
    return detail::weighted_product(distances, rho, terms, prefactor);
}

/// |f'(0)| for a realization conditioned to vanish at the origin, from the
/// OTHER zeros ordered by increasing modulus: the same product form as
/// reconstruct_abs_f0 applied to them.
inline ReconstructionResult reconstruct_abs_fprime_at_zero(
    const std::vector<Complex>& other_zeros_by_modulus, double rho, int terms) {
    for (Complex z : other_zeros_by_modulus)
        if (z == Complex(0.0, 0.0)) throw std::invalid_argument("origin zero must be excluded");
    return reconstruct_abs_f0(other_zeros_by_modulus, rho, terms);
}

}  // namespace gafz
