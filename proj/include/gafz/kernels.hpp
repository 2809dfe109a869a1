#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gafz/conformal.hpp"

namespace gafz {

using ComplexL = std::complex<long double>;
using MatrixXcl = Eigen::Matrix<ComplexL, Eigen::Dynamic, Eigen::Dynamic>;

/// Szego kernel of the unit disk, S_U(z,w) = (2 pi)^{-1} (1 - z conj(w))^{-1}.
inline Complex szego_kernel(Complex z, Complex w) {
    const Complex denom = 1.0 - z * std::conj(w);
    if (denom == Complex(0.0, 0.0)) throw std::invalid_argument("kernel singularity");
    return 1.0 / (2.0 * std::numbers::pi * denom);
}

/// Bergman kernel of the unit disk, K_U(z,w) = pi^{-1} (1 - z conj(w))^{-2}.
inline Complex bergman_kernel(Complex z, Complex w) {
    const Complex denom = 1.0 - z * std::conj(w);
    if (denom == Complex(0.0, 0.0)) throw std::invalid_argument("kernel singularity");
    return 1.0 / (std::numbers::pi * denom * denom);
}

/// Covariance matrices of (f, f') for the disk family at a point configuration:
///   A_jk = E f(z_j) conj(f(z_k))   = (1 - z_j conj(z_k))^{-rho}
///   B_jk = E f'(z_j) conj(f(z_k))  = rho conj(z_k) (1 - z_j conj(z_k))^{-rho-1}
///   C_jk = E f'(z_j) conj(f'(z_k)) = rho (1 + rho z_j conj(z_k)) (1 - z_j conj(z_k))^{-rho-2}
/// plus the rho-independent M_jk = (1 - z_j conj(z_k))^{-2}. B and C follow by
/// differentiating the covariance in z and conj(w); the finite-difference
/// invariant in the test suite pins them down.
struct KernelBundle {
    std::vector<Complex> points;
    double rho = 1.0;
    Eigen::MatrixXcd A, B, C, M;
};

inline KernelBundle build_bundle(const std::vector<Complex>& points, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    const auto n = static_cast<Eigen::Index>(points.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(std::abs(points[j]) < 1.0))
            throw std::invalid_argument("points must lie inside the unit disk");
        for (Eigen::Index k = j + 1; k < n; ++k)
            if (points[j] == points[k]) throw std::invalid_argument("coincident points");
    }
    KernelBundle b;
    b.points = points;
    b.rho = rho;
    b.A.resize(n, n);
    b.B.resize(n, n);
    b.C.resize(n, n);
    b.M.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex zw = points[j] * std::conj(points[k]);
            const Complex d = 1.0 - zw;  // Re(d) > 0, principal powers are safe
            b.A(j, k) = std::pow(d, -rho);
            b.B(j, k) = rho * std::conj(points[k]) * std::pow(d, -rho - 1.0);
            b.C(j, k) = rho * (1.0 + rho * zw) * std::pow(d, -rho - 2.0);
            b.M(j, k) = 1.0 / (d * d);
        }
    }
    return b;
}

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_scalar(const Eigen::MatrixXcd& m) {
    return m.template cast<Scalar>();
}

inline ComplexL determinant_ld(const MatrixXcl& m) {
    if (m.rows() == 0) return ComplexL(1.0L, 0.0L);
    return Eigen::PartialPivLU<MatrixXcl>(m).determinant();
}

// Ryser's inclusion-exclusion permanent with Gray-code subset updates:
// each step toggles one column in the running row sums, so the whole sum
// costs 2^n * n operations. Accumulation in long double keeps the
// alternating-sum cancellation well below the 1e-9 identity tolerances.
inline ComplexL permanent_ld(const MatrixXcl& m) {
    const auto n = static_cast<int>(m.rows());
    if (n == 0) return ComplexL(1.0L, 0.0L);
    if (n > 24) throw std::invalid_argument("permanent size cap");
    std::vector<ComplexL> rowsum(static_cast<std::size_t>(n), ComplexL(0.0L, 0.0L));
    ComplexL total(0.0L, 0.0L);
    const std::uint32_t subsets = 1u << n;
    std::uint32_t gray = 0;
    for (std::uint32_t k = 1; k < subsets; ++k) {
        const std::uint32_t next_gray = k ^ (k >> 1);
        const int bit = std::countr_zero(gray ^ next_gray);
        const bool added = (next_gray >> bit) & 1u;
        for (int i = 0; i < n; ++i) {
            if (added)
                rowsum[i] += m(i, bit);
            else
                rowsum[i] -= m(i, bit);
        }
        gray = next_gray;
        ComplexL prod(1.0L, 0.0L);
        for (int i = 0; i < n; ++i) prod *= rowsum[i];
        if (std::popcount(gray) & 1)
            total -= prod;
        else
            total += prod;
    }
    return (n % 2 == 0) ? total : -total;
}

// Validates a value that must be real and nonnegative up to roundoff:
// imaginary residue below 1e-8 relative is dropped, negative real parts
// above -1e-12 (relative to scale) clamp to zero, anything worse throws.
inline double realize_nonnegative(ComplexL value, long double scale, const char* what) {
    const long double mag = std::max<long double>(std::abs(value), scale);
    if (mag > 0.0L && std::abs(value.imag()) > 1e-8L * mag)
        throw std::runtime_error(std::string(what) + ": imaginary residue exceeds tolerance");
    long double re = value.real();
    if (re < 0.0L) {
        if (re < -1e-12L * mag) throw std::runtime_error(std::string(what) + ": negative intensity");
        re = 0.0L;
    }
    return static_cast<double>(re);
}

}  // namespace detail

/// Determinant via pivoted LU (internally in extended precision).
inline Complex determinant(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    return static_cast<Complex>(detail::determinant_ld(detail::to_scalar<ComplexL>(m)));
}

/// Permanent via Ryser's formula with Gray-code iteration; n <= 24.
inline Complex permanent(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("permanent of non-square matrix");
    if (m.rows() > 24) throw std::invalid_argument("permanent size cap");
    return static_cast<Complex>(detail::permanent_ld(detail::to_scalar<ComplexL>(m)));
}

/// det(A) at rho = 1 in closed form:
///   prod_{k,j} (1 - z_j conj(z_k))^{-1} * prod_{k<j} |z_j - z_k|^2.
inline Complex cauchy_determinant(const std::vector<Complex>& points) {
    const std::size_t n = points.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (points[j] == points[k]) throw std::invalid_argument("coincident points");
    ComplexL prod(1.0L, 0.0L);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            prod /= ComplexL(1.0L, 0.0L) - static_cast<ComplexL>(points[j]) *
                                               std::conj(static_cast<ComplexL>(points[k]));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const auto diff = static_cast<ComplexL>(points[j] - points[k]);
            prod *= diff * std::conj(diff);
        }
    return static_cast<Complex>(prod);
}

/// Joint intensity of the rho = 1 zero process: pi^{-n} det[(1 - z_i conj(z_j))^{-2}],
/// the determinant of the Bergman kernel matrix.
inline double joint_intensity_det(const std::vector<Complex>& points) {
    const auto n = points.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (points[j] == points[k]) throw std::invalid_argument("coincident points");
    MatrixXcl m(n, n);
    long double diag_scale = 1.0L;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const ComplexL d = ComplexL(1.0L, 0.0L) - static_cast<ComplexL>(points[j]) *
                                                          std::conj(static_cast<ComplexL>(points[k]));
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                ComplexL(1.0L, 0.0L) / (d * d);
        }
        diag_scale *= std::abs(m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
    }
    const ComplexL det = detail::determinant_ld(m);
    const long double pi_n = std::pow(std::numbers::pi_v<long double>, static_cast<long double>(n));
    return detail::realize_nonnegative(det / pi_n, diag_scale / pi_n, "joint_intensity_det");
}

/// Joint intensity for general rho via the permanent formula
/// p = perm(C - B A^{-1} B*) / det(pi A). The Schur-type complement is formed
/// with a linear solve against the factorized A, never an explicit inverse.
inline double joint_intensity_perm(const KernelBundle& bundle) {
    const Eigen::Index n = bundle.A.rows();
    if (n > 24) throw std::invalid_argument("permanent size cap");
    const MatrixXcl a = detail::to_scalar<ComplexL>(bundle.A);
    const MatrixXcl b = detail::to_scalar<ComplexL>(bundle.B);
    const MatrixXcl c = detail::to_scalar<ComplexL>(bundle.C);
    Eigen::PartialPivLU<MatrixXcl> lu(a);
    const ComplexL det_a = lu.determinant();
    if (std::abs(det_a) == 0.0L) throw std::runtime_error("degenerate configuration");
    const MatrixXcl schur = c - b * lu.solve(b.adjoint());
    const ComplexL perm = detail::permanent_ld(schur);
    const long double pi_n = std::pow(std::numbers::pi_v<long double>, static_cast<long double>(n));
    long double diag_scale = 1.0L;
    for (Eigen::Index j = 0; j < n; ++j) diag_scale *= std::abs(schur(j, j));
    const ComplexL ratio = perm / (pi_n * det_a);
    return detail::realize_nonnegative(ratio, diag_scale / (pi_n * std::abs(det_a)),
                                       "joint_intensity_perm");
}

namespace detail {

// Two-point intensity ratio p(0,r)/(p(0)p(r)) for the disk family, written
// with s = 1 - r^2. The numerator cancels to O((1-s)^3 (1-s^2)) at rho = 1,
// so it is evaluated in extended precision.
inline double two_point_ratio_general(double r, double rho) {
    const long double s = 1.0L - static_cast<long double>(r) * r;
    const long double p = rho;
    const long double a = p * p - 2.0L * p - 2.0L;
    const long double b = (p + 1.0L) * (p + 1.0L);
    const long double c = -2.0L * p * p;
    const long double sp = std::pow(s, p);
    const long double numerator = 1.0L + a * (sp + std::pow(s, 2.0L + 2.0L * p)) +
                                  b * (std::pow(s, 2.0L * p) + std::pow(s, 2.0L + p)) +
                                  c * (std::pow(s, 1.0L + p) + std::pow(s, 1.0L + 2.0L * p)) +
                                  std::pow(s, 2.0L + 3.0L * p);
    const long double denom = (1.0L - sp) * (1.0L - sp) * (1.0L - sp);
    return static_cast<double>(numerator / denom);
}

}  // namespace detail

/// p(0,r)/(p(0)p(r)) for the disk family; at rho = 1 this is r^2 (2 - r^2).
inline double two_point_ratio(double r, double rho) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (rho == 1.0) return r * r * (2.0 - r * r);
    return detail::two_point_ratio_general(r, rho);
}

}  // namespace gafz
