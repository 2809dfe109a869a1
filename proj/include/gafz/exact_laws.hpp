#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gafz/random.hpp"

namespace gafz {

/// Exact law of N_r, the number of zeros of the rho = 1 disk family in
/// B_r(0): N_r is distributed as a sum of independent Bernoulli variables
/// X_k with P(X_k = 1) = q^k, q = r^2, k = 1, 2, ...
struct CountLaw {
    double r = 0.0;
    double q = 0.0;
    std::vector<double> bernoulli_probs;  // q^k truncated where q^k < tail_cut

    static constexpr double tail_cut = 1e-16;

    explicit CountLaw(double radius) : r(radius), q(radius * radius) {
        if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
        double p = q;
        while (p >= tail_cut) {
            bernoulli_probs.push_back(p);
            p *= q;
        }
    }

    double mean() const {
        double m = 0.0;
        for (double p : bernoulli_probs) m += p;
        return m;
    }

    double variance() const {
        double v = 0.0;
        for (double p : bernoulli_probs) v += p * (1.0 - p);
        return v;
    }

    /// PMF by sequential convolution of the Bernoulli factors; factors are
    /// dropped once the remaining ones cannot move any entry by more than
    /// 1e-25, and trailing entries below 1e-25 are trimmed. The deep cutoff
    /// matters: binomial moments of order k weight the far tail by binom(j,k),
    /// so entries around 1e-17 still carry ~1e-4 of the k = 6 moment. All
    /// terms are positive, so the entries keep full relative accuracy.
    std::vector<double> pmf() const {
        std::vector<double> dist{1.0};
        for (double p : bernoulli_probs) {
            // All remaining factors together move entries by at most p/(1-q).
            if (p / (1.0 - q) < 1e-25) break;
            dist.push_back(0.0);
            for (std::size_t k = dist.size() - 1; k > 0; --k)
                dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
            dist[0] *= 1.0 - p;
        }
        while (dist.size() > 1 && dist.back() < 1e-25) dist.pop_back();
        return dist;
    }

    int sample(RandomStream& stream) const {
        int n = 0;
        for (double p : bernoulli_probs)
            if (stream.uniform_half_open() < p) ++n;
        return n;
    }
};

/// E (1+s)^{N_r} = prod_k (1 + r^{2k} s) for any real s, truncated where
/// |r^{2k} s| < 1e-16. s = -1 gives the hole probability.
inline double count_pgf(double r, double s) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    const double q = r * r;
    double product = 1.0;
    double p = q;
    while (std::abs(p * s) >= 1e-16) {
        product *= 1.0 + p * s;
        p *= q;
    }
    return product;
}

inline std::vector<double> count_pmf(double r) { return CountLaw(r).pmf(); }

/// PMF padded or trimmed to exactly k_max + 1 entries.
inline std::vector<double> count_pmf(double r, int k_max) {
    std::vector<double> dist = CountLaw(r).pmf();
    dist.resize(static_cast<std::size_t>(k_max) + 1, 0.0);
    return dist;
}

inline int sample_count(double r, RandomStream& stream) { return CountLaw(r).sample(stream); }

/// The moduli set {U_k^{1/(2k)} : k = 1..n} with U_k i.i.d. uniform, sorted
/// ascending. The index k is the law index (P(U_k^{1/(2k)} < r) = r^{2k}),
/// not the rank: the theorem matches the SETS in distribution, one element
/// per k, with no per-rank statement.
inline std::vector<double> sample_moduli(int n, RandomStream& stream) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
        out.push_back(std::pow(stream.uniform(), 1.0 / (2.0 * k)));
    std::sort(out.begin(), out.end());
    return out;
}

/// P(N_r = 0) = prod_k (1 - r^{2k}), truncated below 1e-16 per factor.
inline double hole_probability(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    const double q = r * r;
    double product = 1.0;
    double p = q;
    while (p >= 1e-16) {
        product *= 1.0 - p;
        p *= q;
    }
    return product;
}

/// Leading asymptotic of the hole probability as r -> 1.
inline double hole_asymptotic(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    return std::exp(-std::numbers::pi * std::numbers::pi / (12.0 * (1.0 - r)));
}

/// E binom(N_r, k) = r^{k(k+1)} / ((1-r^2)(1-r^4)...(1-r^{2k})), evaluated in
/// log space to keep extreme k / r combinations from overflowing silently.
inline double binomial_moment(double r, int k) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    if (k < 1) throw std::invalid_argument("k must be positive");
    double log_value = static_cast<double>(k) * (k + 1) * std::log(r);
    double qj = 1.0;
    for (int j = 1; j <= k; ++j) {
        qj *= r * r;
        log_value -= std::log1p(-qj);
    }
    if (log_value > 700.0)
        throw std::overflow_error("binomial moment overflows double at k=" + std::to_string(k) +
                                  ", r=" + std::to_string(r));
    return std::exp(log_value);
}

/// (mu_r, sigma^2_r) = (r^2/(1-r^2), r^2/(1-r^4)).
inline std::pair<double, double> mean_variance(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    const double q = r * r;
    return {q / (1.0 - q), q / (1.0 - q * q)};
}

/// Expected zero count of the rho family in a Borel set of hyperbolic area h.
inline double expected_zeros_hyperbolic(double rho, double hyperbolic_area) {
    if (!(rho > 0.0) || hyperbolic_area < 0.0)
        throw std::invalid_argument("inputs must be positive");
    return rho * hyperbolic_area / (4.0 * std::numbers::pi);
}

/// Hyperbolic area of B_r(0): 4 pi r^2 / (1 - r^2).
inline double hyperbolic_area_of_disk(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in [0,1)");
    return 4.0 * std::numbers::pi * r * r / (1.0 - r * r);
}

/// Euclidean radius of the origin-centered disk with hyperbolic area h.
inline double disk_radius_for_hyperbolic_area(double h) {
    if (!(h >= 0.0)) throw std::invalid_argument("area must be nonnegative");
    return std::sqrt(h / (h + 4.0 * std::numbers::pi));
}

}  // namespace gafz
