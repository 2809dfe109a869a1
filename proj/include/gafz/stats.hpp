#pragma once

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gafz {

/// Sup-norm distance between the empirical CDF of a sorted sample and a
/// reference CDF.
inline double ks_statistic(const std::vector<double>& sorted_sample,
                           const std::function<double(double)>& cdf) {
    if (sorted_sample.empty()) throw std::invalid_argument("empty sample");
    const auto n = static_cast<double>(sorted_sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
        const double f = cdf(sorted_sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2},
/// with the usual finite-n effective lambda.
inline double ks_pvalue(double statistic, std::size_t n) {
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample KS p-value via the asymptotic law with effective size nm/(n+m).
inline double ks_two_sample_pvalue(double statistic, std::size_t n, std::size_t m) {
    const double eff = static_cast<double>(n) * static_cast<double>(m) /
                       static_cast<double>(n + m);
    return ks_pvalue(statistic, static_cast<std::size_t>(eff));
}

/// Two-sample KS distance between empirical CDFs of integer-valued samples.
inline double ks_statistic_counts(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
    const int hi = std::max(*std::max_element(a.begin(), a.end()),
                            *std::max_element(b.begin(), b.end()));
    std::vector<double> fa(static_cast<std::size_t>(hi) + 1, 0.0), fb = fa;
    for (int v : a) fa[static_cast<std::size_t>(std::clamp(v, 0, hi))] += 1.0;
    for (int v : b) fb[static_cast<std::size_t>(std::clamp(v, 0, hi))] += 1.0;
    double ca = 0.0, cb = 0.0, d = 0.0;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(hi); ++k) {
        ca += fa[k] / static_cast<double>(a.size());
        cb += fb[k] / static_cast<double>(b.size());
        d = std::max(d, std::abs(ca - cb));
    }
    return d;
}

/// KS distance of integer data against a continuous CDF with the half-integer
/// continuity correction: compares P(N <= k) with cdf(k + 1/2). Without the
/// correction the lattice spacing alone contributes half a probability mass
/// unit and swamps the distributional discrepancy being measured.
inline double ks_statistic_lattice(const std::vector<int>& sample,
                                   const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("empty sample");
    std::map<int, std::size_t> hist;
    for (int v : sample) ++hist[v];
    double cum = 0.0, d = 0.0;
    for (const auto& [value, count] : hist) {
        cum += static_cast<double>(count) / static_cast<double>(sample.size());
        d = std::max(d, std::abs(cum - cdf(static_cast<double>(value) + 0.5)));
    }
    return d;
}

/// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_pvalue(double statistic, double df) {
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    double df = 0.0;
    double pvalue = 1.0;
};

/// Goodness of fit of observed integer counts against expected probabilities.
/// Cells are pooled from the right until every expected count reaches
/// min_expected; the remainder cell absorbs the model's tail mass.
inline ChiSquareResult chi_square_gof(const std::vector<std::size_t>& observed,
                                      const std::vector<double>& probabilities,
                                      double min_expected = 5.0) {
    if (observed.size() > probabilities.size())
        throw std::invalid_argument("observed support exceeds model support");
    double total = 0.0;
    for (std::size_t c : observed) total += static_cast<double>(c);
    std::vector<double> expected;
    std::vector<double> obs;
    double tail_p = 1.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        expected.push_back(total * probabilities[k]);
        obs.push_back(static_cast<double>(observed[k]));
        tail_p -= probabilities[k];
    }
    expected.push_back(std::max(0.0, tail_p) * total);
    obs.push_back(0.0);
    // pool from the right
    while (expected.size() > 2 && expected.back() < min_expected) {
        expected[expected.size() - 2] += expected.back();
        obs[obs.size() - 2] += obs.back();
        expected.pop_back();
        obs.pop_back();
    }
    ChiSquareResult res;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        if (expected[k] <= 0.0) continue;
        const double diff = obs[k] - expected[k];
        res.statistic += diff * diff / expected[k];
    }
    res.df = static_cast<double>(expected.size()) - 1.0;
    res.pvalue = chi_square_pvalue(res.statistic, res.df);
    return res;
}

/// Two-sample chi-square homogeneity test on matching histograms, pooling
/// bins until both expected counts reach min_expected.
inline ChiSquareResult chi_square_two_sample(const std::vector<std::size_t>& a,
                                             const std::vector<std::size_t>& b,
                                             double min_expected = 5.0) {
    if (a.size() != b.size()) throw std::invalid_argument("histogram sizes differ");
    std::vector<double> oa, ob;
    double pending_a = 0.0, pending_b = 0.0;
    double na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        na += static_cast<double>(a[k]);
        nb += static_cast<double>(b[k]);
    }
    const double grand = na + nb;
    if (grand == 0.0) throw std::invalid_argument("empty histograms");
    for (std::size_t k = 0; k < a.size(); ++k) {
        pending_a += static_cast<double>(a[k]);
        pending_b += static_cast<double>(b[k]);
        const double row = pending_a + pending_b;
        if (row * na / grand >= min_expected && row * nb / grand >= min_expected) {
            oa.push_back(pending_a);
            ob.push_back(pending_b);
            pending_a = pending_b = 0.0;
        }
    }
    if (pending_a + pending_b > 0.0) {
        if (oa.empty()) {
            oa.push_back(pending_a);
            ob.push_back(pending_b);
        } else {
            oa.back() += pending_a;
            ob.back() += pending_b;
        }
    }
    ChiSquareResult res;
    for (std::size_t k = 0; k < oa.size(); ++k) {
        const double row = oa[k] + ob[k];
        if (row == 0.0) continue;
        const double ea = row * na / grand;
        const double eb = row * nb / grand;
        res.statistic += (oa[k] - ea) * (oa[k] - ea) / ea + (ob[k] - eb) * (ob[k] - eb) / eb;
    }
    res.df = static_cast<double>(oa.size()) - 1.0;
    res.pvalue = res.df < 1.0 ? 1.0 : chi_square_pvalue(res.statistic, res.df);
    return res;
}

struct MomentSummary {
    double mean = 0.0;
    double se = 0.0;       // standard error of the mean
    double variance = 0.0; // sample variance
    double skewness = 0.0;
    std::size_t n = 0;
};

inline MomentSummary summarize(const std::vector<double>& sample) {
    MomentSummary s;
    s.n = sample.size();
    if (s.n == 0) return s;
    const auto n = static_cast<double>(s.n);
    for (double x : sample) s.mean += x;
    s.mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : sample) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    s.variance = s.n > 1 ? m2 / (n - 1.0) : 0.0;
    s.se = std::sqrt(s.variance / n);
    const double sd = std::sqrt(m2 / n);
    s.skewness = sd > 0.0 ? (m3 / n) / (sd * sd * sd) : 0.0;
    return s;
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace gafz
