#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gafz/series.hpp"
#include "gafz/zeros.hpp"

namespace gafz {

/// A realization evolving in time: the spec is fixed along a trajectory,
/// only the coefficient values move.
struct DynamicsState {
    CoefficientVector coeffs;
    double time = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Complex> positions;
    bool terminated = false;  // track ended before the final frame (left region / lost)
};

/// Advances every coefficient by the exact Ornstein-Uhlenbeck transition on
/// its Gaussian factor (the deterministic weights are untouched):
///   c_k(t+dt) = e^{-dt/2} c_k(t) + w_k sqrt(1 - e^{-dt}) xi_k.
/// Exact in distribution for any dt, so the zero process can be sampled at
/// arbitrary time resolution with no discretization bias.
inline DynamicsState evolve(const DynamicsState& state, double dt, RandomStream& stream) {
    if (!(dt > 0.0)) throw std::invalid_argument("nonpositive time step");
    const std::vector<double> w = coefficient_std_devs(state.coeffs.spec);
    if (w.size() != state.coeffs.coeffs.size())
        throw std::invalid_argument("coefficient count does not match spec");
    DynamicsState next;
    next.coeffs.spec = state.coeffs.spec;
    next.time = state.time + dt;
    next.coeffs.coeffs.reserve(w.size());
    const double decay = std::exp(-0.5 * dt);
    const double noise = std::sqrt(-std::expm1(-dt));
    for (std::size_t k = 0; k < w.size(); ++k)
        next.coeffs.coeffs.push_back(decay * state.coeffs.coeffs[k] +
                                     w[k] * noise * stream.standard_complex_gaussian());
    return next;
}

/// Zero trajectories of one evolving realization: evolve, extract zeros per
/// frame, and link frames by mutual-nearest matching. The first frames
/// validate that dt is fine enough for the matching radius.
inline std::vector<Trajectory> simulate_zero_trajectories(const SeriesSpec& spec, double horizon,
                                                          double dt, double region_radius,
                                                          RandomStream& stream,
                                                          double match_radius = 0.08) {
    if (!(dt > 0.0)) throw std::invalid_argument("nonpositive time step");
    DynamicsState state{sample_coefficients(spec, stream), 0.0};
    std::vector<ZeroSet> frames;
    frames.push_back(find_zeros(state.coeffs, region_radius));
    const int steps = static_cast<int>(std::floor(horizon / dt + 1e-12));
    for (int s = 0; s < steps; ++s) {
        state = evolve(state, dt, stream);
        frames.push_back(find_zeros(state.coeffs, region_radius));
    }

    // Validate the step size on the first frames: a typical per-step
    // displacement beyond half the matching radius makes links unreliable.
    const std::size_t probe = std::min<std::size_t>(frames.size(), 10);
    std::vector<double> steps_seen;
    for (std::size_t t = 1; t < probe; ++t) {
        for (Complex z : frames[t - 1].points) {
            double best = 1e300;
            for (Complex w : frames[t].points) best = std::min(best, std::abs(z - w));
            if (best < 1e300) steps_seen.push_back(best);
        }
    }
    if (!steps_seen.empty()) {
        std::nth_element(steps_seen.begin(), steps_seen.begin() + steps_seen.size() / 2,
                         steps_seen.end());
        if (steps_seen[steps_seen.size() / 2] > 0.5 * match_radius)
            throw std::runtime_error("dt too coarse for matching");
    }

    std::vector<Trajectory> out;
    for (const MatchedTrack& track : match_zero_trajectories(frames, match_radius)) {
        Trajectory traj;
        for (const auto& [frame, z] : track.samples) {
            traj.times.push_back(static_cast<double>(frame) * dt);
            traj.positions.push_back(z);
        }
        traj.terminated = track.samples.back().first + 1 < frames.size();
        out.push_back(std::move(traj));
    }
    return out;
}

struct SdeBucket {
    double a1_low = 0.0, a1_high = 0.0;
    std::size_t count = 0;
    double mean_inverse = 0.0;   // mean of 1/(rho |a1|^2) in the bucket
    double mean_diffusion = 0.0; // mean of |dz|^2/dt in the bucket
};

struct SdeEstimate {
    Complex drift;                    // E[dz]/dt
    double drift_se_re = 0.0, drift_se_im = 0.0;
    double sigma2 = 0.0, sigma2_se = 0.0;     // E[|dz|^2]/dt
    double predicted_sigma2 = 0.0;            // ensemble mean of 1/(rho |a1|^2)
    double slope = 0.0, slope_se = 0.0;       // regression slope of |dz|^2/dt on 1/(rho |a1|^2)
    std::vector<SdeBucket> buckets;
    std::size_t used = 0, lost = 0;
};

/// One-step drift/diffusion estimation at a conditioned zero. Each ensemble
/// member starts from the stationary conditioning (a_0 = 0 with the
/// reweighted a_1 law, which is NOT the Gaussian conditioning on f(0) = 0),
/// takes one exact OU step of size dt, and tracks the zero that started at
/// the origin via Newton iteration seeded at the linearized position.
/// The regression slope uses the per-realization ratio
///   s_i = (|dz_i|^2/dt) * rho |a_1,i|^2,
/// i.e. weighted least squares through the origin with the multiplicative
/// noise model, which keeps the heavy 1/|a_1|^4 design tails out of the
/// estimate. Bucket aggregates by |a_1| are reported alongside.
inline SdeEstimate estimate_drift_diffusion_at_conditioned_zero(double rho, double dt,
                                                                std::size_t ensemble,
                                                                std::uint64_t seed,
                                                                int truncation_degree = 0) {
    if (!(dt > 0.0)) throw std::invalid_argument("nonpositive time step");
    if (ensemble < 100) throw std::invalid_argument("ensemble too small");
    SeriesSpec spec;
    spec.domain_kind = DomainKind::unit_disk;
    spec.rho = rho;
    spec.conditioning = Conditioning::zero_at_origin;
    spec.truncation_degree =
        truncation_degree > 0 ? truncation_degree : truncation_degree_for(rho, 0.6, 1e-8);

    struct Row {
        Complex dz;
        double inv_rho_a1sq;
        bool ok;
    };
    std::vector<Row> rows(ensemble);
    const std::vector<double> w = coefficient_std_devs(spec);
    for (std::size_t i = 0; i < ensemble; ++i) {
        RandomStream stream(seed, i);
        CoefficientVector cv = sample_conditioned_at_zero(spec, stream);
        const Complex a1 = cv.coeffs[1] / w[1];
        DynamicsState state{std::move(cv), 0.0};
        DynamicsState next = evolve(state, dt, stream);
        // Newton from the linearized root position.
        Complex z = -next.coeffs.coeffs[0] / next.coeffs.coeffs[1];
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            auto [f, fp] = evaluate_with_derivative(next.coeffs, z);
            if (fp == Complex(0.0, 0.0)) break;
            const Complex step = f / fp;
            z -= step;
            if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
                ok = true;
                break;
            }
        }
        if (std::abs(z) > 0.45) ok = false;
        rows[i] = {z, 1.0 / (rho * std::norm(a1)), ok};
    }

    SdeEstimate est;
    std::vector<double> a1_sorted;
    double sum_re = 0, sum_im = 0, sq_re = 0, sq_im = 0;
    double sum_y = 0, sq_y = 0, sum_x = 0, sum_s = 0, sq_s = 0;
    for (const Row& row : rows) {
        if (!row.ok) {
            ++est.lost;
            continue;
        }
        ++est.used;
        const double re = row.dz.real() / dt, im = row.dz.imag() / dt;
        sum_re += re;
        sum_im += im;
        sq_re += re * re;
        sq_im += im * im;
        const double y = std::norm(row.dz) / dt;
        sum_y += y;
        sq_y += y * y;
        sum_x += row.inv_rho_a1sq;
        const double s = y / row.inv_rho_a1sq;
        sum_s += s;
        sq_s += s * s;
        a1_sorted.push_back(1.0 / std::sqrt(rho * row.inv_rho_a1sq));
    }
    if (est.lost > ensemble / 100) throw std::runtime_error("dt too large: zeros lost");
    const auto n = static_cast<double>(est.used);
    est.drift = Complex(sum_re / n, sum_im / n);
    est.drift_se_re = std::sqrt(std::max(0.0, sq_re / n - (sum_re / n) * (sum_re / n)) / n);
    est.drift_se_im = std::sqrt(std::max(0.0, sq_im / n - (sum_im / n) * (sum_im / n)) / n);
    est.sigma2 = sum_y / n;
    est.sigma2_se = std::sqrt(std::max(0.0, sq_y / n - est.sigma2 * est.sigma2) / n);
    est.predicted_sigma2 = sum_x / n;
    est.slope = sum_s / n;
    est.slope_se = std::sqrt(std::max(0.0, sq_s / n - est.slope * est.slope) / n);

    std::sort(a1_sorted.begin(), a1_sorted.end());
    const std::size_t nbuckets = 8;
    std::vector<double> edges{0.0};
    for (std::size_t b = 1; b < nbuckets; ++b)
        edges.push_back(a1_sorted[a1_sorted.size() * b / nbuckets]);
    edges.push_back(a1_sorted.back() + 1.0);
    est.buckets.resize(nbuckets);
    for (std::size_t b = 0; b < nbuckets; ++b) {
        est.buckets[b].a1_low = edges[b];
        est.buckets[b].a1_high = edges[b + 1];
    }
    for (const Row& row : rows) {
        if (!row.ok) continue;
        const double a1 = 1.0 / std::sqrt(rho * row.inv_rho_a1sq);
        for (std::size_t b = 0; b < nbuckets; ++b) {
            if (a1 >= edges[b] && a1 < edges[b + 1]) {
                ++est.buckets[b].count;
                est.buckets[b].mean_inverse += row.inv_rho_a1sq;
                est.buckets[b].mean_diffusion += std::norm(row.dz) / dt;
                break;
            }
        }
    }
    for (SdeBucket& bucket : est.buckets) {
        if (bucket.count > 0) {
            bucket.mean_inverse /= static_cast<double>(bucket.count);
            bucket.mean_diffusion /= static_cast<double>(bucket.count);
        }
    }
    return est;
}

}  // namespace gafz
