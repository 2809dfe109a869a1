#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gafz/series.hpp"

namespace gafz {

/// Zeros of one realization inside a stated reliable region. Points are
/// sorted by increasing modulus, ties broken by argument; residuals hold
/// |f| at each reported zero after Newton polish.
struct ZeroSet {
    std::vector<Complex> points;
    double reliable_radius = 1.0;
    SeriesSpec source_spec;
    std::vector<double> residuals;
    double polish_tolerance = 0.0;
    std::vector<std::size_t> near_boundary;    // within 1e-6 of the reliable radius
    std::vector<std::size_t> near_coincident;  // suspiciously close pairs (diagnostic)
};

class RootFindingError : public std::runtime_error {
public:
    RootFindingError(const std::string& what, ZeroSet partial)
        : std::runtime_error(what), partial_result(std::move(partial)) {}
    ZeroSet partial_result;
};

namespace detail {

inline Complex cinv(Complex z) {
    const double s = 1.0 / std::norm(z);
    // norm() over/underflows around |z| ~ 1e±154; fall back to library
    // division there, which rescales internally.
    if (s == 0.0 || !std::isfinite(s)) return 1.0 / z;
    return {z.real() * s, -z.imag() * s};
}

inline std::pair<Complex, Complex> horner_with_derivative(const std::vector<Complex>& c,
                                                          Complex z) {
    Complex value(0.0, 0.0), derivative(0.0, 0.0);
    for (std::size_t k = c.size(); k-- > 0;) {
        derivative = derivative * z + value;
        value = value * z + c[k];
    }
    return {value, derivative};
}

// Starting points on the annuli of the polynomial's Newton polygon (Bini's
// initialization): each segment of the upper convex hull of (k, log|c_k|)
// contributes its length in points, placed on the circle whose radius is the
// segment's root-modulus estimate. For a truncated power series this puts
// most points near |z| = 1, where nearly all roots of the truncation live.
inline std::vector<Complex> aberth_initial_points(const std::vector<Complex>& coeffs) {
    const std::size_t n = coeffs.size() - 1;
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k <= n; ++k)
        if (coeffs[k] != Complex(0.0, 0.0)) support.push_back(k);
    // upper convex hull of (k, log|c_k|) over the support
    std::vector<std::size_t> hull;
    auto logc = [&](std::size_t k) { return std::log(std::abs(coeffs[k])); };
    for (std::size_t k : support) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            const double cross = (static_cast<double>(b) - a) * (logc(k) - logc(a)) -
                                 (static_cast<double>(k) - a) * (logc(b) - logc(a));
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    std::vector<Complex> z;
    z.reserve(n);
    const double golden = 2.0 * std::numbers::pi * 0.3819660112501051;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const std::size_t k1 = hull[s], k2 = hull[s + 1];
        const auto m = static_cast<double>(k2 - k1);
        double radius = std::exp((logc(k1) - logc(k2)) / m);
        radius = std::clamp(radius, 1e-8, 1e8);
        for (std::size_t j = 0; j < k2 - k1; ++j) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / m +
                                 golden * static_cast<double>(s + 1) + 0.5;
            z.push_back(radius * Complex(std::cos(angle), std::sin(angle)));
        }
    }
    while (z.size() < n) z.push_back(Complex(1.0, 0.0) + 1e-3 * static_cast<double>(z.size()));
    return z;
}

// Winding number of the polynomial with coefficient vector c around
// |z| = radius, by trapezoidal integration of z p'/p (spectrally accurate for
// analytic integrands; nodes double until the value stabilizes within 1e-3 of
// an integer). Returns -1 when a root sits too close to the contour.
inline int polynomial_winding(const std::vector<Complex>& c, double radius) {
    double previous = 1e300;
    for (int nodes = 128; nodes <= (1 << 14); nodes *= 2) {
        double winding = 0.0;
        bool degenerate = false;
        for (int j = 0; j < nodes; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / nodes;
            const Complex z = radius * Complex(std::cos(theta), std::sin(theta));
            auto [p, dp] = horner_with_derivative(c, z);
            if (p == Complex(0.0, 0.0) || !std::isfinite(p.real()) || !std::isfinite(p.imag())) {
                degenerate = true;
                break;
            }
            winding += (z * dp * cinv(p)).real();
        }
        if (degenerate) return -1;
        winding /= nodes;
        if (std::abs(winding - std::round(winding)) < 1e-3 && std::abs(winding - previous) < 1e-3)
            return static_cast<int>(std::round(winding));
        previous = winding;
    }
    return -1;
}

// Number of roots strictly inside |z| < radius, counted on the REVERSED
// polynomial at radius 1/R: its roots are the reciprocals, so the count
// stays well-conditioned even when the original has far-out roots whose
// neighborhood cannot be evaluated in double. Nearby radii are tried when a
// root sits on the contour. Requires a nonzero constant coefficient.
inline int roots_inside(const std::vector<Complex>& coeffs, double radius) {
    const std::vector<Complex> reversed(coeffs.rbegin(), coeffs.rend());
    const int degree = static_cast<int>(coeffs.size()) - 1;
    for (double bump : {0.0, 0.37e-2, -0.41e-2, 0.83e-2, -0.79e-2}) {
        const int w = polynomial_winding(reversed, 1.0 / (radius * (1.0 + bump)));
        if (w >= 0) return degree - w;
    }
    return -1;
}

// Aberth-Ehrlich simultaneous iteration from Newton-polygon starting points.
// Every iterate keeps moving in every sweep: no root is frozen, so the
// pairwise repulsion always keeps iterates off each other's roots (freezing
// invites two iterates to capture one root, which silently orphans another).
// A point counts as settled when it has a sub-1e-13 relative step or a
// residual at the backward-error floor of Horner evaluation,
// ~n * eps * sum |c_k| |z|^k, while staying clear of its nearest neighbor.
//
// Success is certified by root COUNT inside a certificate radius slightly
// beyond the radius of interest: the iteration stops as soon as every point
// inside that radius is settled and their number matches the argument
// principle count there. Outer roots may lie beyond the overflow horizon
// exp(708/n), where double-precision evaluation is impossible (a small
// leading coefficient puts the top root far out); they are irrelevant to the
// interior and must not block convergence. Iterates that overflow or run
// away are contracted back; one sitting on an occupied root is teleported to
// an outer ring. If a configuration still stalls, the whole iteration
// restarts from rotated initial points.
inline std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs, int max_sweeps,
                                         bool& converged, double interest_radius) {
    const std::size_t degree = coeffs.size() - 1;
    std::vector<double> abs_coeffs(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) abs_coeffs[k] = std::abs(coeffs[k]);
    const double residual_floor = 2.22e-16 * (4.0 + 2.0 * static_cast<double>(degree));
    const double golden = 2.0 * std::numbers::pi * 0.3819660112501051;

    const double horizon = std::exp(700.0 / static_cast<double>(degree));
    // The certificate contour must stay out of the root crowd near |z| = 1
    // (a truncated power series packs ~n roots there, and a contour passing
    // through them forces maximal quadrature refinement), so the margin
    // beyond the radius of interest scales with the remaining gap. Several
    // candidates are tried; the first countable one wins.
    double cert_radius = 0.0;
    int cert_target = -1;
    if (coeffs.front() != Complex(0.0, 0.0)) {
        for (double fraction : {0.25, 0.45, 0.15, 0.35}) {
            const double gap = std::max(0.04, 1.0 - interest_radius);
            const double candidate = std::min(
                {interest_radius + std::max(0.008, fraction * gap), 0.85 * horizon, 2.0});
            if (candidate <= interest_radius) continue;
            cert_target = roots_inside(coeffs, candidate);
            if (cert_target >= 0) {
                cert_radius = candidate;
                break;
            }
        }
    }
    const double ring =
        std::min(std::max(cert_radius, interest_radius) + 0.35, 0.95 * horizon);

    std::vector<Complex> z;
    converged = false;
    for (int attempt = 0; attempt < 3 && !converged; ++attempt) {
        z = aberth_initial_points(coeffs);
        if (attempt > 0) {
            const Complex rotation = std::polar(1.0, 0.77 * attempt);
            for (Complex& zi : z) zi *= (1.0 + 0.06 * attempt) * rotation;
        }
        std::size_t teleport = 0;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            std::size_t unsettled_inside = 0, settled_inside = 0, unsettled_total = 0;
            for (std::size_t i = 0; i < degree; ++i) {
                if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) {
                    const double angle = golden * static_cast<double>(++teleport);
                    z[i] = ring * Complex(std::cos(angle), std::sin(angle));
                    ++unsettled_total;
                    continue;
                }
                auto [p, dp] = horner_with_derivative(coeffs, z[i]);
                const double az = std::abs(z[i]);
                double errbound = 0.0;
                for (std::size_t k = abs_coeffs.size(); k-- > 0;)
                    errbound = errbound * az + abs_coeffs[k];
                if (!std::isfinite(p.real()) || !std::isfinite(p.imag()) ||
                    !std::isfinite(errbound)) {
                    z[i] *= 0.5;  // back inside the evaluable region
                    ++unsettled_total;
                    continue;
                }
                const bool at_floor = std::abs(p) <= residual_floor * errbound;
                Complex repulsion(0.0, 0.0);
                double nearest = 1e300;
                for (std::size_t j = 0; j < degree; ++j) {
                    if (j == i) continue;
                    const Complex diff = z[i] - z[j];
                    repulsion += cinv(diff);
                    nearest = std::min(nearest, std::abs(diff));
                }
                const bool crowded = degree > 1 && nearest < 1e-8 * (1.0 + az);
                if (crowded && at_floor) {
                    // sitting on a root another iterate already holds
                    const double angle = golden * static_cast<double>(++teleport);
                    z[i] = ring * Complex(std::cos(angle), std::sin(angle));
                    ++unsettled_total;
                    continue;
                }
                bool settled = false;
                if (p == Complex(0.0, 0.0)) {
                    settled = true;
                } else if (dp == Complex(0.0, 0.0)) {
                    z[i] += Complex(1e-8, 1e-8);
                } else {
                    const Complex newton = p * cinv(dp);
                    const Complex denom = 1.0 - newton * repulsion;
                    Complex step = denom == Complex(0.0, 0.0) ? newton : newton * cinv(denom);
                    double size = std::abs(step);
                    if (!std::isfinite(size)) {
                        z[i] *= 0.5;
                        ++unsettled_total;
                        continue;
                    }
                    const double limit = 0.5 * (1.0 + az);
                    if (size > limit) {
                        step *= limit / size;
                        size = limit;
                    }
                    z[i] -= step;
                    settled = !crowded &&
                              (at_floor || size <= 1e-13 * (1.0 + std::abs(z[i])));
                }
                if (!settled) ++unsettled_total;
                if (std::abs(z[i]) <= cert_radius) {
                    if (settled)
                        ++settled_inside;
                    else
                        ++unsettled_inside;
                }
            }
            if (unsettled_total == 0 ||
                (cert_target >= 0 && unsettled_inside == 0 &&
                 static_cast<int>(settled_inside) == cert_target)) {
                converged = true;
                break;
            }
        }
    }
    return z;
}

}  // namespace detail

/// All roots of the truncated series inside |z| <= reliable_radius, found by
/// simultaneous iteration on the polynomial and polished by Newton steps on
/// the full coefficient vector. Roots of multiplicity at the origin (exact
/// zero leading coefficients, e.g. conditioned realizations) are deflated
/// first. Throws RootFindingError with partial results on non-convergence.
inline ZeroSet find_zeros(const CoefficientVector& cv, double reliable_radius) {
    std::size_t lowest = cv.coeffs.size(), highest = 0;
    for (std::size_t k = 0; k < cv.coeffs.size(); ++k) {
        if (cv.coeffs[k] != Complex(0.0, 0.0)) {
            lowest = std::min(lowest, k);
            highest = k;
        }
    }
    if (lowest == cv.coeffs.size()) throw std::invalid_argument("degenerate polynomial");

    ZeroSet out;
    out.reliable_radius = reliable_radius;
    out.source_spec = cv.spec;

    // |f| scale on the region, used for the residual tolerance.
    double scale_sq = 0.0;
    const double q = reliable_radius * reliable_radius;
    double rpow = 1.0;
    for (const Complex& c : cv.coeffs) {
        scale_sq += std::norm(c) * rpow;
        rpow *= q;
    }
    out.polish_tolerance = 1e-10 * std::max(std::sqrt(scale_sq), 1e-300);

    std::vector<Complex> roots;
    roots.insert(roots.end(), lowest, Complex(0.0, 0.0));  // origin roots, exact

    if (highest > lowest) {
        std::vector<Complex> deflated(cv.coeffs.begin() + static_cast<std::ptrdiff_t>(lowest),
                                      cv.coeffs.begin() + static_cast<std::ptrdiff_t>(highest) + 1);
        bool converged = false;
        std::vector<Complex> found = detail::aberth_roots(deflated, 400, converged, reliable_radius);
        // Newton polish against the full truncated series. Converged roots
        // move by ~1e-13 at most; a larger step flags a point that is not at
        // a root (possible outside the certified region), which must not be
        // dragged into the reliable disk.
        for (Complex& r : found) {
            for (int it = 0; it < 3; ++it) {
                auto [f, fp] = evaluate_with_derivative(cv, r);
                if (f == Complex(0.0, 0.0) || fp == Complex(0.0, 0.0)) break;
                const Complex step = f * detail::cinv(fp);
                if (!(std::abs(step) <= 1e-3 * (1.0 + std::abs(r)))) break;
                r -= step;
                if (std::abs(step) <= 1e-15 * (1.0 + std::abs(r))) break;
            }
        }
        roots.insert(roots.end(), found.begin(), found.end());
        if (!converged) {
            ZeroSet partial = out;
            for (Complex r : roots)
                if (std::abs(r) <= reliable_radius) partial.points.push_back(r);
            throw RootFindingError("root finder did not converge", std::move(partial));
        }
    }

    for (Complex r : roots) {
        const double mod = std::abs(r);
        if (mod > reliable_radius) continue;
        out.points.push_back(r);
        out.residuals.push_back(std::abs(evaluate_with_derivative(cv, r).first));
        if (reliable_radius - mod < 1e-6) out.near_boundary.push_back(out.points.size() - 1);
    }

    std::vector<std::size_t> order(out.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(out.points[a]), mb = std::abs(out.points[b]);
        if (ma != mb) return ma < mb;
        return std::arg(out.points[a]) < std::arg(out.points[b]);
    });
    ZeroSet sorted = out;
    sorted.near_boundary.clear();
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.points[i] = out.points[order[i]];
        sorted.residuals[i] = out.residuals[order[i]];
        if (reliable_radius - std::abs(sorted.points[i]) < 1e-6) sorted.near_boundary.push_back(i);
    }
    for (std::size_t i = 0; i + 1 < sorted.points.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.points.size(); ++j)
            if (std::abs(sorted.points[i] - sorted.points[j]) < 1e-9) {
                sorted.near_coincident.push_back(i);
                sorted.near_coincident.push_back(j);
            }
    return sorted;
}

/// Winding number of f around |z| = radius via trapezoidal integration of
/// z f'(z)/f(z) over the circle (spectrally accurate for analytic f; the
/// node count doubles until the value sits within 1e-3 of an integer and
/// has stabilized). The caller must keep zeros off the contour.
inline int count_zeros_argument_principle(const CoefficientVector& cv, double radius) {
    double tiny = 0.0;
    {
        const double q = radius * radius;
        double rpow = 1.0;
        for (const Complex& c : cv.coeffs) {
            tiny += std::norm(c) * rpow;
            rpow *= q;
        }
        tiny = 1e-9 * std::sqrt(tiny);
    }
    double previous = 1e300;
    for (int nodes = 64; nodes <= (1 << 17); nodes *= 2) {
        double winding = 0.0;
        for (int j = 0; j < nodes; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / nodes;
            const Complex z = radius * Complex(std::cos(theta), std::sin(theta));
            auto [f, fp] = evaluate_with_derivative(cv, z);
            if (std::abs(f) < tiny) throw std::runtime_error("zero near contour");
            winding += (z * fp * detail::cinv(f)).real();
        }
        winding /= nodes;
        const double nearest = std::round(winding);
        if (std::abs(winding - nearest) < 1e-3 && std::abs(winding - previous) < 1e-3)
            return static_cast<int>(nearest);
        previous = winding;
    }
    throw std::runtime_error("zero near contour");
}

/// One matched track across consecutive frames: (frame index, position).
struct MatchedTrack {
    std::vector<std::pair<std::size_t, Complex>> samples;
};

/// Greedy frame-to-frame matching: a zero links to its nearest successor only
/// if the pairing is mutually nearest and closer than match_radius; anything
/// ambiguous breaks the track rather than guessing. Unmatched successors
/// start new tracks (births and deaths near the boundary are expected).
inline std::vector<MatchedTrack> match_zero_trajectories(const std::vector<ZeroSet>& frames,
                                                         double match_radius) {
    std::vector<MatchedTrack> tracks;
    if (frames.empty()) return tracks;
    std::vector<std::size_t> open;  // track index per zero of the current frame
    for (std::size_t i = 0; i < frames[0].points.size(); ++i) {
        tracks.push_back({{{0, frames[0].points[i]}}});
        open.push_back(tracks.size() - 1);
    }
    for (std::size_t t = 1; t < frames.size(); ++t) {
        const auto& prev = frames[t - 1].points;
        const auto& next = frames[t].points;
        std::vector<std::size_t> next_open(next.size(), static_cast<std::size_t>(-1));
        for (std::size_t i = 0; i < prev.size(); ++i) {
            std::size_t best = static_cast<std::size_t>(-1);
            double best_d = match_radius;
            for (std::size_t j = 0; j < next.size(); ++j) {
                const double d = std::abs(prev[i] - next[j]);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (best == static_cast<std::size_t>(-1)) continue;
            // mutual-nearest check
            bool mutual = true;
            for (std::size_t i2 = 0; i2 < prev.size(); ++i2)
                if (i2 != i && std::abs(prev[i2] - next[best]) < best_d) mutual = false;
            if (!mutual || next_open[best] != static_cast<std::size_t>(-1)) continue;
            next_open[best] = open[i];
            tracks[open[i]].samples.emplace_back(t, next[best]);
        }
        for (std::size_t j = 0; j < next.size(); ++j) {
            if (next_open[j] == static_cast<std::size_t>(-1)) {
                tracks.push_back({{{t, next[j]}}});
                next_open[j] = tracks.size() - 1;
            }
        }
        open = std::move(next_open);
    }
    return tracks;
}

}  // namespace gafz
