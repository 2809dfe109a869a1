#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "gafz/series.hpp"

namespace gafz {

/// Value, first and second derivative of an analytic map at a point.
struct MapJet {
    Complex value;
    Complex d1;
    Complex d2;
};

/// An injective analytic map from its declared domain into the unit disk,
/// evaluable with two derivatives (the pushforward derivative needs d2).
/// Injectivity is caller-asserted, not machine-checked.
struct MapHandle {
    std::function<MapJet(Complex)> forward;
    std::string label;
};

/// Mobius transformation of the unit disk, T_beta(z) = (z - beta)/(1 - conj(beta) z),
/// returned as (value, derivative) with T'_beta(z) = (1 - |beta|^2)/(1 - conj(beta) z)^2.
inline std::pair<Complex, Complex> mobius(Complex beta, Complex z) {
    if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("mobius parameter must satisfy |beta| < 1");
    const Complex denom = 1.0 - std::conj(beta) * z;
    if (denom == Complex(0.0, 0.0)) throw std::invalid_argument("mobius pole");
    const double one_minus_b2 = 1.0 - std::norm(beta);
    return {(z - beta) / denom, one_minus_b2 / (denom * denom)};
}

inline MapHandle identity_map() {
    return {[](Complex z) { return MapJet{z, Complex(1.0, 0.0), Complex(0.0, 0.0)}; }, "identity"};
}

/// T_beta as a MapHandle; T''_beta(z) = 2 conj(beta) T'_beta(z) / (1 - conj(beta) z).
inline MapHandle mobius_map(Complex beta) {
    if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("mobius parameter must satisfy |beta| < 1");
    return {[beta](Complex z) {
                const Complex denom = 1.0 - std::conj(beta) * z;
                const double one_minus_b2 = 1.0 - std::norm(beta);
                const Complex d1 = one_minus_b2 / (denom * denom);
                return MapJet{(z - beta) / denom, d1, 2.0 * std::conj(beta) * d1 / denom};
            },
            "mobius"};
}

inline Complex mobius_inverse(Complex beta, Complex w) { return mobius(-beta, w).first; }

/// Pushforward of a unit-disk realization f through a conformal map Psi:
/// g(z) = Psi'(z)^{rho/2} f(Psi(z)), evaluated with its derivative
///   g'(z) = Psi'(z)^{rho/2} [ (rho/2) (Psi''/Psi') f(Psi(z)) + Psi'(z) f'(Psi(z)) ].
/// The principal branch of the power is used; Mobius maps of the disk have
/// nonvanishing derivative, so the branch only rotates the phase and leaves
/// the zero set untouched.
class ConformalPushforward {
public:
    ConformalPushforward(CoefficientVector cv, MapHandle map)
        : cv_(std::move(cv)), map_(std::move(map)) {
        if (cv_.spec.domain_kind == DomainKind::plane)
            throw std::invalid_argument("pushforward requires a unit-disk spec");
    }

    std::pair<Complex, Complex> operator()(Complex z) const {
        const MapJet jet = map_.forward(z);
        if (jet.d1 == Complex(0.0, 0.0))
            throw std::runtime_error("critical point of conformal map");
        const auto [f, fp] = evaluate_with_derivative(cv_, jet.value);
        const Complex factor = std::pow(jet.d1, Complex(cv_.spec.rho / 2.0, 0.0));
        const Complex value = factor * f;
        const Complex derivative =
            factor * (0.5 * cv_.spec.rho * (jet.d2 / jet.d1) * f + jet.d1 * fp);
        return {value, derivative};
    }

    const CoefficientVector& coefficients() const { return cv_; }
    const MapHandle& map() const { return map_; }

private:
    CoefficientVector cv_;
    MapHandle map_;
};

inline ConformalPushforward conformal_pushforward(CoefficientVector cv, MapHandle map) {
    return ConformalPushforward(std::move(cv), std::move(map));
}

}  // namespace gafz
