#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "ghsim/params.hpp"

namespace ghsim {

using complexd = std::complex<double>;

/// 2x2 transfer matrix of one layer, with the inputs it was built from.
struct LayerMatrix {
    complexd m11, m12, m21, m22;
    complexd eps{1.0, 0.0};
    double d = 0.0;
    double theta = 0.0;
    double omega_p = 0.0;

    complexd det() const { return m11 * m22 - m12 * m21; }
};

/// Total transfer matrix and TE reflection coefficient of the stack.
struct StackResult {
    std::array<complexd, 4> Q{};  // {Q11, Q12, Q21, Q22}
    complexd R{0.0, 0.0};
    complexd q0{0.0, 0.0};    // sqrt(eps0 - sin^2 theta)
    double phi_r = 0.0;       // principal-value phase of R
    double mag_R = 0.0;
    bool singular = false;    // vanishing reflection denominator
};

namespace detail {

// Normal wave-number component, branch Im kx >= 0 so fields decay into a
// lossy layer; for lossless propagating media Re kx >= 0.
inline complexd kx_component(const complexd& eps, double theta, double omega_p) {
    const double s = std::sin(theta);
    complexd kx = (omega_p / speed_of_light) * std::sqrt(eps - s * s);
    if (kx.imag() < 0.0) kx = -kx;
    if (kx.imag() == 0.0 && kx.real() < 0.0) kx = -kx;
    return kx;
}

// sin(z)/z with a series fallback that keeps the kx -> 0 limit smooth.
inline complexd sinc(const complexd& z) {
    if (std::abs(z) < 1e-6) {
        const complexd z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

inline std::array<complexd, 4> mul(const std::array<complexd, 4>& a,
                                   const std::array<complexd, 4>& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

}  // namespace detail

/// Characteristic matrix of a layer:
/// [[cos(kx d), i sin(kx d) k/kx], [i sin(kx d) kx/k, cos(kx d)]], k = w/c.
/// The off-diagonals are evaluated through sin(z)/z so kx = 0 (grazing or
/// critical degeneracy) needs no special case.
inline LayerMatrix layer_matrix(const complexd& eps, double d, double theta,
                                double omega_p) {
    const double k = omega_p / speed_of_light;
    const complexd kx = detail::kx_component(eps, theta, omega_p);
    const complexd z = kx * d;
    const complexd i{0.0, 1.0};
    const complexd sc = detail::sinc(z);
    LayerMatrix m;
    m.m11 = std::cos(z);
    m.m12 = i * k * d * sc;            // = i sin(z) k/kx
    m.m21 = i * (kx * kx) * (d / k) * sc;  // = i sin(z) kx/k
    m.m22 = m.m11;
    m.eps = eps;
    m.d = d;
    m.theta = theta;
    m.omega_p = omega_p;
    return m;
}

/// Q = m1(eps1,d1) m2(eps2,d2) m1(eps1,d1) and the TE reflection coefficient
/// R = [q0(Q22-Q11) - (q0^2 Q12 - Q21)] / [q0(Q22+Q11) - (q0^2 Q12 + Q21)].
inline StackResult stack(const complexd& eps2, const Geometry& g, double theta,
                         double omega_p) {
    const LayerMatrix m1 = layer_matrix(complexd{g.eps1, 0.0}, g.d1, theta, omega_p);
    const LayerMatrix m2 = layer_matrix(eps2, g.d2, theta, omega_p);
    const std::array<complexd, 4> a{m1.m11, m1.m12, m1.m21, m1.m22};
    const std::array<complexd, 4> b{m2.m11, m2.m12, m2.m21, m2.m22};
    StackResult r;
    r.Q = detail::mul(detail::mul(a, b), a);

    const double s = std::sin(theta);
    complexd q0 = std::sqrt(complexd{g.eps0 - s * s, 0.0});
    if (q0.imag() < 0.0) q0 = -q0;
    if (q0.imag() == 0.0 && q0.real() < 0.0) q0 = -q0;
    r.q0 = q0;

    const complexd num = q0 * (r.Q[3] - r.Q[0]) - (q0 * q0 * r.Q[1] - r.Q[2]);
    const complexd den = q0 * (r.Q[3] + r.Q[0]) - (q0 * q0 * r.Q[1] + r.Q[2]);
    if (!(std::abs(den) > 1e-300) || !std::isfinite(std::abs(den))) {
        r.singular = true;
        return r;
    }
    r.R = num / den;
    r.mag_R = std::abs(r.R);
    r.phi_r = std::atan2(r.R.imag(), r.R.real());
    if (r.phi_r == -std::numbers::pi) r.phi_r = std::numbers::pi;
    return r;
}

/// Pointwise stack() over an angle grid; per-point singular flags propagate.
inline std::vector<StackResult> reflection_vs_angle(const complexd& eps2,
                                                    const Geometry& g,
                                                    std::span<const double> theta_grid,
                                                    double omega_p) {
    std::vector<StackResult> out;
    out.reserve(theta_grid.size());
    for (double t : theta_grid) out.push_back(stack(eps2, g, t, omega_p));
    return out;
}

}  // namespace ghsim
