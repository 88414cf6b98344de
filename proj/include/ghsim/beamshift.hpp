#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>

#include "ghsim/params.hpp"
#include "ghsim/tmm.hpp"

namespace ghsim {

// Default finite-difference steps. The reflection phase varies on the scale
// of cavity fringes (~lambda/L rad of angle); 1e-6 rad balances truncation
// against double-precision roundoff.
inline constexpr double default_h_theta = 1e-6;       // rad
inline constexpr double default_h_omega_frac = 1e-6;  // fraction of omega_b

// |R| below this floor makes the reflection phase numerically undefined.
inline constexpr double reflection_floor = 1e-12;

/// Goos-Hanchen shift of the reflected probe at one sweep point.
struct ShiftSample {
    double theta = 0.0;
    double S_r_over_lambda = 0.0;  // S_r / lambda_p
    double S_r = 0.0;              // meters
    double dphi_dtheta = 0.0;      // rad/rad
    complexd R{0.0, 0.0};
    double mag_R = 0.0;
    std::optional<double> N_g;     // group index, filled on request
    bool singular = false;
};

namespace detail {

struct Stencil {
    complexd R_minus, R_center, R_plus;
    bool singular = false;
};

template <typename EvalR>
Stencil stencil(EvalR&& eval, double u, double h) {
    Stencil s;
    const StackResult rm = eval(u - h);
    const StackResult rc = eval(u);
    const StackResult rp = eval(u + h);
    s.R_minus = rm.R;
    s.R_center = rc.R;
    s.R_plus = rp.R;
    s.singular = rm.singular || rc.singular || rp.singular ||
                 std::abs(rm.R) < reflection_floor ||
                 std::abs(rc.R) < reflection_floor ||
                 std::abs(rp.R) < reflection_floor;
    return s;
}

// d(arg R)/du = Im(R'/R), unwrap-free; central difference for R'.
inline std::optional<double> phase_derivative_of(const Stencil& s, double h) {
    if (s.singular) return std::nullopt;
    const complexd dR = (s.R_plus - s.R_minus) / (2.0 * h);
    return (dR / s.R_center).imag();
}

}  // namespace detail

/// d(phi_r)/d(theta) via Im(R'/R). Returns nullopt (singular) if |R| drops
/// below the floor at any stencil point.
inline std::optional<double> phase_derivative(const complexd& eps2, const Geometry& g,
                                              double theta, double omega_p,
                                              double h = default_h_theta) {
    const auto st = detail::stencil(
        [&](double t) { return stack(eps2, g, t, omega_p); }, theta, h);
    return detail::phase_derivative_of(st, h);
}

/// Stationary-phase shift S_r = -(lambda_p / 2 pi) dphi_r/dtheta.
inline ShiftSample ghs(const complexd& eps2, const Geometry& g, double theta,
                       double omega_p, double h = default_h_theta) {
    ShiftSample out;
    out.theta = theta;
    const auto st = detail::stencil(
        [&](double t) { return stack(eps2, g, t, omega_p); }, theta, h);
    out.R = st.R_center;
    out.mag_R = std::abs(st.R_center);
    const auto dphi = detail::phase_derivative_of(st, h);
    if (!dphi) {
        out.singular = true;
        return out;
    }
    out.dphi_dtheta = *dphi;
    out.S_r_over_lambda = -*dphi / two_pi;
    out.S_r = probe_wavelength(omega_p) * out.S_r_over_lambda;
    return out;
}

inline double group_index_from(double dphi_domega, double L) {
    return dphi_domega / L;
}

/// Group index N_g = (1/L) dphi_r/domega_p with L = 2 d1 + d2. The
/// frequency derivative moves both the optical path and the susceptibility,
/// so eps2 is re-evaluated at x -+ h_omega with omega_p = omega_a + x.
inline std::optional<double> group_index(const std::function<complexd(double)>& eps2_of_x,
                                         const Geometry& g, double theta,
                                         double omega_a, double x,
                                         double h_omega) {
    const auto st = detail::stencil(
        [&](double xx) { return stack(eps2_of_x(xx), g, theta, omega_a + xx); }, x,
        h_omega);
    const auto dphi = detail::phase_derivative_of(st, h_omega);
    if (!dphi) return std::nullopt;
    return group_index_from(*dphi, 2.0 * g.d1 + g.d2);
}

}  // namespace ghsim
