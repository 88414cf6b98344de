#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "ghsim/params.hpp"

namespace ghsim {

using complexd = std::complex<double>;

/// Nonlinear steady state of the driven photon-magnon-phonon system.
struct SteadyState {
    complexd a_s{0.0, 0.0};  // cavity amplitude
    complexd m_s{0.0, 0.0};  // magnon amplitude
    complexd b_s{0.0, 0.0};  // phonon amplitude
    double delta_s = 0.0;    // effective magnon detuning, rad/s
    double G_mb = 0.0;       // effective coupling g_mb |m_s|, rad/s
    bool converged = false;
    int iterations = 0;
};

/// Linear probe response at one effective detuning x.
struct ProbeResponse {
    double x = 0.0;
    complexd a1_over_Ep{0.0, 0.0};
    complexd chi{0.0, 0.0};   // kappa_a * a1/E_p; Re = absorption, Im = dispersion
    complexd eps2{1.0, 0.0};  // effective cavity permittivity
};

/// How chi maps into the cavity permittivity. `none` is the literal
/// eps2 = 1 + chi; `rotate_i` is eps2 = 1 + i chi, kept for sensitivity
/// analysis of the quadrature convention.
enum class ChiRotation { none, rotate_i };

namespace detail {

// Magnon amplitude with the cavity line eliminated:
// m_s = E_d / (i delta_s + kappa_m + g_ma^2/(i delta_a + kappa_a)).
inline complexd magnon_amplitude(const SystemParams& p, double E_d, double delta_s) {
    const complexd i{0.0, 1.0};
    const complexd cavity = i * p.delta_a + p.kappa_a;
    return E_d / (i * delta_s + p.kappa_m + p.g_ma * p.g_ma / cavity);
}

inline complexd phonon_amplitude(const SystemParams& p, double g_mb, const complexd& m_s) {
    const complexd i{0.0, 1.0};
    return -i * g_mb * std::norm(m_s) / (i * p.omega_b + p.gamma_b);
}

}  // namespace detail

/// Solves the coupled steady-state relations by damped fixed-point iteration
/// on delta_s, with the (a_s, m_s) pair solved exactly per iterate. Requires
/// the drive-coupling pathway (g_mb from the coupling spec). Non-convergence
/// is reported, not thrown: the bistable regime is physical.
inline SteadyState solve_steady_state(const SystemParams& p, double E_d) {
    const auto* drive = std::get_if<DriveCoupling>(&p.coupling);
    if (!drive)
        throw std::logic_error(
            "solve_steady_state requires the drive-coupling pathway "
            "(direct-G_mb mode bypasses the solver)");
    const double g_mb = drive->g_mb;

    SteadyState s;
    s.delta_s = p.delta_m;
    if (E_d == 0.0) {  // unforced system: exactly zero amplitudes
        s.converged = true;
        return s;
    }

    constexpr double damping = 0.5;
    constexpr double rtol = 1e-12;
    constexpr int max_iterations = 10000;

    double delta = p.delta_m;
    bool converged = false;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const complexd m = detail::magnon_amplitude(p, E_d, delta);
        const complexd b = detail::phonon_amplitude(p, g_mb, m);
        const double target = p.delta_m + 2.0 * g_mb * b.real();
        const double next = (1.0 - damping) * delta + damping * target;
        const double scale = std::max({std::abs(next), std::abs(p.delta_m), p.omega_b});
        const bool done = std::abs(next - delta) <= rtol * scale;
        delta = next;
        if (done) {
            converged = true;
            ++it;
            break;
        }
    }

    const complexd i{0.0, 1.0};
    s.m_s = detail::magnon_amplitude(p, E_d, delta);
    s.a_s = -i * p.g_ma * s.m_s / (i * p.delta_a + p.kappa_a);
    s.b_s = detail::phonon_amplitude(p, g_mb, s.m_s);
    s.delta_s = delta;
    s.G_mb = g_mb * std::abs(s.m_s);
    s.converged = converged;
    s.iterations = it;
    return s;
}

/// Resolves the effective coupling from the spec: verbatim in direct mode,
/// through the steady state in drive mode. Optionally returns the solved
/// state.
inline double resolve_coupling(const SystemParams& p, SteadyState* state = nullptr) {
    if (const auto* d = std::get_if<DirectCoupling>(&p.coupling)) {
        if (state) {
            *state = SteadyState{};
            state->delta_s = p.delta_m;
            state->G_mb = d->G_mb;
            state->converged = true;
        }
        return d->G_mb;
    }
    const auto& c = std::get<DriveCoupling>(p.coupling);
    const double N = spin_count(c.D, c.rho);
    const double E_d = drive_amplitude(c.B0, N, c.gamma_gyro);
    SteadyState s = solve_steady_state(p, E_d);
    if (state) *state = s;
    return s.G_mb;
}

/// E_p-normalized first-order sideband amplitude:
/// a1/E_p = 1 / [ (kappa_a - ix) + g_ma^2 (gamma_b - ix) /
///                ((gamma_b - ix)(kappa_m - ix) + G_mb^2) ].
inline complexd sideband_amplitude(const SystemParams& p, double G_mb, double x) {
    const complexd i{0.0, 1.0};
    const complexd cav = p.kappa_a - i * x;
    const complexd mech = p.gamma_b - i * x;
    const complexd mag = p.kappa_m - i * x;
    const complexd den = cav + p.g_ma * p.g_ma * mech / (mech * mag + G_mb * G_mb);
    // Cannot vanish for positive decay rates on the real-x line; guard the
    // overridden regimes anyway.
    if (std::abs(den) < 1e-30)
        throw std::domain_error("sideband denominator vanished (|den| < 1e-30)");
    return 1.0 / den;
}

inline complexd eps2_from_chi(const complexd& chi, ChiRotation rot) {
    const complexd i{0.0, 1.0};
    return rot == ChiRotation::none ? 1.0 + chi : 1.0 + i * chi;
}

/// chi = kappa_a a1/E_p and eps2 = 1 + chi, packaged with x.
inline ProbeResponse susceptibility(const SystemParams& p, double G_mb, double x,
                                    ChiRotation rot = ChiRotation::none) {
    ProbeResponse r;
    r.x = x;
    r.a1_over_Ep = sideband_amplitude(p, G_mb, x);
    r.chi = p.kappa_a * r.a1_over_Ep;
    r.eps2 = eps2_from_chi(r.chi, rot);
    return r;
}

/// Pointwise susceptibility over a detuning grid; deterministic order.
inline std::vector<ProbeResponse> spectrum(const SystemParams& p, double G_mb,
                                           std::span<const double> x_grid,
                                           ChiRotation rot = ChiRotation::none) {
    std::vector<ProbeResponse> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) out.push_back(susceptibility(p, G_mb, x, rot));
    return out;
}

}  // namespace ghsim
