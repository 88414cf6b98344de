#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

#include "ghsim/constants.hpp"
#include "ghsim/units.hpp"

namespace ghsim {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Effective magnomechanical coupling given directly (how the paper
/// parameterizes every figure).
struct DirectCoupling {
    double G_mb = 0.0;  // rad/s
};

/// Coupling obtained from the drive-field pathway: G_mb = g_mb |m_s| with
/// m_s solved self-consistently from the steady state.
struct DriveCoupling {
    double g_mb = 0.0;        // single-magnon magnomechanical coupling, rad/s
    double B0 = 0.0;          // drive magnetic field, T
    double D = 250e-6;        // YIG sphere diameter, m
    double rho = 4.22e27;     // spin density, m^-3
    double gamma_gyro = rad_from_ghz(28.0);  // gyromagnetic ratio, rad/(s T)
};

using CouplingSpec = std::variant<DirectCoupling, DriveCoupling>;

/// Physical rates and frequencies of the photon-magnon-phonon model.
/// Angular units (rad/s) throughout.
struct SystemParams {
    double omega_a = rad_from_ghz(13.2);  // cavity mode
    double omega_b = rad_from_mhz(15.0);  // phonon mode
    double kappa_a = rad_from_mhz(2.1);   // cavity decay
    double kappa_m = rad_from_mhz(0.1);   // magnon dissipation
    double gamma_b = rad_from_hz(150.0);  // mechanical dissipation
    double g_ma = rad_from_mhz(2.0);      // magnon-photon coupling
    CouplingSpec coupling = DirectCoupling{0.0};
    // Cavity-drive and magnon-drive detunings; the red-sideband condition
    // (both equal to omega_b) is the default operating point.
    double delta_a = rad_from_mhz(15.0);
    double delta_m = rad_from_mhz(15.0);
};

/// Three-layer stack geometry: mirror (eps1, d1) | cavity (d2) | mirror.
struct Geometry {
    double eps0 = 1.0;   // incidence medium permittivity
    double eps1 = 2.2;   // mirror permittivity (lossless real)
    double d1 = 4e-3;    // mirror thickness, m
    double d2 = 45e-3;   // intracavity length, m
};

/// One probe evaluation point.
struct ProbeSpec {
    double x = 0.0;       // effective detuning x = delta - omega_b, rad/s
    double theta = 1.42;  // incidence angle, rad
    double power = 1e-6;  // probe power, W (only scales E_p; chi is independent)
};

// Stability bound on the resolved coupling with paper-default rates.
inline constexpr double stability_G_mb_max = two_pi * 1.5e6;  // rad/s

/// The parameter set of the experiment the paper simulates.
inline SystemParams default_params() { return SystemParams{}; }
inline Geometry default_geometry() { return Geometry{}; }

/// Total number of spins in a YIG sphere of diameter D and spin density rho.
inline double spin_count(double D, double rho) {
    return rho * (4.0 / 3.0) * std::numbers::pi * std::pow(D / 2.0, 3);
}

/// Drive amplitude E_d = sqrt(5N) gamma B0 / 4.
inline double drive_amplitude(double B0, double N, double gamma_gyro) {
    return std::sqrt(5.0 * N) * gamma_gyro * B0 / 4.0;
}

/// Probe amplitude E_p = sqrt(2 P kappa_a / (hbar omega_p)). Informational
/// only: chi = kappa_a a1/E_p cancels E_p.
inline double probe_amplitude(double P, double kappa_a, double omega_p) {
    return std::sqrt(2.0 * P * kappa_a / (hbar * omega_p));
}

/// Probe frequency at effective detuning x under the red-sideband condition:
/// omega_0 = omega_a - omega_b, delta = x + omega_b, so omega_p = omega_a + x.
inline double probe_frequency(double omega_a, double x) { return omega_a + x; }

/// Free-space probe wavelength at omega_p.
inline double probe_wavelength(double omega_p) {
    return two_pi * speed_of_light / omega_p;
}

inline void validate(const SystemParams& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw ValidationError(std::string(name) + " must be positive");
    };
    positive(p.omega_a, "omega_a");
    positive(p.omega_b, "omega_b");
    positive(p.kappa_a, "kappa_a");
    positive(p.kappa_m, "kappa_m");
    positive(p.gamma_b, "gamma_b");
    if (p.g_ma < 0.0) throw ValidationError("g_ma must be non-negative");
    if (const auto* d = std::get_if<DirectCoupling>(&p.coupling)) {
        if (d->G_mb < 0.0) throw ValidationError("G_mb must be non-negative");
    } else {
        const auto& c = std::get<DriveCoupling>(p.coupling);
        if (c.B0 < 0.0) throw ValidationError("B0 must be non-negative");
        if (!(c.D > 0.0)) throw ValidationError("sphere diameter must be positive");
        if (!(c.rho > 0.0)) throw ValidationError("spin density must be positive");
        if (c.g_mb < 0.0) throw ValidationError("g_mb must be non-negative");
    }
}

inline void validate(const Geometry& g) {
    if (g.d1 < 0.0) throw ValidationError("d1 must be non-negative");
    if (!(g.d2 > 0.0)) throw ValidationError("d2 must be positive");
    if (!(g.eps0 > 0.0)) throw ValidationError("eps0 must be positive");
    if (!(g.eps1 > 0.0)) throw ValidationError("eps1 must be positive");
}

inline void validate(const ProbeSpec& s) {
    if (!(s.theta >= 0.0 && s.theta < std::numbers::pi / 2))
        throw ValidationError("theta must lie in [0, pi/2)");
    if (s.power < 0.0) throw ValidationError("probe power must be non-negative");
}

/// Stability bound on the resolved coupling. Overridable: the formulas
/// evaluate anywhere, but the paper restricts plots to the stable regime.
inline void check_stability(double G_mb, bool allow_unstable) {
    if (allow_unstable) return;
    if (G_mb > stability_G_mb_max * (1.0 + 1e-12))
        throw ValidationError(
            "resolved G_mb = " + std::to_string(mhz_from_rad(G_mb)) +
            " MHz (cyclic) exceeds the 1.5 MHz stability bound; "
            "pass --allow-unstable to proceed");
}

}  // namespace ghsim
