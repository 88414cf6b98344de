#pragma once

#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ghsim/beamshift.hpp"
#include "ghsim/config.hpp"
#include "ghsim/magnomech.hpp"
#include "ghsim/version.hpp"

namespace ghsim {

/// Axis values follow lo + i (hi - lo)/(n - 1) exactly; n == 1 gives {lo}.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
    return v;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Static-chunk parallel loop. Cells are pure functions of their index, so
/// the result is independent of the worker count.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Flat result table: metadata header, column names, row-major numeric rows.
struct SweepTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::string join_mhz(const std::vector<double>& rads) {
    std::string s;
    for (std::size_t i = 0; i < rads.size(); ++i) {
        if (i) s += ',';
        s += format_double(mhz_from_rad(rads[i]));
    }
    return s;
}

inline std::string join_mm(const std::vector<double>& meters) {
    std::string s;
    for (std::size_t i = 0; i < meters.size(); ++i) {
        if (i) s += ',';
        s += format_double(meters[i] * 1e3);
    }
    return s;
}

inline void base_metadata(SweepTable& t, const Resolved& r, const std::string& kind) {
    t.metadata.emplace_back("tool", std::string("ghsim ") + version_string);
    t.metadata.emplace_back("kind", kind);
    for (auto& kv : canonical_entries(r)) t.metadata.push_back(kv);
}

}  // namespace detail

// --- plans ------------------------------------------------------------

struct SpectrumPlan {
    double x_min = -rad_from_mhz(4.0);
    double x_max = rad_from_mhz(4.0);
    std::size_t points = 1601;
    std::vector<double> gmb = {0.0, rad_from_mhz(0.5)};  // rad/s
};

struct AnglePlan {
    double theta_min = 0.001;
    double theta_max = 1.55;
    std::size_t points = 2000;
    std::vector<double> gmb = {0.0};  // curve variants, rad/s
};

struct LengthPlan {
    double theta_min = 0.001;
    double theta_max = 1.55;
    std::size_t points = 2000;
    std::vector<double> d2 = {45e-3, 70e-3, 100e-3};  // curve variants, m
};

enum class MapAxis2 { gmb, x };

struct MapPlan {
    double theta_min = 0.001;
    double theta_max = 1.55;
    std::size_t points1 = 300;
    MapAxis2 axis2 = MapAxis2::gmb;
    double axis2_min = rad_from_mhz(0.01);
    double axis2_max = rad_from_mhz(1.5);
    std::size_t points2 = 300;
};

struct KappaPlan {
    double ratio_min = 0.1;  // kappa_a / g_ma
    double ratio_max = 3.0;
    std::size_t points = 581;
};

namespace detail {

inline void check_axis(double lo, double hi, std::size_t points, const char* name) {
    if (points < 1) throw ConfigError(std::string(name) + ": points must be >= 1");
    if (points > 1 && !(lo < hi))
        throw ConfigError(std::string(name) + ": min must be < max");
}

}  // namespace detail

// --- runners ----------------------------------------------------------

/// Probe absorption/dispersion spectrum; one (Re chi, Im chi) column pair
/// per requested G_mb.
inline SweepTable run_spectrum(const Resolved& r, const SpectrumPlan& plan,
                               unsigned threads = 0) {
    detail::check_axis(plan.x_min, plan.x_max, plan.points, "spectrum x axis");
    if (plan.gmb.empty()) throw ConfigError("spectrum: need at least one G_mb");

    SweepTable t;
    detail::base_metadata(t, r, "spectrum");
    t.metadata.emplace_back("plan_x_min_mhz", detail::format_double(mhz_from_rad(plan.x_min)));
    t.metadata.emplace_back("plan_x_max_mhz", detail::format_double(mhz_from_rad(plan.x_max)));
    t.metadata.emplace_back("plan_points", std::to_string(plan.points));
    t.metadata.emplace_back("plan_gmb_mhz", detail::join_mhz(plan.gmb));

    t.columns.push_back("x_mhz");
    for (std::size_t v = 0; v < plan.gmb.size(); ++v) {
        t.columns.push_back("re_chi_" + std::to_string(v));
        t.columns.push_back("im_chi_" + std::to_string(v));
    }

    const auto xs = linspace(plan.x_min, plan.x_max, plan.points);
    t.rows.assign(plan.points, {});
    parallel_for(plan.points, threads, [&](std::size_t i) {
        std::vector<double> row;
        row.reserve(1 + 2 * plan.gmb.size());
        row.push_back(mhz_from_rad(xs[i]));
        for (double G : plan.gmb) {
            const auto resp = susceptibility(r.params, G, xs[i], r.rotation);
            row.push_back(resp.chi.real());
            row.push_back(resp.chi.imag());
        }
        t.rows[i] = std::move(row);
    });
    return t;
}

namespace detail {

// One GHS sample at (theta, x, G) with everything resolved.
inline ShiftSample ghs_sample(const Resolved& r, const Geometry& g, double theta,
                              double x, double G) {
    const complexd eps2 = susceptibility(r.params, G, x, r.rotation).eps2;
    return ghs(eps2, g, theta, probe_frequency(r.params.omega_a, x), r.h_theta);
}

}  // namespace detail

/// Normalized GHS versus incidence angle, one curve per G_mb variant.
inline SweepTable run_ghs_angle(const Resolved& r, const AnglePlan& plan,
                                unsigned threads = 0) {
    detail::check_axis(plan.theta_min, plan.theta_max, plan.points, "ghs theta axis");
    if (plan.gmb.empty()) throw ConfigError("ghs: need at least one G_mb");

    SweepTable t;
    detail::base_metadata(t, r, "ghs-angle");
    t.metadata.emplace_back("plan_theta_min_rad", detail::format_double(plan.theta_min));
    t.metadata.emplace_back("plan_theta_max_rad", detail::format_double(plan.theta_max));
    t.metadata.emplace_back("plan_points", std::to_string(plan.points));
    t.metadata.emplace_back("plan_gmb_mhz", detail::join_mhz(plan.gmb));

    t.columns.push_back("theta_rad");
    for (std::size_t v = 0; v < plan.gmb.size(); ++v) {
        t.columns.push_back("s_over_lambda_" + std::to_string(v));
        t.columns.push_back("mag_r_" + std::to_string(v));
        t.columns.push_back("singular_" + std::to_string(v));
    }

    const auto thetas = linspace(plan.theta_min, plan.theta_max, plan.points);
    t.rows.assign(plan.points, {});
    parallel_for(plan.points, threads, [&](std::size_t i) {
        std::vector<double> row;
        row.reserve(1 + 3 * plan.gmb.size());
        row.push_back(thetas[i]);
        for (double G : plan.gmb) {
            const ShiftSample s = detail::ghs_sample(r, r.geometry, thetas[i], r.probe.x, G);
            row.push_back(s.singular ? 0.0 : s.S_r_over_lambda);
            row.push_back(s.mag_R);
            row.push_back(s.singular ? 1.0 : 0.0);
        }
        t.rows[i] = std::move(row);
    });
    return t;
}

/// GHS versus angle at several intracavity lengths, fixed coupling.
inline SweepTable run_length_sweep(const Resolved& r, const LengthPlan& plan,
                                   unsigned threads = 0) {
    detail::check_axis(plan.theta_min, plan.theta_max, plan.points, "length theta axis");
    if (plan.d2.empty()) throw ConfigError("length-sweep: need at least one d2");
    const double G = resolve_coupling(r.params);
    check_stability(G, r.allow_unstable);

    SweepTable t;
    detail::base_metadata(t, r, "length-sweep");
    t.metadata.emplace_back("plan_theta_min_rad", detail::format_double(plan.theta_min));
    t.metadata.emplace_back("plan_theta_max_rad", detail::format_double(plan.theta_max));
    t.metadata.emplace_back("plan_points", std::to_string(plan.points));
    t.metadata.emplace_back("plan_d2_mm", detail::join_mm(plan.d2));

    t.columns.push_back("theta_rad");
    for (std::size_t v = 0; v < plan.d2.size(); ++v) {
        t.columns.push_back("s_over_lambda_" + std::to_string(v));
        t.columns.push_back("mag_r_" + std::to_string(v));
        t.columns.push_back("singular_" + std::to_string(v));
    }

    const auto thetas = linspace(plan.theta_min, plan.theta_max, plan.points);
    t.rows.assign(plan.points, {});
    parallel_for(plan.points, threads, [&](std::size_t i) {
        std::vector<double> row;
        row.reserve(1 + 3 * plan.d2.size());
        row.push_back(thetas[i]);
        for (double d2 : plan.d2) {
            Geometry g = r.geometry;
            g.d2 = d2;
            const ShiftSample s = detail::ghs_sample(r, g, thetas[i], r.probe.x, G);
            row.push_back(s.singular ? 0.0 : s.S_r_over_lambda);
            row.push_back(s.mag_R);
            row.push_back(s.singular ? 1.0 : 0.0);
        }
        t.rows[i] = std::move(row);
    });
    return t;
}

/// 2-D GHS map over (theta, G_mb) or (theta, x); row-major, axis1 slower.
inline SweepTable run_map(const Resolved& r, const MapPlan& plan, unsigned threads = 0) {
    detail::check_axis(plan.theta_min, plan.theta_max, plan.points1, "map theta axis");
    detail::check_axis(plan.axis2_min, plan.axis2_max, plan.points2, "map axis2");

    const bool over_gmb = plan.axis2 == MapAxis2::gmb;
    const double fixed_G = over_gmb ? 0.0 : resolve_coupling(r.params);
    if (!over_gmb) check_stability(fixed_G, r.allow_unstable);

    SweepTable t;
    detail::base_metadata(t, r, "map");
    t.metadata.emplace_back("plan_axis2", over_gmb ? "gmb" : "x");
    t.metadata.emplace_back("plan_theta_min_rad", detail::format_double(plan.theta_min));
    t.metadata.emplace_back("plan_theta_max_rad", detail::format_double(plan.theta_max));
    t.metadata.emplace_back("plan_points1", std::to_string(plan.points1));
    t.metadata.emplace_back("plan_axis2_min_mhz",
                            detail::format_double(mhz_from_rad(plan.axis2_min)));
    t.metadata.emplace_back("plan_axis2_max_mhz",
                            detail::format_double(mhz_from_rad(plan.axis2_max)));
    t.metadata.emplace_back("plan_points2", std::to_string(plan.points2));

    t.columns = {"theta_rad", over_gmb ? "gmb_mhz" : "x_mhz", "s_over_lambda",
                 "mag_r", "singular"};

    const auto thetas = linspace(plan.theta_min, plan.theta_max, plan.points1);
    const auto axis2 = linspace(plan.axis2_min, plan.axis2_max, plan.points2);
    const std::size_t n = plan.points1 * plan.points2;
    t.rows.assign(n, {});
    parallel_for(n, threads, [&](std::size_t idx) {
        const std::size_t i1 = idx / plan.points2;
        const std::size_t i2 = idx % plan.points2;
        const double theta = thetas[i1];
        const double G = over_gmb ? axis2[i2] : fixed_G;
        const double x = over_gmb ? r.probe.x : axis2[i2];
        const ShiftSample s = detail::ghs_sample(r, r.geometry, theta, x, G);
        t.rows[idx] = {theta, mhz_from_rad(axis2[i2]),
                       s.singular ? 0.0 : s.S_r_over_lambda, s.mag_R,
                       s.singular ? 1.0 : 0.0};
    });
    return t;
}

/// GHS versus cavity decay rate, reported as kappa_a / g_ma.
inline SweepTable run_kappa_sweep(const Resolved& r, const KappaPlan& plan,
                                  unsigned threads = 0) {
    detail::check_axis(plan.ratio_min, plan.ratio_max, plan.points, "kappa axis");
    const double G = resolve_coupling(r.params);
    check_stability(G, r.allow_unstable);

    SweepTable t;
    detail::base_metadata(t, r, "kappa-sweep");
    t.metadata.emplace_back("plan_ratio_min", detail::format_double(plan.ratio_min));
    t.metadata.emplace_back("plan_ratio_max", detail::format_double(plan.ratio_max));
    t.metadata.emplace_back("plan_points", std::to_string(plan.points));

    t.columns = {"kappa_a_over_g_ma", "s_over_lambda", "mag_r", "singular"};

    const auto ratios = linspace(plan.ratio_min, plan.ratio_max, plan.points);
    t.rows.assign(plan.points, {});
    parallel_for(plan.points, threads, [&](std::size_t i) {
        Resolved rr = r;
        rr.params.kappa_a = ratios[i] * r.params.g_ma;
        const ShiftSample s =
            detail::ghs_sample(rr, rr.geometry, rr.probe.theta, rr.probe.x, G);
        t.rows[i] = {ratios[i], s.singular ? 0.0 : s.S_r_over_lambda, s.mag_R,
                     s.singular ? 1.0 : 0.0};
    });
    return t;
}

/// Steady-state report for the drive-coupling pathway.
struct SteadyStateReport {
    SteadyState state;
    double E_d = 0.0;
    double N = 0.0;
    // Relative residuals of the three steady-state relations.
    double res_a = 0.0, res_m = 0.0, res_b = 0.0;
};

/// Relative residuals of the steady-state relations for a given state.
inline void eq_residuals(const SystemParams& p, double g_mb, double E_d,
                         const SteadyState& s, double& res_a, double& res_m,
                         double& res_b) {
    const complexd i{0.0, 1.0};
    const complexd lhs_a = s.a_s * (i * p.delta_a + p.kappa_a) + i * p.g_ma * s.m_s;
    const complexd lhs_m =
        s.m_s * (i * s.delta_s + p.kappa_m) + i * p.g_ma * s.a_s - E_d;
    const complexd lhs_b =
        s.b_s * (i * p.omega_b + p.gamma_b) + i * g_mb * std::norm(s.m_s);
    const double scale_a = std::max(std::abs(s.a_s) * p.omega_b, 1e-300);
    const double scale_m = std::max(std::abs(E_d), 1e-300);
    const double scale_b = std::max(std::abs(s.b_s) * p.omega_b, 1e-300);
    res_a = std::abs(lhs_a) / scale_a;
    res_m = std::abs(lhs_m) / scale_m;
    res_b = std::abs(lhs_b) / scale_b;
}

inline SteadyStateReport run_steady_state(const Resolved& r) {
    const auto* drive = std::get_if<DriveCoupling>(&r.params.coupling);
    if (!drive)
        throw ConfigError("steady-state requires coupling_mode = drive");
    SteadyStateReport rep;
    rep.N = spin_count(drive->D, drive->rho);
    rep.E_d = drive_amplitude(drive->B0, rep.N, drive->gamma_gyro);
    rep.state = solve_steady_state(r.params, rep.E_d);
    eq_residuals(r.params, drive->g_mb, rep.E_d, rep.state, rep.res_a, rep.res_m,
                 rep.res_b);
    if (rep.state.converged) check_stability(rep.state.G_mb, r.allow_unstable);
    return rep;
}

// --- writers ----------------------------------------------------------

inline void write_csv(std::ostream& out, const SweepTable& t) {
    for (const auto& [k, v] : t.metadata) out << "# " << k << " = " << v << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out << ',';
        out << t.columns[c];
    }
    out << "\n";
    char buf[40];
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace ghsim
