// Acceptance suite: one pass/fail line per criterion, composite criteria
// also list their clauses. Exit code = number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ghsim/beamshift.hpp"
#include "ghsim/cli.hpp"
#include "ghsim/magnomech.hpp"
#include "ghsim/sweep.hpp"
#include "ghsim/tmm.hpp"
#include "test_oracles.hpp"

using namespace ghsim;

namespace {

struct Clause {
    bool pass;
    std::string text;
};

struct Report {
    int failed = 0;

    void criterion(int id, const std::string& name, const std::vector<Clause>& clauses) {
        bool pass = true;
        for (const auto& c : clauses) pass = pass && c.pass;
        if (!pass) ++failed;
        std::printf("criterion %2d [%s] %s\n", id, pass ? "PASS" : "FAIL", name.c_str());
        if (clauses.size() > 1 || !pass)
            for (const auto& c : clauses)
                std::printf("             %s %s\n", c.pass ? "[pass]" : "[FAIL]",
                            c.text.c_str());
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

complexd eps2_of(const SystemParams& p, double G, double x) {
    return susceptibility(p, G, x).eps2;
}

// S_r/lambda over a theta grid at fixed (x, G); singular points excluded by
// the caller's checks (none arise on these grids).
std::vector<double> ghs_curve(const SystemParams& p, const Geometry& g,
                              const std::vector<double>& thetas, double x, double G) {
    const complexd eps2 = eps2_of(p, G, x);
    const double omega_p = probe_frequency(p.omega_a, x);
    std::vector<double> out(thetas.size());
    parallel_for(thetas.size(), 0, [&](std::size_t i) {
        const ShiftSample s = ghs(eps2, g, thetas[i], omega_p);
        out[i] = s.singular ? std::numeric_limits<double>::quiet_NaN()
                            : s.S_r_over_lambda;
    });
    return out;
}

std::string csv_of(const SweepTable& t) {
    std::ostringstream ss;
    write_csv(ss, t);
    return ss.str();
}

// ---- criteria ---------------------------------------------------------

void criterion_1(Report& rep, const SystemParams& p) {
    const double closed = p.kappa_a / (p.kappa_a + p.g_ma * p.g_ma / p.kappa_m);
    const double got = susceptibility(p, 0.0, 0.0).chi.real();
    const double err = std::abs(got - closed) / closed;
    rep.criterion(1, "resonant dip depth (Fig. 2 solid)",
                  {{err < 1e-9, "Re chi(0,0) = " + fmt("%.12f", got) + ", rel err " +
                                    fmt("%.3g", err) + " <= 1e-9"}});
}

void criterion_2(Report& rep, const SystemParams& p) {
    const auto xs = linspace(-rad_from_mhz(4.0), rad_from_mhz(4.0), 1601);
    std::vector<double> re0(xs.size()), re5(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        re0[i] = susceptibility(p, 0.0, xs[i]).chi.real();
        re5[i] = susceptibility(p, rad_from_mhz(0.5), xs[i]).chi.real();
    }
    const int n0 = oracles::count_local_maxima(re0);
    const int n5 = oracles::count_local_maxima(re5);

    // central maximum = the local maximum of the G > 0 curve closest to x = 0
    double x_central = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < re5.size(); ++i)
        if (re5[i] > re5[i - 1] && re5[i] > re5[i + 1] &&
            std::abs(xs[i]) < std::abs(x_central))
            x_central = xs[i];

    rep.criterion(
        2, "MMIT splitting (Fig. 2)",
        {{n0 == 2, "G_mb=0: " + std::to_string(n0) + " local maxima (expect 2)"},
         {n5 == 3, "G_mb=2pi*0.5 MHz: " + std::to_string(n5) + " local maxima (expect 3)"},
         {x_central < 0.0, "central maximum at x = " +
                               fmt("%.9g", mhz_from_rad(x_central)) +
                               " MHz (expect < 0; Eq. (10) is even in x, see notes)"}});
}

void criterion_3(Report& rep, const SystemParams& p, const Geometry& g) {
    const auto thetas = linspace(0.001, 1.5, 2000);
    const auto s = ghs_curve(p, g, thetas, 0.0, 0.0);
    double min_v = 1e300, max_v = -1e300, argmax = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i])) continue;
        min_v = std::min(min_v, s[i]);
        if (s[i] > max_v) {
            max_v = s[i];
            argmax = thetas[i];
        }
    }
    rep.criterion(3, "GHS peak location (Fig. 3, G_mb=0)",
                  {{min_v >= -1e-6, "min S_r/lambda = " + fmt("%.3g", min_v) + " >= -1e-6"},
                   {std::abs(argmax - 1.42) <= 0.03,
                    "global max " + fmt("%.3f", max_v) + " at theta = " +
                        fmt("%.4f", argmax) + " (expect 1.42 +- 0.03)"}});
}

void criterion_4(Report& rep, const SystemParams& p, const Geometry& g) {
    const auto thetas = linspace(0.001, 1.5, 2000);
    const auto s005 = ghs_curve(p, g, thetas, 0.0, rad_from_mhz(0.05));
    const auto s05 = ghs_curve(p, g, thetas, 0.0, rad_from_mhz(0.5));
    const double min005 = *std::min_element(s005.begin(), s005.end());
    const double min05 = *std::min_element(s05.begin(), s05.end());
    std::vector<Clause> clauses;
    clauses.push_back({min005 < 0.0, "G_mb=2pi*0.05 MHz: min S_r/lambda = " +
                                         fmt("%.4g", min005) + " (expect < 0)"});
    clauses.push_back({min05 < 0.0, "G_mb=2pi*0.5 MHz: min S_r/lambda = " +
                                        fmt("%.4g", min05) + " (expect < 0)"});
    const bool comparable = min005 < 0.0 && min05 < 0.0;
    clauses.push_back(
        {comparable && std::abs(min05) < std::abs(min005),
         comparable ? "|min(0.5 MHz)| < |min(0.05 MHz)|: " + fmt("%.4g", std::abs(min05)) +
                          " vs " + fmt("%.4g", std::abs(min005))
                    : "magnitude comparison unavailable (no negative bands)"});
    rep.criterion(4, "sign switching (Fig. 3)", clauses);
}

// Sign of the dominant GHS extremum over theta, per detuning; transition =
// the sign change nearest the strongest dominance. The theta grid must be
// dense enough to resolve the near-zero reflection fringes (width ~1e-4 rad)
// whose response dominates close to resonance.
double transition_detuning(const SystemParams& p, const Geometry& g, double G) {
    const auto xs = linspace(-rad_from_mhz(0.06), rad_from_mhz(0.06), 61);
    const auto thetas = linspace(0.4, 1.5, 40001);
    std::vector<double> dom(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto s = ghs_curve(p, g, thetas, xs[i], G);
        double best = 0.0;
        for (double v : s)
            if (std::isfinite(v) && std::abs(v) > std::abs(best)) best = v;
        dom[i] = best;
    }
    std::size_t i_star = 0;
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (std::abs(dom[i]) > std::abs(dom[i_star])) i_star = i;
    double best_mid = std::numeric_limits<double>::quiet_NaN();
    double best_dist = 1e300;
    for (std::size_t j = 0; j + 1 < dom.size(); ++j) {
        if ((dom[j] < 0.0) == (dom[j + 1] < 0.0)) continue;
        const double mid = 0.5 * (xs[j] + xs[j + 1]);
        const double dist = std::abs(mid - xs[i_star]);
        if (dist < best_dist) {
            best_dist = dist;
            best_mid = mid;
        }
    }
    return best_mid;
}

void criterion_5(Report& rep, const SystemParams& p, const Geometry& g) {
    const double t0 = transition_detuning(p, g, 0.0);
    const double t1 = transition_detuning(p, g, rad_from_mhz(1.0));
    rep.criterion(
        5, "detuning transition (Fig. 5)",
        {{std::isfinite(t0) && std::abs(t0) <= rad_from_mhz(0.05),
          "G_mb=0: transition at x = " + fmt("%.4g", mhz_from_rad(t0)) +
              " MHz (expect |x| <= 0.05)"},
         {std::isfinite(t1) && t1 < 0.0,
          "G_mb=2pi*1 MHz: transition at x = " + fmt("%.4g", mhz_from_rad(t1)) +
              " MHz (expect strictly negative)"}});
}

struct KappaScan {
    double arg_extremum;  // kappa_a/g_ma at max |S|
    double fwhm;          // of the positive peak, NaN if not applicable
};

KappaScan kappa_scan(const SystemParams& base, const Geometry& g, double theta,
                     double G) {
    const auto ratios = linspace(0.1, 3.0, 581);
    std::vector<double> s(ratios.size());
    parallel_for(ratios.size(), 0, [&](std::size_t i) {
        SystemParams p = base;
        p.kappa_a = ratios[i] * base.g_ma;
        const ShiftSample smp = ghs(eps2_of(p, G, 0.0), g, theta, p.omega_a);
        s[i] = smp.singular ? 0.0 : smp.S_r_over_lambda;
    });
    std::size_t i_ext = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s[i]) > std::abs(s[i_ext])) i_ext = i;

    KappaScan out;
    out.arg_extremum = ratios[i_ext];
    out.fwhm = std::numeric_limits<double>::quiet_NaN();
    if (s[i_ext] > 0.0) {
        const double half = 0.5 * s[i_ext];
        std::size_t lo = i_ext, hi = i_ext;
        while (lo > 0 && s[lo - 1] > half) --lo;
        while (hi + 1 < s.size() && s[hi + 1] > half) ++hi;
        auto interp = [&](std::size_t a, std::size_t b) {
            const double f = (half - s[a]) / (s[b] - s[a]);
            return ratios[a] + f * (ratios[b] - ratios[a]);
        };
        const double left = lo > 0 ? interp(lo, lo - 1) : ratios.front();
        const double right = hi + 1 < s.size() ? interp(hi, hi + 1) : ratios.back();
        out.fwhm = right - left;
    }
    return out;
}

void criterion_6(Report& rep, const SystemParams& p, const Geometry& g) {
    const KappaScan a = kappa_scan(p, g, 1.08, 0.0);
    const KappaScan b = kappa_scan(p, g, 1.42, 0.0);
    const KappaScan c = kappa_scan(p, g, 0.97, rad_from_mhz(0.01));
    const KappaScan d = kappa_scan(p, g, 0.70, rad_from_mhz(0.015));
    auto near1 = [](double r) { return std::abs(r - 1.0) <= 0.15; };
    rep.criterion(
        6, "coupling-regime optimum (Fig. 6)",
        {{near1(a.arg_extremum), "(a) G=0, theta=1.08: extremum at " + fmt("%.3f", a.arg_extremum)},
         {near1(b.arg_extremum), "(b) G=0, theta=1.42: extremum at " + fmt("%.3f", b.arg_extremum)},
         {near1(c.arg_extremum), "(c) G=2pi*0.01, theta=0.97: extremum at " + fmt("%.3f", c.arg_extremum)},
         {near1(d.arg_extremum), "(d) G=2pi*0.015, theta=0.70: extremum at " + fmt("%.3f", d.arg_extremum)},
         {b.fwhm < a.fwhm, "FWHM(theta=1.42) = " + fmt("%.3f", b.fwhm) +
                               " < FWHM(theta=1.08) = " + fmt("%.3f", a.fwhm)}});
}

void criterion_7(Report& rep, const SystemParams& p, const Geometry& g) {
    const auto thetas = linspace(0.3, 1.5, 6000);
    std::vector<Clause> clauses;
    for (double Gmhz : {0.0, 0.05}) {
        std::vector<int> counts;
        for (double d2 : {45e-3, 70e-3, 100e-3}) {
            Geometry gg = g;
            gg.d2 = d2;
            const auto s = ghs_curve(p, gg, thetas, 0.0, rad_from_mhz(Gmhz));
            counts.push_back(oracles::count_local_extrema(s));
        }
        const bool strict = counts[0] < counts[1] && counts[1] < counts[2];
        clauses.push_back({strict, "G_mb=2pi*" + fmt("%.3g", Gmhz) + " MHz: extrema counts " +
                                       std::to_string(counts[0]) + ", " +
                                       std::to_string(counts[1]) + ", " +
                                       std::to_string(counts[2]) +
                                       " (expect strictly increasing)"});
    }
    rep.criterion(7, "cavity-length fringes (Fig. 7)", clauses);
}

void criterion_8(Report& rep, const SystemParams& p, const Geometry& g) {
    // (a) zero-thickness mirrors against the Airy slab formula
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ue(1.0, 5.0), ud(1e-3, 0.2), ut(0.0, 1.55),
        uf(1e9, 20e9);
    double worst_a = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Geometry gg = g;
        gg.d1 = 0.0;
        gg.d2 = ud(rng);
        const double eps2 = ue(rng), theta = ut(rng), omega = two_pi * uf(rng);
        const StackResult r = stack(complexd{eps2, 0.0}, gg, theta, omega);
        const complexd airy =
            oracles::airy_slab_reflection(1.0, complexd{eps2, 0.0}, gg.d2, theta, omega);
        worst_a = std::max(worst_a, std::abs(r.mag_R - std::abs(airy)));
    }

    // (b) Eq.-(10) closed form against the direct 3x3 linear solve
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_b = 0.0;
    for (int i = 0; i < 100; ++i) {
        SystemParams q = p;
        q.kappa_a = rad_from_mhz(0.1 + 9.9 * u01(rng));
        q.kappa_m = rad_from_mhz(0.01 + 0.99 * u01(rng));
        q.gamma_b = rad_from_mhz(1e-5 + 1e-2 * u01(rng));
        q.g_ma = rad_from_mhz(0.1 + 4.9 * u01(rng));
        const double G = rad_from_mhz(2.0 * u01(rng));
        const double x = rad_from_mhz(-5.0 + 10.0 * u01(rng));
        const complexd fast = sideband_amplitude(q, G, x);
        const complexd slow = oracles::sideband_from_linear_system(
            q.kappa_a, q.kappa_m, q.gamma_b, q.g_ma, G, x);
        worst_b = std::max(worst_b, std::abs(fast - slow) / std::abs(slow));
    }

    // (c) quotient-rule phase derivative against unwrapped differencing
    double worst_c = 0.0;
    for (const auto& [G, x] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {rad_from_mhz(0.5), rad_from_mhz(0.3)}}) {
        const complexd eps2 = eps2_of(p, G, x);
        const double omega_p = probe_frequency(p.omega_a, x);
        for (double theta : linspace(0.2, 1.5, 200)) {
            const StackResult base = stack(eps2, g, theta, omega_p);
            if (base.mag_R <= 1e-3) continue;
            const auto quot = phase_derivative(eps2, g, theta, omega_p);
            if (!quot) continue;
            const double unwrapped = oracles::unwrapped_phase_derivative(
                [&](double t) { return stack(eps2, g, t, omega_p).R; }, theta,
                default_h_theta);
            worst_c = std::max(worst_c, std::abs(*quot - unwrapped) / std::abs(unwrapped));
        }
    }

    rep.criterion(8, "oracle equivalences",
                  {{worst_a < 1e-10, "(a) Airy slab: worst |R| deviation " + fmt("%.3g", worst_a)},
                   {worst_b < 1e-12, "(b) 3x3 linear solve: worst rel " + fmt("%.3g", worst_b)},
                   {worst_c < 1e-6, "(c) unwrapped phase: worst rel " + fmt("%.3g", worst_c)}});
}

void criterion_9(Report& rep, const SystemParams& p, const Geometry& g) {
    // unimodularity fuzz; |det - 1| is scaled by the squared entry size,
    // since thick lossy layers have entries of order e^{Im(kx) d} and the
    // identity can only hold to roundoff at that scale
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> ue(1.0, 5.0), ui(0.0, 0.5), ud(0.0, 0.2),
        ut(0.0, 1.55), uf(1e9, 20e9);
    double worst_det = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const LayerMatrix m = layer_matrix(complexd{ue(rng), ui(rng)}, ud(rng),
                                           ut(rng), two_pi * uf(rng));
        const double s = std::max({std::abs(m.m11), std::abs(m.m12),
                                   std::abs(m.m21), std::abs(m.m22)});
        worst_det = std::max(worst_det, std::abs(m.det() - 1.0) / std::max(1.0, s * s));
    }

    // layer-splitting composition identity
    double worst_split = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const complexd eps{ue(rng), ui(rng)};
        const double d = 1e-4 + ud(rng), theta = ut(rng), omega = two_pi * uf(rng);
        const LayerMatrix whole = layer_matrix(eps, d, theta, omega);
        const LayerMatrix half = layer_matrix(eps, d / 2.0, theta, omega);
        const complexd p11 = half.m11 * half.m11 + half.m12 * half.m21;
        const complexd p12 = half.m11 * half.m12 + half.m12 * half.m22;
        const complexd p21 = half.m21 * half.m11 + half.m22 * half.m21;
        const complexd p22 = half.m21 * half.m12 + half.m22 * half.m22;
        const double scale = std::abs(whole.m11) + std::abs(whole.m12) +
                             std::abs(whole.m21) + std::abs(whole.m22);
        worst_split = std::max({worst_split, std::abs(p11 - whole.m11) / scale,
                                std::abs(p12 - whole.m12) / scale,
                                std::abs(p21 - whole.m21) / scale,
                                std::abs(p22 - whole.m22) / scale});
    }

    // passivity for Im eps2 >= 0
    double worst_R = 0.0;
    for (double im : {0.0, 0.05, 0.5})
        for (double theta : linspace(0.0, 1.55, 500)) {
            const StackResult r = stack(complexd{1.05, im}, g, theta, p.omega_a);
            if (!r.singular) worst_R = std::max(worst_R, r.mag_R);
        }
    for (double x : linspace(-rad_from_mhz(2.0), rad_from_mhz(2.0), 41)) {
        const complexd eps2 = eps2_of(p, rad_from_mhz(0.5), x);
        if (eps2.imag() < 0.0) continue;
        for (double theta : linspace(0.0, 1.55, 200)) {
            const StackResult r = stack(eps2, g, theta, probe_frequency(p.omega_a, x));
            if (!r.singular) worst_R = std::max(worst_R, r.mag_R);
        }
    }

    // reality pairing on a symmetric grid
    double worst_parity = 0.0;
    const auto xs = linspace(-rad_from_mhz(4.0), rad_from_mhz(4.0), 801);
    double scale_chi = 0.0;
    std::vector<complexd> chis(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        chis[i] = susceptibility(p, rad_from_mhz(0.5), xs[i]).chi;
        scale_chi = std::max(scale_chi, std::abs(chis[i]));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t j = xs.size() - 1 - i;
        worst_parity = std::max(worst_parity,
                                std::abs(chis[i] - std::conj(chis[j])) / scale_chi);
    }

    // determinism across worker counts
    const Resolved res = Config{}.resolve();
    SpectrumPlan sp;
    sp.points = 41;
    AnglePlan ap;
    ap.points = 301;
    MapPlan mp;
    mp.points1 = 24;
    mp.points2 = 17;
    const bool deterministic =
        csv_of(run_spectrum(res, sp, 1)) == csv_of(run_spectrum(res, sp, 4)) &&
        csv_of(run_ghs_angle(res, ap, 1)) == csv_of(run_ghs_angle(res, ap, 5)) &&
        csv_of(run_map(res, mp, 1)) == csv_of(run_map(res, mp, 3));

    rep.criterion(9, "structural invariants",
                  {{worst_det < 1e-12, "unimodularity: worst |det-1| " + fmt("%.3g", worst_det)},
                   {worst_split < 1e-12, "layer splitting: worst rel " + fmt("%.3g", worst_split)},
                   {worst_R <= 1.0 + 1e-9, "passivity: max |R| " + fmt("%.12f", worst_R)},
                   {worst_parity < 1e-10, "Re chi even / Im chi odd: worst " + fmt("%.3g", worst_parity)},
                   {deterministic, "byte-identical sweeps across 1/3/4/5 workers"}});
}

void criterion_10(Report& rep, const SystemParams& base) {
    SystemParams p = base;
    p.coupling = DriveCoupling{.g_mb = 0.095, .B0 = 0.5e-3};
    const auto& c = std::get<DriveCoupling>(p.coupling);
    const double E_d = drive_amplitude(c.B0, spin_count(c.D, c.rho), c.gamma_gyro);
    const SteadyState s = solve_steady_state(p, E_d);
    double ra = 1.0, rm = 1.0, rb = 1.0;
    if (s.converged) eq_residuals(p, c.g_mb, E_d, s, ra, rm, rb);
    const double worst_res = std::max({ra, rm, rb});

    SystemParams p1 = base;
    p1.coupling = DriveCoupling{.g_mb = 0.095, .B0 = 1e-6};
    SystemParams p10 = base;
    p10.coupling = DriveCoupling{.g_mb = 0.095, .B0 = 1e-5};
    const double g1 = resolve_coupling(p1);
    const double g10 = resolve_coupling(p10);
    const double lin_err = std::abs(g10 / (10.0 * g1) - 1.0);

    SystemParams p0 = base;
    p0.coupling = DriveCoupling{.g_mb = 0.095, .B0 = 0.0};
    const SteadyState z = solve_steady_state(p0, 0.0);
    const bool exact_zero = z.converged && z.a_s == complexd{} && z.m_s == complexd{} &&
                            z.b_s == complexd{} && z.G_mb == 0.0;

    rep.criterion(10, "steady-state solver",
                  {{s.converged && worst_res < 1e-10,
                    "residuals at B0=0.5 mT: worst " + fmt("%.3g", worst_res) +
                        " (G_mb = " + fmt("%.4f", mhz_from_rad(s.G_mb)) + " MHz)"},
                   {lin_err < 0.01, "G_mb linear in B0 over a decade: rel dev " +
                                        fmt("%.3g", lin_err)},
                   {exact_zero, "E_d = 0 gives the exactly-zero state"}});
}

}  // namespace

int main() {
    const SystemParams p = default_params();
    const Geometry g = default_geometry();
    Report rep;
    criterion_1(rep, p);
    criterion_2(rep, p);
    criterion_3(rep, p, g);
    criterion_4(rep, p, g);
    criterion_5(rep, p, g);
    criterion_6(rep, p, g);
    criterion_7(rep, p, g);
    criterion_8(rep, p, g);
    criterion_9(rep, p, g);
    criterion_10(rep, p);
    std::printf("%d of 10 criteria passed\n", 10 - rep.failed);
    return rep.failed;
}
