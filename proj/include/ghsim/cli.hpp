#pragma once

#include <complex>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghsim/config.hpp"
#include "ghsim/sweep.hpp"
#include "ghsim/sweep_json.hpp"

namespace ghsim {

// Exit codes: 0 success, 2 config error, 3 non-convergence (steady-state).
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_no_convergence = 3;

namespace cli_detail {

inline std::string gnuplot_script(const std::string& csv_path, const std::string& kind,
                                  std::size_t n_columns) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set datafile commentschars '#'\n";
    s += "set key autotitle columnhead\n";
    if (kind == "map") {
        s += "set view map\n";
        s += "plot '" + csv_path + "' using 2:1:3 with image notitle\n";
        return s;
    }
    s += "plot ";
    bool first = true;
    if (kind == "spectrum") {
        for (std::size_t c = 2; c <= n_columns; ++c) {
            if (!first) s += ", ";
            s += "'" + csv_path + "' using 1:" + std::to_string(c) + " with lines";
            first = false;
        }
    } else if (kind == "ghs-angle" || kind == "length-sweep") {
        // s_over_lambda columns sit at 2, 5, 8, ...
        for (std::size_t c = 2; c <= n_columns; c += 3) {
            if (!first) s += ", ";
            s += "'" + csv_path + "' using 1:" + std::to_string(c) + " with lines";
            first = false;
        }
    } else {
        s += "'" + csv_path + "' using 1:2 with lines";
    }
    s += "\n";
    return s;
}

inline void write_table(const SweepTable& t, const std::string& out_path,
                        const std::string& format, bool emit_gnuplot,
                        std::ostream& out, std::ostream& err) {
    if (out_path.empty()) {
        if (emit_gnuplot)
            throw ConfigError("--emit-gnuplot requires --out");
        if (format == "csv")
            write_csv(out, t);
        else
            write_json(out, t);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + out_path + "'");
    if (format == "csv")
        write_csv(f, t);
    else
        write_json(f, t);
    err << "wrote " << out_path << " (" << t.rows.size() << " rows)\n";
    if (emit_gnuplot) {
        if (format != "csv")
            throw ConfigError("--emit-gnuplot requires --format csv");
        std::string kind = "";
        for (const auto& [k, v] : t.metadata)
            if (k == "kind") kind = v;
        const std::string gp_path = out_path + ".gp";
        std::ofstream gp(gp_path, std::ios::binary);
        if (!gp) throw ConfigError("cannot open gnuplot file '" + gp_path + "'");
        gp << gnuplot_script(out_path, kind, t.columns.size());
        err << "wrote " << gp_path << "\n";
    }
}

inline std::vector<double> mhz_list_to_rad(const std::vector<double>& mhz_values) {
    std::vector<double> out;
    out.reserve(mhz_values.size());
    for (double v : mhz_values) out.push_back(rad_from_mhz(v));
    return out;
}

inline std::vector<double> mm_list_to_m(const std::vector<double>& mm_values) {
    std::vector<double> out;
    out.reserve(mm_values.size());
    for (double v : mm_values) out.push_back(v * 1e-3);
    return out;
}

}  // namespace cli_detail

/// Parses argv-style arguments (program name excluded) and runs one
/// subcommand. Streams are injectable so tests can drive the CLI in-process.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
    CLI::App app{"Goos-Hanchen shift simulator for a driven cavity-magnomechanical system"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_path;
    std::string format = "csv";
    unsigned threads = 0;
    bool allow_unstable = false;
    bool emit_gnuplot = false;
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--set", sets, "override a config key, e.g. --set kappa_a_mhz=2.1")
        ->type_size(1);
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_flag("--allow-unstable", allow_unstable,
                 "evaluate beyond the G_mb stability bound");
    app.add_flag("--emit-gnuplot", emit_gnuplot,
                 "write a companion .gp plot script next to the CSV");

    // spectrum (Fig. 2)
    auto* sp = app.add_subcommand("spectrum", "probe susceptibility vs detuning");
    sp->fallthrough();
    double sp_xmin = -4.0, sp_xmax = 4.0;
    std::size_t sp_points = 1601;
    std::vector<double> sp_gmb = {0.0, 0.5};
    sp->add_option("--x-min-mhz", sp_xmin, "detuning axis start (cyclic MHz)");
    sp->add_option("--x-max-mhz", sp_xmax, "detuning axis end (cyclic MHz)");
    sp->add_option("--points", sp_points, "axis points");
    sp->add_option("--gmb-mhz", sp_gmb, "G_mb curve list (cyclic MHz)")
        ->delimiter(',')->type_size(1);

    // ghs (Fig. 3)
    auto* gh = app.add_subcommand("ghs", "normalized GHS vs incidence angle");
    gh->fallthrough();
    double gh_tmin = 0.001, gh_tmax = 1.55;
    std::size_t gh_points = 2000;
    std::vector<double> gh_gmb = {0.0};
    gh->add_option("--theta-min", gh_tmin, "angle axis start (rad)");
    gh->add_option("--theta-max", gh_tmax, "angle axis end (rad)");
    gh->add_option("--points", gh_points, "axis points");
    gh->add_option("--gmb-mhz", gh_gmb, "G_mb curve list (cyclic MHz)")
        ->delimiter(',')->type_size(1);

    // map (Figs. 4, 5)
    auto* mp = app.add_subcommand("map", "2-D GHS map over (theta, gmb) or (theta, x)");
    mp->fallthrough();
    std::string mp_axis2 = "gmb";
    double mp_tmin = 0.001, mp_tmax = 1.55;
    std::size_t mp_p1 = 300, mp_p2 = 300;
    std::optional<double> mp_a2min, mp_a2max;
    mp->add_option("--axis2", mp_axis2, "second axis: gmb or x")
        ->check(CLI::IsMember({"gmb", "x"}));
    mp->add_option("--theta-min", mp_tmin, "angle axis start (rad)");
    mp->add_option("--theta-max", mp_tmax, "angle axis end (rad)");
    mp->add_option("--points1", mp_p1, "angle axis points");
    mp->add_option("--axis2-min-mhz", mp_a2min, "second axis start (cyclic MHz)");
    mp->add_option("--axis2-max-mhz", mp_a2max, "second axis end (cyclic MHz)");
    mp->add_option("--points2", mp_p2, "second axis points");

    // kappa-sweep (Fig. 6)
    auto* ks = app.add_subcommand("kappa-sweep", "GHS vs kappa_a/g_ma at fixed angle");
    ks->fallthrough();
    double ks_rmin = 0.1, ks_rmax = 3.0;
    std::size_t ks_points = 581;
    ks->add_option("--ratio-min", ks_rmin, "kappa_a/g_ma axis start");
    ks->add_option("--ratio-max", ks_rmax, "kappa_a/g_ma axis end");
    ks->add_option("--points", ks_points, "axis points");

    // length-sweep (Fig. 7)
    auto* ls = app.add_subcommand("length-sweep", "GHS vs angle at several d2");
    ls->fallthrough();
    double ls_tmin = 0.001, ls_tmax = 1.55;
    std::size_t ls_points = 2000;
    std::vector<double> ls_d2 = {45.0, 70.0, 100.0};
    ls->add_option("--theta-min", ls_tmin, "angle axis start (rad)");
    ls->add_option("--theta-max", ls_tmax, "angle axis end (rad)");
    ls->add_option("--points", ls_points, "axis points");
    ls->add_option("--d2-mm", ls_d2, "intracavity length list (mm)")
        ->delimiter(',')->type_size(1);

    // steady-state (Eq. 8 report)
    auto* ss = app.add_subcommand("steady-state",
                                  "solve the drive-pathway steady state and report");
    ss->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_config_error;
    }

    try {
        Config cfg = config_path.empty() ? Config{} : Config::from_file(config_path);
        for (const auto& s : sets) cfg.apply_set(s);
        if (allow_unstable) cfg.set("allow_unstable", "true");
        Resolved r = cfg.resolve();

        if (ss->parsed()) {
            const SteadyStateReport rep = run_steady_state(r);
            auto cplx = [](const std::complex<double>& z) {
                return detail::format_double(z.real()) + (z.imag() < 0 ? " - i " : " + i ") +
                       detail::format_double(std::abs(z.imag()));
            };
            out << "N              = " << detail::format_double(rep.N) << "\n";
            out << "E_d_rad_per_s  = " << detail::format_double(rep.E_d) << "\n";
            out << "a_s            = " << cplx(rep.state.a_s) << "\n";
            out << "m_s            = " << cplx(rep.state.m_s) << "\n";
            out << "b_s            = " << cplx(rep.state.b_s) << "\n";
            out << "delta_s_mhz    = " << detail::format_double(mhz_from_rad(rep.state.delta_s)) << "\n";
            out << "G_mb_mhz       = " << detail::format_double(mhz_from_rad(rep.state.G_mb)) << "\n";
            out << "converged      = " << (rep.state.converged ? "true" : "false") << "\n";
            out << "iterations     = " << rep.state.iterations << "\n";
            out << "residual_a     = " << detail::format_double(rep.res_a) << "\n";
            out << "residual_m     = " << detail::format_double(rep.res_m) << "\n";
            out << "residual_b     = " << detail::format_double(rep.res_b) << "\n";
            if (!rep.state.converged) {
                err << "steady state did not converge after " << rep.state.iterations
                    << " iterations\n";
                return exit_no_convergence;
            }
            return exit_ok;
        }

        SweepTable table;
        if (sp->parsed()) {
            SpectrumPlan plan;
            plan.x_min = rad_from_mhz(sp_xmin);
            plan.x_max = rad_from_mhz(sp_xmax);
            plan.points = sp_points;
            plan.gmb = cli_detail::mhz_list_to_rad(sp_gmb);
            table = run_spectrum(r, plan, threads);
        } else if (gh->parsed()) {
            AnglePlan plan;
            plan.theta_min = gh_tmin;
            plan.theta_max = gh_tmax;
            plan.points = gh_points;
            plan.gmb = cli_detail::mhz_list_to_rad(gh_gmb);
            for (double G : plan.gmb) check_stability(G, r.allow_unstable);
            table = run_ghs_angle(r, plan, threads);
        } else if (mp->parsed()) {
            MapPlan plan;
            plan.axis2 = mp_axis2 == "gmb" ? MapAxis2::gmb : MapAxis2::x;
            plan.theta_min = mp_tmin;
            plan.theta_max = mp_tmax;
            plan.points1 = mp_p1;
            plan.points2 = mp_p2;
            const double a2min = mp_a2min.value_or(plan.axis2 == MapAxis2::gmb ? 0.01 : -0.3);
            const double a2max = mp_a2max.value_or(plan.axis2 == MapAxis2::gmb ? 1.5 : 0.3);
            plan.axis2_min = rad_from_mhz(a2min);
            plan.axis2_max = rad_from_mhz(a2max);
            if (plan.axis2 == MapAxis2::gmb)
                check_stability(plan.axis2_max, r.allow_unstable);
            table = run_map(r, plan, threads);
        } else if (ks->parsed()) {
            KappaPlan plan;
            plan.ratio_min = ks_rmin;
            plan.ratio_max = ks_rmax;
            plan.points = ks_points;
            table = run_kappa_sweep(r, plan, threads);
        } else if (ls->parsed()) {
            LengthPlan plan;
            plan.theta_min = ls_tmin;
            plan.theta_max = ls_tmax;
            plan.points = ls_points;
            plan.d2 = cli_detail::mm_list_to_m(ls_d2);
            table = run_length_sweep(r, plan, threads);
        }
        cli_detail::write_table(table, out_path, format, emit_gnuplot, out, err);
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
}

}  // namespace ghsim
