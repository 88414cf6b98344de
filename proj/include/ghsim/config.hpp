#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghsim/beamshift.hpp"
#include "ghsim/magnomech.hpp"
#include "ghsim/params.hpp"
#include "ghsim/units.hpp"

namespace ghsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, resolved to internal units.
struct Resolved {
    SystemParams params;
    Geometry geometry;
    ProbeSpec probe;
    ChiRotation rotation = ChiRotation::none;
    bool allow_unstable = false;
    double h_theta = default_h_theta;           // rad
    double h_omega_frac = default_h_omega_frac; // fraction of omega_b
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "omega_a_ghz", "omega_b_mhz", "kappa_a_mhz", "kappa_m_mhz",
        "gamma_b_hz", "g_ma_mhz", "delta_a_mhz", "delta_m_mhz",
        "coupling_mode", "g_mb_direct_mhz", "b0_mt", "g_mb_rad_per_s",
        "sphere_diameter_um", "spin_density_per_m3", "gamma_gyro_ghz_per_t",
        "eps0", "eps1", "d1_mm", "d2_mm",
        "theta_rad", "x_mhz", "probe_power_w",
        "chi_rotation", "allow_unstable", "h_theta_rad", "h_omega_frac"};
    return keys;
}

inline bool is_known_key(const std::string& k) {
    for (const auto& key : known_keys())
        if (key == k) return true;
    return false;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse number from '" + value + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Raw key/value view of a config. Keys mirror field names with unit
/// suffixes; CLI --set flags override entries one-for-one.
class Config {
  public:
    void set(const std::string& key, const std::string& value) {
        const std::string k = detail::trim(key);
        if (!detail::is_known_key(k)) throw ConfigError("unknown config key '" + k + "'");
        entries_[k] = detail::trim(value);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const std::string& get(const std::string& key) const { return entries_.at(key); }

    /// Loads `key = value` lines; '#' starts a comment; blank lines ignored.
    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return from_text(ss.str());
    }

    static Config from_text(const std::string& text) {
        Config c;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + line + "'");
            c.set(line.substr(0, eq), line.substr(eq + 1));
        }
        return c;
    }

    /// Applies a repeatable `--set key=value` override.
    void apply_set(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + assignment + "'");
        set(assignment.substr(0, eq), assignment.substr(eq + 1));
    }

    Resolved resolve() const {
        Resolved r;
        auto num = [&](const std::string& key, double fallback) {
            return has(key) ? detail::parse_double(key, get(key)) : fallback;
        };

        r.params.omega_a = rad_from_ghz(num("omega_a_ghz", 13.2));
        r.params.omega_b = rad_from_mhz(num("omega_b_mhz", 15.0));
        r.params.kappa_a = rad_from_mhz(num("kappa_a_mhz", 2.1));
        r.params.kappa_m = rad_from_mhz(num("kappa_m_mhz", 0.1));
        r.params.gamma_b = rad_from_hz(num("gamma_b_hz", 150.0));
        r.params.g_ma = rad_from_mhz(num("g_ma_mhz", 2.0));
        // Red-sideband defaults: detunings follow omega_b unless overridden.
        r.params.delta_a = has("delta_a_mhz") ? rad_from_mhz(detail::parse_double(
                                                    "delta_a_mhz", get("delta_a_mhz")))
                                              : r.params.omega_b;
        r.params.delta_m = has("delta_m_mhz") ? rad_from_mhz(detail::parse_double(
                                                    "delta_m_mhz", get("delta_m_mhz")))
                                              : r.params.omega_b;

        const std::string mode = has("coupling_mode") ? get("coupling_mode") : "direct";
        if (mode == "direct") {
            r.params.coupling = DirectCoupling{rad_from_mhz(num("g_mb_direct_mhz", 0.0))};
        } else if (mode == "drive") {
            DriveCoupling c;
            c.g_mb = num("g_mb_rad_per_s", 0.0);
            c.B0 = num("b0_mt", 0.0) * 1e-3;
            c.D = num("sphere_diameter_um", 250.0) * 1e-6;
            c.rho = num("spin_density_per_m3", 4.22e27);
            c.gamma_gyro = rad_from_ghz(num("gamma_gyro_ghz_per_t", 28.0));
            r.params.coupling = c;
        } else {
            throw ConfigError("coupling_mode must be direct or drive, got '" + mode + "'");
        }

        r.geometry.eps0 = num("eps0", 1.0);
        r.geometry.eps1 = num("eps1", 2.2);
        r.geometry.d1 = num("d1_mm", 4.0) * 1e-3;
        r.geometry.d2 = num("d2_mm", 45.0) * 1e-3;

        r.probe.theta = num("theta_rad", 1.42);
        r.probe.x = rad_from_mhz(num("x_mhz", 0.0));
        r.probe.power = num("probe_power_w", 1e-6);

        const std::string rot = has("chi_rotation") ? get("chi_rotation") : "none";
        if (rot == "none")
            r.rotation = ChiRotation::none;
        else if (rot == "i")
            r.rotation = ChiRotation::rotate_i;
        else
            throw ConfigError("chi_rotation must be none or i, got '" + rot + "'");

        r.allow_unstable = has("allow_unstable")
                               ? detail::parse_bool("allow_unstable", get("allow_unstable"))
                               : false;
        r.h_theta = num("h_theta_rad", default_h_theta);
        r.h_omega_frac = num("h_omega_frac", default_h_omega_frac);

        validate(r.params);
        validate(r.geometry);
        validate(r.probe);
        if (!(r.h_theta > 0.0)) throw ConfigError("h_theta_rad must be positive");
        if (!(r.h_omega_frac > 0.0)) throw ConfigError("h_omega_frac must be positive");
        return r;
    }

  private:
    std::map<std::string, std::string> entries_;
};

/// Canonical key=value pairs for output metadata: every resolved parameter,
/// defaults included, in fixed order. Feeding these back through
/// Config::set reproduces the run.
inline std::vector<std::pair<std::string, std::string>> canonical_entries(const Resolved& r) {
    using detail::format_double;
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("omega_a_ghz", format_double(ghz_from_rad(r.params.omega_a)));
    kv.emplace_back("omega_b_mhz", format_double(mhz_from_rad(r.params.omega_b)));
    kv.emplace_back("kappa_a_mhz", format_double(mhz_from_rad(r.params.kappa_a)));
    kv.emplace_back("kappa_m_mhz", format_double(mhz_from_rad(r.params.kappa_m)));
    kv.emplace_back("gamma_b_hz", format_double(hz_from_rad(r.params.gamma_b)));
    kv.emplace_back("g_ma_mhz", format_double(mhz_from_rad(r.params.g_ma)));
    kv.emplace_back("delta_a_mhz", format_double(mhz_from_rad(r.params.delta_a)));
    kv.emplace_back("delta_m_mhz", format_double(mhz_from_rad(r.params.delta_m)));
    if (const auto* d = std::get_if<DirectCoupling>(&r.params.coupling)) {
        kv.emplace_back("coupling_mode", "direct");
        kv.emplace_back("g_mb_direct_mhz", format_double(mhz_from_rad(d->G_mb)));
    } else {
        const auto& c = std::get<DriveCoupling>(r.params.coupling);
        kv.emplace_back("coupling_mode", "drive");
        kv.emplace_back("g_mb_rad_per_s", format_double(c.g_mb));
        kv.emplace_back("b0_mt", format_double(c.B0 * 1e3));
        kv.emplace_back("sphere_diameter_um", format_double(c.D * 1e6));
        kv.emplace_back("spin_density_per_m3", format_double(c.rho));
        kv.emplace_back("gamma_gyro_ghz_per_t", format_double(ghz_from_rad(c.gamma_gyro)));
    }
    kv.emplace_back("eps0", format_double(r.geometry.eps0));
    kv.emplace_back("eps1", format_double(r.geometry.eps1));
    kv.emplace_back("d1_mm", format_double(r.geometry.d1 * 1e3));
    kv.emplace_back("d2_mm", format_double(r.geometry.d2 * 1e3));
    kv.emplace_back("theta_rad", format_double(r.probe.theta));
    kv.emplace_back("x_mhz", format_double(mhz_from_rad(r.probe.x)));
    kv.emplace_back("probe_power_w", format_double(r.probe.power));
    kv.emplace_back("chi_rotation", r.rotation == ChiRotation::none ? "none" : "i");
    kv.emplace_back("allow_unstable", r.allow_unstable ? "true" : "false");
    kv.emplace_back("h_theta_rad", format_double(r.h_theta));
    kv.emplace_back("h_omega_frac", format_double(r.h_omega_frac));
    return kv;
}

}  // namespace ghsim
