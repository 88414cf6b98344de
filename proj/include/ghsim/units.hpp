#pragma once

#include "ghsim/constants.hpp"

// All frequencies and rates are stored internally as angular frequencies in
// rad/s. Config files and CLI flags speak cyclic units (Hz, MHz, GHz, ...)
// and convert on load.

namespace ghsim {

constexpr double rad_from_hz(double f) { return f * two_pi; }
constexpr double rad_from_khz(double f) { return f * 1e3 * two_pi; }
constexpr double rad_from_mhz(double f) { return f * 1e6 * two_pi; }
constexpr double rad_from_ghz(double f) { return f * 1e9 * two_pi; }

constexpr double hz_from_rad(double w) { return w / two_pi; }
constexpr double mhz_from_rad(double w) { return w / two_pi / 1e6; }
constexpr double ghz_from_rad(double w) { return w / two_pi / 1e9; }

}  // namespace ghsim
