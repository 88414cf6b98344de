#pragma once

namespace ghsim {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double two_pi = 6.283185307179586476925286766559;

}  // namespace ghsim
