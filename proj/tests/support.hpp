#pragma once

#include "perchsim/scenario.hpp"

#include <cmath>
#include <numbers>

namespace perchsim::test {

inline constexpr double kDeg = std::numbers::pi / 180.0;

inline Scenario nominal_scenario() { return load_scenario(PERCHSIM_NOMINAL_SCENARIO); }
inline Scenario base_scenario() { return load_scenario(PERCHSIM_BASE_SCENARIO); }

// Angular distance on the circle.
inline double circular_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace perchsim::test
