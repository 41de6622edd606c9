// Trim calibration, closed-loop flight metrics, and the gain grid search that
// produces the committed nominal scenario.
#pragma once

#include "perchsim/campaign.hpp"
#include "perchsim/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace perchsim {

/// Level flight with the body at `pitch` (so alpha = pitch) at `airspeed`.
struct TrimSolution {
    double wing_area = 0.0;  // m^2 that makes lift plus thrust lift carry the weight
    double thrust = 0.0;     // N along the body axis that balances drag
    double flap_thrust_coeff = 0.0;
};

/// Closed-form trim for the flat-plate model at the cruise flap frequency.
[[nodiscard]] TrimSolution solve_trim(const VehicleParams& vehicle, const Environment& env, double pitch,
                                      double airspeed);

struct FlightMetrics {
    std::optional<double> pitch_settling_time;  // s, after which pitch stays within tolerance
    double max_pitch = 0.0;                     // rad
    double steady_airspeed = 0.0;               // m/s, mean over the last second before cutoff
    double steady_pitch = 0.0;                  // rad, mean over the same window
    std::optional<double> altitude_capture_distance;
};

/// Metrics over the controlled phases of a logged flight.
[[nodiscard]] FlightMetrics analyze_flight(const RunLog& log, const Scenario& scenario,
                                           double pitch_tolerance = 2.0 * 3.14159265358979323846 / 180.0);

struct GainCandidate {
    ControlGains gains;
    FlightMetrics metrics;
    Phase terminal_phase = Phase::Crashed;
    double score = 0.0;
};

struct CalibrationReport {
    Scenario scenario;
    TrimSolution trim;
    std::size_t candidates_evaluated = 0;
    std::size_t candidates_feasible = 0;
    GainCandidate best;
};

/// Trims the vehicle to the target airspeed at the pitch set-point, then grid
/// searches the pitch and altitude gains on the undispersed nominal flight,
/// minimising pitch settling time subject to: pitch never above 40 degrees,
/// altitude captured 8-12 m downrange, steady airspeed in [2.5, 3.0] m/s, and a
/// perched outcome. Throws ConfigError when no candidate is feasible.
[[nodiscard]] CalibrationReport calibrate(const Scenario& base);

}  // namespace perchsim
