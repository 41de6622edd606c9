// Triple-loop autopilot: pitch (PI with rate damping) on the elevator, yaw
// (P with rate damping) on the rudder, altitude (PI with optional climb-rate
// damping) on the flapping frequency.
// The loops are independent SISO loops.
#pragma once

#include "perchsim/perception.hpp"
#include "perchsim/vehicle_model.hpp"

#include <cstdint>

namespace perchsim {

struct ControlGains {
    double pitch_kp = 0.0;       // rad elevator / rad
    double pitch_ki = 0.0;       // rad elevator / (rad s)
    double pitch_rate_kd = 0.0;  // rad elevator / (rad/s)
    double yaw_kp = 0.0;
    double yaw_rate_kd = 0.0;
    double alt_kp = 0.0;  // Hz / m
    double alt_ki = 0.0;  // Hz / (m s)
    double alt_rate_kd = 0.0;  // Hz / (m/s); 0 gives the plain altitude PI
    double pitch_integrator_limit = 0.0;  // rad s
    double alt_integrator_limit = 0.0;    // m s
    double elevator_limit = 0.0;          // rad
    double rudder_limit = 0.0;            // rad
    double rate = 100.0;                  // Hz

    void validate() const;
};

struct Setpoints {
    double pitch_ref = 0.0;
    double yaw_ref = 0.0;
    double alt_ref = 0.0;
    bool flapping_enabled = true;
    /// Elevator and rudder keep their last command instead of running the loops.
    bool hold_surfaces = false;
};

struct ControlState {
    double pitch_integrator = 0.0;
    double alt_integrator = 0.0;
    double last_update_time = 0.0;
    // Climb rate estimated by low-pass filtered differences of mocap altitude.
    double climb_rate = 0.0;
    double last_altitude = 0.0;
    bool has_altitude = false;
    ControlCommand last_command;
    std::uint64_t dropouts = 0;
};

struct PitchLoopResult {
    double elevator = 0.0;
    ControlState state;
};

[[nodiscard]] PitchLoopResult pitch_loop(const Setpoints& refs, double pitch, double pitch_rate,
                                         const ControlState& cs, const ControlGains& gains, double dt);

[[nodiscard]] double yaw_loop(const Setpoints& refs, double yaw, double yaw_rate, const ControlGains& gains);

struct AltitudeLoopResult {
    double flap_freq_cmd = 0.0;
    ControlState state;
};

/// flap = clamp(f_cruise - alt_rate_kd * cs.climb_rate + PI(alt_ref - z)).
[[nodiscard]] AltitudeLoopResult altitude_loop(const Setpoints& refs, double z, const ControlState& cs,
                                               const ControlGains& gains, const VehicleParams& params, double dt);

/// Time constant of the climb-rate filter [s].
inline constexpr double kClimbRateFilterTau = 0.05;

struct ControllerOutput {
    ControlCommand command;
    ControlState state;
};

/// One controller tick. An invalid frame repeats the previous command and
/// counts a dropout.
[[nodiscard]] ControllerOutput controller_update(const SensorFrame& frame, const Setpoints& refs,
                                                 const ControlState& cs, const ControlGains& gains,
                                                 const VehicleParams& params, double dt);

}  // namespace perchsim
