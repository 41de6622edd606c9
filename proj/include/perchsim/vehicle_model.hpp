// Reduced-order flight model of a flapping-wing robot.
//
// Point-mass translation with pitch and yaw attitude dynamics and a flap phase
// oscillator. Roll is not modelled. World frame: x downrange, y lateral, z up.
#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace perchsim {

using Vec3 = Eigen::Vector3d;

/// Thrown for invalid configuration values (bad launch config, bad geometry).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the dynamics produce a non-finite value.
class ModelFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AngleRange {
    double min = 0.0;
    double max = 0.0;

    [[nodiscard]] double clamp(double angle) const;
    [[nodiscard]] bool contains(double angle) const { return angle >= min && angle <= max; }
};

struct VehicleParams {
    double mass = 0.0;           // kg
    double wingspan = 0.0;       // m
    double wing_area = 0.0;      // m^2, effective lifting area of the flat-plate closure
    double pitch_inertia = 0.0;  // kg m^2
    double yaw_inertia = 0.0;    // kg m^2

    double flap_thrust_coeff = 0.0;   // N s^2
    double flap_osc_amplitude = 0.0;  // N at max_flap_freq
    double max_flap_freq = 0.0;       // Hz
    double cruise_flap_freq = 0.0;    // Hz

    double elevator_effectiveness = 0.0;  // N m / rad / (m/s)^2
    double rudder_effectiveness = 0.0;    // N m / rad / (m/s)^2
    double pitch_damping = 0.0;           // N m s / rad
    double yaw_damping = 0.0;             // N m s / rad
    double pitch_static_coeff = 0.0;      // N m / (m/s)^2, restoring moment scale on sin(alpha)
    double yaw_static_coeff = 0.0;        // N m / (m/s)^2, weathercock moment scale on sin(beta)
    double parasitic_drag_coeff = 0.0;
    bool drag_enabled = true;  // false drops every drag term (energy diagnostics)

    double leg_length = 0.0;       // m, elbow to claw
    double leg_mount_angle = 0.0;  // rad, leg elevation relative to body x at leg_angle = 0
    AngleRange leg_angle_range;    // rad
    double leg_max_rate = 0.0;     // rad/s

    double claw_aperture = 0.0;        // m
    double claw_close_time = 0.0;      // s
    double claw_torque = 0.0;          // N m
    double pad_friction_margin = 0.0;  // multiplier on claw_torque for the hold check
    double com_offset = 0.0;           // m, claw axis to centre of mass when perched

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

struct Environment {
    double gravity = 9.81;
    double air_density = 1.225;
    Vec3 wind = Vec3::Zero();

    void validate() const;
};

struct BranchSpec {
    Vec3 center = Vec3::Zero();
    double length = 0.0;
    double radius = 0.0;
    Vec3 axis = Vec3::UnitY();  // horizontal unit vector along the branch

    void validate() const;

    /// Horizontal unit normal of the branch plane, oriented so that a vehicle
    /// approaching from the launcher sees a positive signed distance.
    [[nodiscard]] Vec3 plane_normal() const { return Vec3(axis.y(), -axis.x(), 0.0); }
};

struct LaunchConfig {
    double rail_length = 0.0;      // m
    double exit_speed = 0.0;       // m/s
    double angle_of_attack = 0.0;  // rad
    double rail_height = 0.0;      // m
    double lateral_offset = 0.0;   // m, perpendicular offset of the robot from the rail
    double heading = 0.0;          // rad

    void validate() const;
};

/// Maximum speed the launcher rail can deliver.
inline constexpr double kRailSpeedCeiling = 10.0;

/// Integration step cap; keeps >= 40 steps per flap cycle at 5 Hz.
inline constexpr double kMaxStep = 0.005;

struct SimState {
    double time = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    double pitch = 0.0;
    double pitch_rate = 0.0;
    double yaw = 0.0;
    double yaw_rate = 0.0;
    double flap_freq = 0.0;
    double flap_phase = 0.0;  // [0, 2pi)
    double leg_angle = 0.0;
    bool claw_closed = false;

    [[nodiscard]] bool finite() const;
};

/// Time derivative of the continuous part of SimState.
struct StateRate {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    double pitch = 0.0;
    double pitch_rate = 0.0;
    double yaw = 0.0;
    double yaw_rate = 0.0;
    double flap_phase = 0.0;
};

struct ControlCommand {
    double elevator = 0.0;       // rad
    double rudder = 0.0;         // rad
    double flap_freq_cmd = 0.0;  // Hz
    double leg_angle_cmd = 0.0;  // rad
    bool claw_trigger = false;

    friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

struct AeroCoefficients {
    double lift = 0.0;
    double drag = 0.0;
};

/// Flat-plate lift and drag coefficients with a parasitic drag offset.
[[nodiscard]] AeroCoefficients aero_coefficients(double alpha, double parasitic_drag_coeff);

/// Body-frame flapping force (x forward, y left, z up). A frequency outside
/// [0, max_flap_freq] means a controller saturation bug and throws
/// std::out_of_range.
[[nodiscard]] Vec3 flapping_forces(double flap_freq, double flap_phase, const VehicleParams& params);

/// Body axes in the world frame for the given attitude (no roll).
struct BodyAxes {
    Vec3 forward;
    Vec3 left;
    Vec3 up;
};
[[nodiscard]] BodyAxes body_axes(double pitch, double yaw);

/// Angle of attack and sideslip of the airflow relative to the body.
struct AirData {
    double airspeed = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};
[[nodiscard]] AirData air_data(const SimState& state, const Environment& env);

[[nodiscard]] StateRate state_derivative(const SimState& state, const ControlCommand& cmd,
                                         const VehicleParams& params, const Environment& env);

/// Classical RK4 step. leg_angle, claw_closed and flap_freq are held constant
/// over the step. Throws ConfigError for dt outside (0, kMaxStep] and
/// ModelFault for a non-finite result.
[[nodiscard]] SimState step_rk4(const SimState& state, const ControlCommand& cmd,
                                const VehicleParams& params, const Environment& env, double dt);

/// State at the rail exit. The rail is horizontal, so the release pitch equals
/// the launch angle of attack and the velocity is horizontal along heading.
[[nodiscard]] SimState launch_release(const LaunchConfig& cfg, const VehicleParams& params);

/// World position of the claw tip.
[[nodiscard]] Vec3 claw_tip(const SimState& state, const VehicleParams& params);

/// Signed horizontal distance from the claw tip to the branch plane; positive
/// before the crossing.
[[nodiscard]] double branch_plane_distance(const SimState& state, const VehicleParams& params,
                                           const BranchSpec& branch);

/// Wrap to [0, 2pi).
[[nodiscard]] double wrap_two_pi(double angle);

/// Wrap to (-pi, pi].
[[nodiscard]] double wrap_pi(double angle);

/// Translational kinetic plus potential energy per unit mass.
[[nodiscard]] double specific_energy(const SimState& state, const Environment& env);

}  // namespace perchsim
