// Scenario definition and its text file format.
//
// The file is a sectioned key-value format:
//
//     # comment
//     [vehicle]
//     mass_kg = 0.7   # trailing comments are allowed
//
//     [dispersion]
//     launch.exit_speed_mps = gaussian 0.1
//     launch.heading_rad = uniform 0.02
//
// Every key of every section is required, unknown keys are errors, and physical
// values carry their SI unit in the key name. Dispersion entries perturb a
// numeric key additively: gaussian <sigma> or uniform <half_width>.
#pragma once

#include "perchsim/control_stack.hpp"
#include "perchsim/grasp_model.hpp"
#include "perchsim/perception.hpp"
#include "perchsim/perch_fsm.hpp"
#include "perchsim/vehicle_model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <type_traits>

namespace perchsim {

/// Configuration error that names the offending scenario key.
class ScenarioError : public ConfigError {
public:
    ScenarioError(std::string key, const std::string& message)
        : ConfigError(key + ": " + message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class DispersionKind { Gaussian, Uniform };

struct Dispersion {
    DispersionKind kind = DispersionKind::Gaussian;
    double width = 0.0;  // sigma or half-width
};

struct LegServoConfig {
    double update_rate = 50.0;  // Hz
    bool enabled = true;
};

struct CalibrationTargets {
    double target_airspeed = 2.75;  // m/s at the pitch set-point
};

/// Where a scenario value comes from; written next to each value.
enum class Provenance { Reported, Calibrated, Assumed };

struct Scenario {
    VehicleParams vehicle;
    Environment env;
    BranchSpec branch;
    LaunchConfig launch;
    ControlGains gains;
    double pitch_ref = 0.0;  // rad
    TriggerConfig triggers;
    MocapModel mocap;
    DetectorModel detector;
    LegServoConfig leg_servo;
    GraspConfig grasp;
    CalibrationTargets calibration;
    double dt = 0.002;
    std::uint64_t master_seed = 0;
    std::map<std::string, Dispersion> dispersions;  // keyed "section.key"

    /// Throws ScenarioError naming the offending key.
    void validate() const;
};

/// Calls f(section, key, value, provenance) for every scalar field of a
/// scenario, in file order. value is double&, bool& or std::uint64_t&.
template <typename S, typename F>
    requires std::is_same_v<std::remove_const_t<S>, Scenario>
void visit_fields(S& s, F&& f) {
    using P = Provenance;
    auto& v = s.vehicle;
    f("vehicle", "mass_kg", v.mass, P::Reported);
    f("vehicle", "wingspan_m", v.wingspan, P::Reported);
    f("vehicle", "wing_area_m2", v.wing_area, P::Calibrated);
    f("vehicle", "pitch_inertia_kgm2", v.pitch_inertia, P::Assumed);
    f("vehicle", "yaw_inertia_kgm2", v.yaw_inertia, P::Assumed);
    f("vehicle", "flap_thrust_coeff_ns2", v.flap_thrust_coeff, P::Calibrated);
    f("vehicle", "flap_osc_amplitude_n", v.flap_osc_amplitude, P::Assumed);
    f("vehicle", "max_flap_freq_hz", v.max_flap_freq, P::Assumed);
    f("vehicle", "cruise_flap_freq_hz", v.cruise_flap_freq, P::Assumed);
    f("vehicle", "elevator_effectiveness_nm_per_rad_mps2", v.elevator_effectiveness, P::Assumed);
    f("vehicle", "rudder_effectiveness_nm_per_rad_mps2", v.rudder_effectiveness, P::Assumed);
    f("vehicle", "pitch_damping_nms_per_rad", v.pitch_damping, P::Assumed);
    f("vehicle", "yaw_damping_nms_per_rad", v.yaw_damping, P::Assumed);
    f("vehicle", "pitch_static_coeff_nm_per_mps2", v.pitch_static_coeff, P::Assumed);
    f("vehicle", "yaw_static_coeff_nm_per_mps2", v.yaw_static_coeff, P::Assumed);
    f("vehicle", "parasitic_drag_coeff", v.parasitic_drag_coeff, P::Assumed);
    f("vehicle", "drag_enabled", v.drag_enabled, P::Assumed);
    f("vehicle", "leg_length_m", v.leg_length, P::Assumed);
    f("vehicle", "leg_mount_angle_rad", v.leg_mount_angle, P::Assumed);
    f("vehicle", "leg_angle_min_rad", v.leg_angle_range.min, P::Assumed);
    f("vehicle", "leg_angle_max_rad", v.leg_angle_range.max, P::Assumed);
    f("vehicle", "leg_max_rate_radps", v.leg_max_rate, P::Assumed);
    f("vehicle", "claw_aperture_m", v.claw_aperture, P::Assumed);
    f("vehicle", "claw_close_time_s", v.claw_close_time, P::Reported);
    f("vehicle", "claw_torque_nm", v.claw_torque, P::Reported);
    f("vehicle", "pad_friction_margin", v.pad_friction_margin, P::Assumed);
    f("vehicle", "com_offset_m", v.com_offset, P::Assumed);

    f("environment", "gravity_mps2", s.env.gravity, P::Assumed);
    f("environment", "air_density_kgpm3", s.env.air_density, P::Assumed);
    f("environment", "wind_x_mps", s.env.wind.x(), P::Assumed);
    f("environment", "wind_y_mps", s.env.wind.y(), P::Assumed);
    f("environment", "wind_z_mps", s.env.wind.z(), P::Assumed);

    f("branch", "center_x_m", s.branch.center.x(), P::Assumed);
    f("branch", "center_y_m", s.branch.center.y(), P::Assumed);
    f("branch", "center_z_m", s.branch.center.z(), P::Reported);
    f("branch", "length_m", s.branch.length, P::Reported);
    f("branch", "radius_m", s.branch.radius, P::Assumed);
    f("branch", "axis_x", s.branch.axis.x(), P::Assumed);
    f("branch", "axis_y", s.branch.axis.y(), P::Assumed);

    f("launch", "rail_length_m", s.launch.rail_length, P::Reported);
    f("launch", "exit_speed_mps", s.launch.exit_speed, P::Reported);
    f("launch", "angle_of_attack_rad", s.launch.angle_of_attack, P::Reported);
    f("launch", "rail_height_m", s.launch.rail_height, P::Assumed);
    f("launch", "lateral_offset_m", s.launch.lateral_offset, P::Reported);
    f("launch", "heading_rad", s.launch.heading, P::Assumed);

    f("setpoints", "pitch_ref_rad", s.pitch_ref, P::Reported);

    auto& g = s.gains;
    f("gains", "pitch_kp", g.pitch_kp, P::Calibrated);
    f("gains", "pitch_ki_per_s", g.pitch_ki, P::Calibrated);
    f("gains", "pitch_rate_kd_s", g.pitch_rate_kd, P::Calibrated);
    f("gains", "yaw_kp", g.yaw_kp, P::Assumed);
    f("gains", "yaw_rate_kd_s", g.yaw_rate_kd, P::Assumed);
    f("gains", "alt_kp_hz_per_m", g.alt_kp, P::Calibrated);
    f("gains", "alt_ki_hz_per_ms", g.alt_ki, P::Calibrated);
    f("gains", "alt_rate_kd_hz_s_per_m", g.alt_rate_kd, P::Calibrated);
    f("gains", "pitch_integrator_limit_rads", g.pitch_integrator_limit, P::Assumed);
    f("gains", "alt_integrator_limit_ms", g.alt_integrator_limit, P::Assumed);
    f("gains", "elevator_limit_rad", g.elevator_limit, P::Assumed);
    f("gains", "rudder_limit_rad", g.rudder_limit, P::Assumed);
    f("gains", "rate_hz", g.rate, P::Assumed);

    f("triggers", "approach_distance_m", s.triggers.approach_distance, P::Reported);
    f("triggers", "cutoff_distance_m", s.triggers.cutoff_distance, P::Reported);
    f("triggers", "flyby_distance_m", s.triggers.flyby_distance, P::Assumed);
    f("triggers", "ground_altitude_m", s.triggers.ground_altitude, P::Assumed);
    f("triggers", "timeout_s", s.triggers.timeout, P::Assumed);

    f("mocap", "rate_hz", s.mocap.rate, P::Assumed);
    f("mocap", "latency_s", s.mocap.latency, P::Assumed);
    f("mocap", "position_noise_m", s.mocap.position_noise_std, P::Assumed);
    f("mocap", "angle_noise_rad", s.mocap.angle_noise_std, P::Assumed);
    f("mocap", "dropout_prob", s.mocap.dropout_prob, P::Assumed);

    f("detector", "range_m", s.detector.range, P::Reported);
    f("detector", "fov_vertical_m", s.detector.fov_vertical, P::Assumed);
    f("detector", "fov_lateral_m", s.detector.fov_lateral, P::Assumed);

    f("leg_servo", "update_rate_hz", s.leg_servo.update_rate, P::Reported);
    f("leg_servo", "enabled", s.leg_servo.enabled, P::Assumed);

    f("grasp", "capture_depth_margin_m", s.grasp.capture_depth_margin, P::Assumed);
    f("grasp", "stop_distance_m", s.grasp.stop_distance, P::Assumed);
    f("grasp", "overload_force_n", s.grasp.overload_force, P::Reported);

    f("calibration", "target_airspeed_mps", s.calibration.target_airspeed, P::Reported);

    f("simulation", "dt_s", s.dt, P::Assumed);
    f("simulation", "master_seed", s.master_seed, P::Assumed);
}

/// Address of a numeric scenario field given "section.key", or nullptr.
[[nodiscard]] double* find_numeric_field(Scenario& s, std::string_view dotted_key);

[[nodiscard]] Scenario parse_scenario(const std::string& text);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(write_scenario(s)) reproduces s exactly.
[[nodiscard]] std::string write_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
[[nodiscard]] std::string scenario_hash(const Scenario& s);

/// Pitch, altitude and heading references of the nominal plan: hold the pitch
/// set-point at branch height and head from the nominal rail exit to the branch.
[[nodiscard]] FlightPlan flight_plan(const Scenario& s);

}  // namespace perchsim
