#include "perchsim/vehicle_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace perchsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

bool finite(const Vec3& v) { return v.allFinite(); }

SimState advance(const SimState& s, const StateRate& k, double h) {
    SimState out = s;
    out.position += h * k.position;
    out.velocity += h * k.velocity;
    out.pitch += h * k.pitch;
    out.pitch_rate += h * k.pitch_rate;
    out.yaw += h * k.yaw;
    out.yaw_rate += h * k.yaw_rate;
    out.flap_phase += h * k.flap_phase;
    out.time += h;
    return out;
}

}  // namespace

double AngleRange::clamp(double angle) const { return std::clamp(angle, min, max); }

void VehicleParams::validate() const {
    require(mass > 0.0, "vehicle.mass_kg must be > 0");
    require(wing_area > 0.0, "vehicle.wing_area_m2 must be > 0");
    require(pitch_inertia > 0.0, "vehicle.pitch_inertia_kgm2 must be > 0");
    require(yaw_inertia > 0.0, "vehicle.yaw_inertia_kgm2 must be > 0");
    require(max_flap_freq > 0.0 && max_flap_freq <= 10.0, "vehicle.max_flap_freq_hz must be in (0, 10]");
    require(cruise_flap_freq >= 0.0 && cruise_flap_freq <= max_flap_freq,
            "vehicle.cruise_flap_freq_hz must be in [0, max_flap_freq_hz]");
    require(flap_thrust_coeff > 0.0, "vehicle.flap_thrust_coeff_ns2 must be > 0");
    require(flap_osc_amplitude >= 0.0, "vehicle.flap_osc_amplitude_n must be >= 0");
    require(parasitic_drag_coeff >= 0.0, "vehicle.parasitic_drag_coeff must be >= 0");
    require(pitch_damping >= 0.0, "vehicle.pitch_damping_nms_per_rad must be >= 0");
    require(yaw_damping >= 0.0, "vehicle.yaw_damping_nms_per_rad must be >= 0");
    require(leg_length > 0.0, "vehicle.leg_length_m must be > 0");
    require(leg_angle_range.min < leg_angle_range.max && leg_angle_range.contains(0.0),
            "vehicle.leg_angle_min_rad and leg_angle_max_rad must bound a nonempty interval containing 0");
    require(leg_max_rate > 0.0, "vehicle.leg_max_rate_radps must be > 0");
    require(claw_aperture > 0.0, "vehicle.claw_aperture_m must be > 0");
    require(claw_close_time > 0.0, "vehicle.claw_close_time_s must be > 0");
    require(claw_torque > 0.0, "vehicle.claw_torque_nm must be > 0");
    require(pad_friction_margin > 0.0, "vehicle.pad_friction_margin must be > 0");
    require(com_offset >= 0.0, "vehicle.com_offset_m must be >= 0");
}

void Environment::validate() const {
    require(gravity > 0.0, "environment.gravity_mps2 must be > 0");
    require(air_density > 0.0, "environment.air_density_kgpm3 must be > 0");
    require(finite(wind), "environment.wind_x_mps wind components must be finite");
}

void BranchSpec::validate() const {
    require(length > 0.0, "branch.length_m must be > 0");
    require(radius > 0.0, "branch.radius_m must be > 0");
    require(std::abs(axis.z()) < 1e-12, "branch.axis_x axis must be horizontal");
    require(std::abs(axis.norm() - 1.0) < 1e-9, "branch.axis_x axis (axis_x, axis_y) must be unit norm");
}

void LaunchConfig::validate() const {
    require(exit_speed > 0.0 && exit_speed <= kRailSpeedCeiling, "launch.exit_speed_mps must be in (0, 10]");
    require(rail_length > 0.0, "launch.rail_length_m must be > 0");
}

bool SimState::finite() const {
    return position.allFinite() && velocity.allFinite() && std::isfinite(time) && std::isfinite(pitch) &&
           std::isfinite(pitch_rate) && std::isfinite(yaw) && std::isfinite(yaw_rate) &&
           std::isfinite(flap_freq) && std::isfinite(flap_phase) && std::isfinite(leg_angle);
}

AeroCoefficients aero_coefficients(double alpha, double parasitic_drag_coeff) {
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    return {2.0 * s * c, parasitic_drag_coeff + 2.0 * s * s};
}

Vec3 flapping_forces(double flap_freq, double flap_phase, const VehicleParams& params) {
    if (!(flap_freq >= 0.0 && flap_freq <= params.max_flap_freq)) {
        throw std::out_of_range("flap frequency " + std::to_string(flap_freq) + " Hz outside [0, " +
                                std::to_string(params.max_flap_freq) + "]");
    }
    if (flap_freq == 0.0) {
        return Vec3::Zero();
    }
    const double ratio = flap_freq / params.max_flap_freq;
    return {params.flap_thrust_coeff * flap_freq * flap_freq, 0.0,
            params.flap_osc_amplitude * ratio * ratio * std::sin(flap_phase)};
}

BodyAxes body_axes(double pitch, double yaw) {
    const double cp = std::cos(pitch);
    const double sp = std::sin(pitch);
    const double cy = std::cos(yaw);
    const double sy = std::sin(yaw);
    return {Vec3(cp * cy, cp * sy, sp), Vec3(-sy, cy, 0.0), Vec3(-sp * cy, -sp * sy, cp)};
}

AirData air_data(const SimState& state, const Environment& env) {
    const Vec3 air = state.velocity - env.wind;
    const double speed = air.norm();
    if (speed < 1e-9) {
        return {};
    }
    const BodyAxes axes = body_axes(state.pitch, state.yaw);
    const double u = air.dot(axes.forward);
    const double w = air.dot(axes.up);
    const double v = air.dot(axes.left);
    return {speed, std::atan2(-w, u), std::atan2(v, u)};
}

StateRate state_derivative(const SimState& state, const ControlCommand& cmd, const VehicleParams& params,
                           const Environment& env) {
    const BodyAxes axes = body_axes(state.pitch, state.yaw);
    const AirData air = air_data(state, env);

    Vec3 force = Vec3::Zero();
    if (air.airspeed > 0.0) {
        const Vec3 flow_dir = (state.velocity - env.wind) / air.airspeed;
        const double dyn_pressure = 0.5 * env.air_density * air.airspeed * air.airspeed;
        AeroCoefficients coeff = aero_coefficients(air.alpha, params.parasitic_drag_coeff);
        if (!params.drag_enabled) {
            coeff.drag = 0.0;
        }
        // Lift is perpendicular to the flow, in the plane spanned by flow and body normal.
        Vec3 lift_dir = axes.up - axes.up.dot(flow_dir) * flow_dir;
        const double lift_norm = lift_dir.norm();
        lift_dir = lift_norm > 1e-12 ? Vec3(lift_dir / lift_norm) : Vec3(Vec3::Zero());
        force += dyn_pressure * params.wing_area * (coeff.lift * lift_dir - coeff.drag * flow_dir);
    }

    const Vec3 flap = flapping_forces(state.flap_freq, state.flap_phase, params);
    force += flap.x() * axes.forward + flap.y() * axes.left + flap.z() * axes.up;

    const double v2 = air.airspeed * air.airspeed;
    const double pitch_moment = params.elevator_effectiveness * v2 * cmd.elevator -
                                params.pitch_damping * state.pitch_rate -
                                params.pitch_static_coeff * v2 * std::sin(air.alpha);
    const double yaw_moment = params.rudder_effectiveness * v2 * cmd.rudder - params.yaw_damping * state.yaw_rate +
                              params.yaw_static_coeff * v2 * std::sin(air.beta);

    StateRate rate;
    rate.position = state.velocity;
    rate.velocity = force / params.mass + Vec3(0.0, 0.0, -env.gravity);
    rate.pitch = state.pitch_rate;
    rate.pitch_rate = pitch_moment / params.pitch_inertia;
    rate.yaw = state.yaw_rate;
    rate.yaw_rate = yaw_moment / params.yaw_inertia;
    rate.flap_phase = kTwoPi * state.flap_freq;

    if (!(finite(rate.velocity) && std::isfinite(rate.pitch_rate) && std::isfinite(rate.yaw_rate))) {
        throw ModelFault("non-finite state derivative at t = " + std::to_string(state.time));
    }
    return rate;
}

SimState step_rk4(const SimState& state, const ControlCommand& cmd, const VehicleParams& params,
                  const Environment& env, double dt) {
    if (!(dt > 0.0 && dt <= kMaxStep)) {
        throw ConfigError("integration step must be in (0, 0.005] s");
    }
    const StateRate k1 = state_derivative(state, cmd, params, env);
    const StateRate k2 = state_derivative(advance(state, k1, 0.5 * dt), cmd, params, env);
    const StateRate k3 = state_derivative(advance(state, k2, 0.5 * dt), cmd, params, env);
    const StateRate k4 = state_derivative(advance(state, k3, dt), cmd, params, env);

    SimState next = state;
    const double h6 = dt / 6.0;
    next.position += h6 * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
    next.velocity += h6 * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
    next.pitch += h6 * (k1.pitch + 2.0 * k2.pitch + 2.0 * k3.pitch + k4.pitch);
    next.pitch_rate += h6 * (k1.pitch_rate + 2.0 * k2.pitch_rate + 2.0 * k3.pitch_rate + k4.pitch_rate);
    next.yaw += h6 * (k1.yaw + 2.0 * k2.yaw + 2.0 * k3.yaw + k4.yaw);
    next.yaw_rate += h6 * (k1.yaw_rate + 2.0 * k2.yaw_rate + 2.0 * k3.yaw_rate + k4.yaw_rate);
    next.flap_phase =
        wrap_two_pi(next.flap_phase + h6 * (k1.flap_phase + 2.0 * k2.flap_phase + 2.0 * k3.flap_phase + k4.flap_phase));
    next.time = state.time + dt;

    if (!next.finite()) {
        throw ModelFault("non-finite state after step at t = " + std::to_string(next.time));
    }
    return next;
}

SimState launch_release(const LaunchConfig& cfg, const VehicleParams& params) {
    cfg.validate();
    const Vec3 along(std::cos(cfg.heading), std::sin(cfg.heading), 0.0);
    const Vec3 across(-std::sin(cfg.heading), std::cos(cfg.heading), 0.0);

    SimState s;
    s.position = cfg.rail_length * along + cfg.lateral_offset * across + Vec3(0.0, 0.0, cfg.rail_height);
    s.velocity = cfg.exit_speed * along;
    s.pitch = cfg.angle_of_attack;
    s.yaw = cfg.heading;
    s.flap_freq = params.cruise_flap_freq;
    return s;
}

Vec3 claw_tip(const SimState& state, const VehicleParams& params) {
    const double elevation = state.pitch + params.leg_mount_angle + state.leg_angle;
    const double ce = std::cos(elevation);
    return state.position +
           params.leg_length * Vec3(ce * std::cos(state.yaw), ce * std::sin(state.yaw), std::sin(elevation));
}

double branch_plane_distance(const SimState& state, const VehicleParams& params, const BranchSpec& branch) {
    return (branch.center - claw_tip(state, params)).dot(branch.plane_normal());
}

double wrap_two_pi(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    return r >= kTwoPi ? 0.0 : r;
}

double wrap_pi(double angle) {
    double r = std::fmod(angle + std::numbers::pi, kTwoPi);
    if (r <= 0.0) {
        r += kTwoPi;
    }
    return r - std::numbers::pi;
}

double specific_energy(const SimState& state, const Environment& env) {
    return 0.5 * state.velocity.squaredNorm() + env.gravity * state.position.z();
}

}  // namespace perchsim
