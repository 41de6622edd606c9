#include "perchsim/control_stack.hpp"

#include <algorithm>
#include <cmath>

namespace perchsim {

namespace {

struct PiOutput {
    double output;
    double integrator;
};

// PI(D) law with conditional-integration anti-windup: the integrator is frozen
// while the unclamped output is saturated and the error pushes further into
// saturation.
PiOutput clamped_pi(double base, double error, double kp, double ki, double integrator, double integrator_limit,
                    double lo, double hi, double dt) {
    const double candidate = std::clamp(integrator + error * dt, -integrator_limit, integrator_limit);
    const double raw = base + kp * error + ki * candidate;
    const bool deepening = (raw > hi && ki * error > 0.0) || (raw < lo && ki * error < 0.0);
    const double kept = deepening ? integrator : candidate;
    return {std::clamp(base + kp * error + ki * kept, lo, hi), kept};
}

}  // namespace

void ControlGains::validate() const {
    const double all[] = {pitch_kp, pitch_ki, pitch_rate_kd, yaw_kp, yaw_rate_kd, alt_kp, alt_ki, alt_rate_kd};
    for (double g : all) {
        if (!std::isfinite(g)) throw ConfigError("gains.pitch_kp all gains must be finite");
    }
    if (!(pitch_integrator_limit > 0.0)) throw ConfigError("gains.pitch_integrator_limit_rads must be > 0");
    if (!(alt_integrator_limit > 0.0)) throw ConfigError("gains.alt_integrator_limit_ms must be > 0");
    if (!(elevator_limit > 0.0)) throw ConfigError("gains.elevator_limit_rad must be > 0");
    if (!(rudder_limit > 0.0)) throw ConfigError("gains.rudder_limit_rad must be > 0");
    if (!(rate > 0.0)) throw ConfigError("gains.rate_hz must be > 0");
}

PitchLoopResult pitch_loop(const Setpoints& refs, double pitch, double pitch_rate, const ControlState& cs,
                           const ControlGains& gains, double dt) {
    const double error = refs.pitch_ref - pitch;
    const PiOutput pi = clamped_pi(-gains.pitch_rate_kd * pitch_rate, error, gains.pitch_kp, gains.pitch_ki,
                                   cs.pitch_integrator, gains.pitch_integrator_limit, -gains.elevator_limit,
                                   gains.elevator_limit, dt);
    ControlState next = cs;
    next.pitch_integrator = pi.integrator;
    return {pi.output, next};
}

double yaw_loop(const Setpoints& refs, double yaw, double yaw_rate, const ControlGains& gains) {
    const double error = wrap_pi(refs.yaw_ref - yaw);
    return std::clamp(gains.yaw_kp * error - gains.yaw_rate_kd * yaw_rate, -gains.rudder_limit, gains.rudder_limit);
}

AltitudeLoopResult altitude_loop(const Setpoints& refs, double z, const ControlState& cs, const ControlGains& gains,
                                 const VehicleParams& params, double dt) {
    const double error = refs.alt_ref - z;
    const PiOutput pi = clamped_pi(params.cruise_flap_freq - gains.alt_rate_kd * cs.climb_rate, error, gains.alt_kp, gains.alt_ki, cs.alt_integrator,
                                   gains.alt_integrator_limit, 0.0, params.max_flap_freq, dt);
    ControlState next = cs;
    next.alt_integrator = pi.integrator;
    return {pi.output, next};
}

ControllerOutput controller_update(const SensorFrame& frame, const Setpoints& refs, const ControlState& cs,
                                   const ControlGains& gains, const VehicleParams& params, double dt) {
    ControlState state = cs;
    if (!frame.valid) {
        ++state.dropouts;
        ControlCommand held = state.last_command;
        if (!refs.flapping_enabled) {
            held.flap_freq_cmd = 0.0;
        }
        return {held, state};
    }

    const double z = frame.position.z();
    if (state.has_altitude && frame.timestamp > state.last_update_time) {
        const double h = frame.timestamp - state.last_update_time;
        const double raw = (z - state.last_altitude) / h;
        state.climb_rate += h / (kClimbRateFilterTau + h) * (raw - state.climb_rate);
    }
    state.last_altitude = z;
    state.has_altitude = true;

    ControlCommand cmd;
    if (refs.hold_surfaces) {
        cmd.elevator = cs.last_command.elevator;
        cmd.rudder = cs.last_command.rudder;
    } else {
        const PitchLoopResult pitch = pitch_loop(refs, frame.pitch, frame.pitch_rate, state, gains, dt);
        state = pitch.state;
        cmd.elevator = pitch.elevator;
        cmd.rudder = yaw_loop(refs, frame.yaw, frame.yaw_rate, gains);
    }

    if (refs.flapping_enabled) {
        const AltitudeLoopResult alt = altitude_loop(refs, z, state, gains, params, dt);
        state = alt.state;
        cmd.flap_freq_cmd = alt.flap_freq_cmd;
    } else {
        cmd.flap_freq_cmd = 0.0;
    }

    state.last_update_time = frame.timestamp;
    state.last_command = cmd;
    return {cmd, state};
}

}  // namespace perchsim
