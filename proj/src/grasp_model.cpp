#include "perchsim/grasp_model.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace perchsim {

namespace {

constexpr std::array<std::pair<FailureReason, std::string_view>, 6> kReasonNames{{
    {FailureReason::None, "none"},
    {FailureReason::MissVertical, "miss_vertical"},
    {FailureReason::MissLateral, "miss_lateral"},
    {FailureReason::SlipDuringClosure, "slip_during_closure"},
    {FailureReason::HoldTorqueExceeded, "hold_torque_exceeded"},
    {FailureReason::Overload, "overload"},
}};

}  // namespace

std::string_view to_string(FailureReason reason) {
    for (const auto& [r, name] : kReasonNames) {
        if (r == reason) return name;
    }
    return "unknown";
}

FailureReason failure_reason_from_string(std::string_view name) {
    for (const auto& [r, n] : kReasonNames) {
        if (n == name) return r;
    }
    throw ConfigError("unknown failure reason '" + std::string(name) + "'");
}

void GraspConfig::validate() const {
    if (!(capture_depth_margin > 0.0)) throw ConfigError("grasp.capture_depth_margin_m must be > 0");
    if (!(stop_distance > 0.0)) throw ConfigError("grasp.stop_distance_m must be > 0");
    if (!(overload_force > 0.0)) throw ConfigError("grasp.overload_force_n must be > 0");
}

bool GraspResult::contact() const {
    return failure_reason != FailureReason::MissVertical && failure_reason != FailureReason::MissLateral;
}

CaptureResult capture_check(const ContactEvent& ev, const VehicleParams& params, const BranchSpec& branch,
                            const GraspConfig& cfg) {
    if (std::abs(ev.vertical_miss) > params.claw_aperture / 2.0 - branch.radius) {
        return {false, FailureReason::MissVertical};
    }
    if (std::abs(ev.lateral_miss) > branch.length / 2.0) {
        return {false, FailureReason::MissLateral};
    }
    if (ev.relative_speed * params.claw_close_time > cfg.capture_depth_margin) {
        return {false, FailureReason::SlipDuringClosure};
    }
    return {true, FailureReason::None};
}

double hold_threshold(const VehicleParams& params, double gravity) {
    return params.claw_torque * params.pad_friction_margin / (params.mass * gravity);
}

HoldResult hold_check(double com_offset, const VehicleParams& params, double gravity) {
    if (params.mass * gravity * com_offset <= params.claw_torque * params.pad_friction_margin) {
        return {true, FailureReason::None};
    }
    return {false, FailureReason::HoldTorqueExceeded};
}

double impact_force(const ContactEvent& ev, const VehicleParams& params, double stop_distance) {
    if (!(stop_distance > 0.0)) {
        throw ConfigError("impact stop distance must be > 0");
    }
    return params.mass * ev.relative_speed * ev.relative_speed / (2.0 * stop_distance);
}

GraspResult evaluate_grasp(const ContactEvent& ev, const VehicleParams& params, const BranchSpec& branch,
                           const GraspConfig& cfg, double gravity) {
    GraspResult result;
    result.impact_force = impact_force(ev, params, cfg.stop_distance);

    const CaptureResult capture = capture_check(ev, params, branch, cfg);
    result.captured = capture.captured;
    if (!capture.captured) {
        result.failure_reason = capture.failure_reason;
        return result;
    }
    const HoldResult hold = hold_check(params.com_offset, params, gravity);
    result.held = hold.held;
    if (!hold.held) {
        result.failure_reason = hold.failure_reason;
        return result;
    }
    if (result.impact_force >= cfg.overload_force) {
        result.failure_reason = FailureReason::Overload;
    }
    return result;
}

}  // namespace perchsim
