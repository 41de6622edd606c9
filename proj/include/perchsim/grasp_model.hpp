// Perch success at branch contact: capture geometry over the claw closure
// window, post-closure hold against the gravity torque, and the impact load.
#pragma once

#include "perchsim/vehicle_model.hpp"

#include <string_view>

namespace perchsim {

struct ContactEvent {
    double time = 0.0;
    Vec3 claw_tip_position = Vec3::Zero();
    double relative_speed = 0.0;  // m/s
    double vertical_miss = 0.0;   // m, claw minus branch centre
    double lateral_miss = 0.0;    // m, along the branch axis
};

enum class FailureReason {
    None,
    MissVertical,
    MissLateral,
    SlipDuringClosure,
    HoldTorqueExceeded,
    Overload,
};

[[nodiscard]] std::string_view to_string(FailureReason reason);
[[nodiscard]] FailureReason failure_reason_from_string(std::string_view name);

struct GraspConfig {
    double capture_depth_margin = 0.0;  // m of travel the claw tolerates while closing
    double stop_distance = 0.0;         // m, constant-deceleration stopping length
    double overload_force = 150.0;      // N

    void validate() const;
};

struct GraspResult {
    bool captured = false;
    bool held = false;
    double impact_force = 0.0;
    FailureReason failure_reason = FailureReason::None;

    [[nodiscard]] bool perched() const { return failure_reason == FailureReason::None; }
    /// The claw physically met the branch (as opposed to passing by it).
    [[nodiscard]] bool contact() const;
};

struct CaptureResult {
    bool captured = false;
    FailureReason failure_reason = FailureReason::None;
};

[[nodiscard]] CaptureResult capture_check(const ContactEvent& ev, const VehicleParams& params,
                                          const BranchSpec& branch, const GraspConfig& cfg);

struct HoldResult {
    bool held = false;
    FailureReason failure_reason = FailureReason::None;
};

[[nodiscard]] HoldResult hold_check(double com_offset, const VehicleParams& params, double gravity);

/// Largest centre-of-mass offset the claw can hold.
[[nodiscard]] double hold_threshold(const VehicleParams& params, double gravity);

/// Constant-deceleration impact load, m v^2 / (2 d).
[[nodiscard]] double impact_force(const ContactEvent& ev, const VehicleParams& params, double stop_distance);

[[nodiscard]] GraspResult evaluate_grasp(const ContactEvent& ev, const VehicleParams& params,
                                         const BranchSpec& branch, const GraspConfig& cfg, double gravity);

}  // namespace perchsim
