// Sensing and leg actuation: motion-capture feed, claw-mounted line detector,
// and the rate-limited elbow servo that aligns the claw with the branch.
#pragma once

#include "perchsim/vehicle_model.hpp"

#include <deque>
#include <random>

namespace perchsim {

struct SensorFrame {
    double timestamp = 0.0;
    Vec3 position = Vec3::Zero();
    double pitch = 0.0;
    double yaw = 0.0;
    double pitch_rate = 0.0;
    double yaw_rate = 0.0;
    bool valid = false;
};

struct MocapModel {
    double rate = 100.0;  // Hz
    double latency = 0.0;  // s
    double position_noise_std = 0.0;  // m
    double angle_noise_std = 0.0;     // rad, also applied to rates in rad/s
    double dropout_prob = 0.0;

    void validate() const;
};

/// Caller-owned buffer of true poses used to delay the mocap feed.
class PoseHistory {
public:
    explicit PoseHistory(double horizon) : horizon_(horizon) {}

    void push(const SimState& state);

    /// Pose at time t by linear interpolation, or false if t precedes the
    /// buffered history.
    bool sample(double t, SensorFrame& out) const;

private:
    double horizon_;
    std::deque<SensorFrame> frames_;
};

/// One motion-capture frame: the pose delayed by the model latency plus
/// zero-mean Gaussian noise. `history` must already contain `true_state`.
[[nodiscard]] SensorFrame mocap_sample(const SimState& true_state, const PoseHistory& history,
                                       const MocapModel& model, std::mt19937_64& rng);

struct DetectorModel {
    double range = 1.5;         // m, enabling distance to the branch plane
    double fov_vertical = 0.4;  // m, half-width
    double fov_lateral = 0.3;   // m, half-width

    void validate() const;
};

struct LineDetection {
    double vertical_offset = 0.0;  // m, branch minus claw, positive up
    double lateral_offset = 0.0;   // m, along the branch axis
    double range = 0.0;            // m, distance to the branch plane
    bool valid = false;
};

[[nodiscard]] LineDetection line_detector(const SimState& true_state, const BranchSpec& branch,
                                          const VehicleParams& params, const DetectorModel& detector);

struct LegServoModel {
    double update_rate = 50.0;  // Hz
    double max_rate = 0.0;      // rad/s
    AngleRange angle_range;
    double leg_length = 0.0;    // m

    static LegServoModel from_vehicle(const VehicleParams& params, double update_rate);
};

/// New leg angle after one servo update. Holds position on an invalid
/// detection.
[[nodiscard]] double leg_servo_update(double current, const LineDetection& detection, const LegServoModel& model,
                                      double dt);

}  // namespace perchsim
