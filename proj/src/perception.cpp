#include "perchsim/perception.hpp"

#include <algorithm>
#include <cmath>

namespace perchsim {

void MocapModel::validate() const {
    if (!(rate > 0.0)) throw ConfigError("mocap.rate_hz must be > 0");
    if (!(latency >= 0.0)) throw ConfigError("mocap.latency_s must be >= 0");
    if (!(position_noise_std >= 0.0)) throw ConfigError("mocap.position_noise_m must be >= 0");
    if (!(angle_noise_std >= 0.0)) throw ConfigError("mocap.angle_noise_rad must be >= 0");
    if (!(dropout_prob >= 0.0 && dropout_prob < 1.0)) throw ConfigError("mocap.dropout_prob must be in [0, 1)");
}

void DetectorModel::validate() const {
    if (!(range > 0.0)) throw ConfigError("detector.range_m must be > 0");
    if (!(fov_vertical > 0.0)) throw ConfigError("detector.fov_vertical_m must be > 0");
    if (!(fov_lateral > 0.0)) throw ConfigError("detector.fov_lateral_m must be > 0");
}

void PoseHistory::push(const SimState& state) {
    SensorFrame f;
    f.timestamp = state.time;
    f.position = state.position;
    f.pitch = state.pitch;
    f.yaw = state.yaw;
    f.pitch_rate = state.pitch_rate;
    f.yaw_rate = state.yaw_rate;
    f.valid = true;
    frames_.push_back(f);
    while (frames_.size() > 2 && frames_[1].timestamp < state.time - horizon_) {
        frames_.pop_front();
    }
}

bool PoseHistory::sample(double t, SensorFrame& out) const {
    if (frames_.empty() || t < frames_.front().timestamp) {
        return false;
    }
    if (t >= frames_.back().timestamp) {
        out = frames_.back();
        return true;
    }
    const auto upper = std::upper_bound(frames_.begin(), frames_.end(), t,
                                        [](double time, const SensorFrame& f) { return time < f.timestamp; });
    const SensorFrame& b = *upper;
    const SensorFrame& a = *(upper - 1);
    const double span = b.timestamp - a.timestamp;
    const double w = span > 0.0 ? (t - a.timestamp) / span : 0.0;
    out.timestamp = t;
    out.position = a.position + w * (b.position - a.position);
    out.pitch = a.pitch + w * (b.pitch - a.pitch);
    out.yaw = a.yaw + w * (b.yaw - a.yaw);
    out.pitch_rate = a.pitch_rate + w * (b.pitch_rate - a.pitch_rate);
    out.yaw_rate = a.yaw_rate + w * (b.yaw_rate - a.yaw_rate);
    out.valid = true;
    return true;
}

SensorFrame mocap_sample(const SimState& true_state, const PoseHistory& history, const MocapModel& model,
                         std::mt19937_64& rng) {
    // Draws happen unconditionally so the stream position depends only on the
    // number of frames taken.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool dropped = unit(rng) < model.dropout_prob;
    double noise[8];
    for (double& n : noise) {
        n = gauss(rng);
    }

    SensorFrame frame;
    if (!history.sample(true_state.time - model.latency, frame) || dropped) {
        frame.timestamp = true_state.time;
        frame.valid = false;
        return frame;
    }
    frame.position += model.position_noise_std * Vec3(noise[0], noise[1], noise[2]);
    frame.pitch += model.angle_noise_std * noise[3];
    frame.yaw += model.angle_noise_std * noise[4];
    frame.pitch_rate += model.angle_noise_std * noise[5];
    frame.yaw_rate += model.angle_noise_std * noise[6];
    return frame;
}

LineDetection line_detector(const SimState& true_state, const BranchSpec& branch, const VehicleParams& params,
                            const DetectorModel& detector) {
    const Vec3 tip = claw_tip(true_state, params);
    const Vec3 delta = branch.center - tip;
    LineDetection d;
    d.range = delta.dot(branch.plane_normal());
    d.vertical_offset = delta.z();
    d.lateral_offset = delta.dot(branch.axis);
    d.valid = d.range >= 0.0 && d.range <= detector.range && std::abs(d.vertical_offset) <= detector.fov_vertical &&
              std::abs(d.lateral_offset) <= detector.fov_lateral;
    return d;
}

LegServoModel LegServoModel::from_vehicle(const VehicleParams& params, double update_rate) {
    return {update_rate, params.leg_max_rate, params.leg_angle_range, params.leg_length};
}

double leg_servo_update(double current, const LineDetection& detection, const LegServoModel& model, double dt) {
    if (!detection.valid) {
        return current;
    }
    const double target = model.angle_range.clamp(current + std::atan(detection.vertical_offset / model.leg_length));
    const double max_step = model.max_rate * dt;
    return model.angle_range.clamp(current + std::clamp(target - current, -max_step, max_step));
}

}  // namespace perchsim
