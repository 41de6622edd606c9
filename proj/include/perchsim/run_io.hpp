// Persistence of run logs (CSV) and campaign summaries (JSON).
#pragma once

#include "perchsim/campaign.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace perchsim {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column order of the per-step CSV log.
inline constexpr const char* kRunLogHeader =
    "time_s,x_m,y_m,z_m,vx_mps,vy_mps,vz_mps,pitch_rad,yaw_rad,flap_freq_hz,flap_phase_rad,leg_angle_rad,"
    "elevator_rad,rudder_rad,phase,detector_valid,vertical_offset_m,lateral_offset_m";

[[nodiscard]] std::string format_run_log(const RunLog& log);
void write_run_log(const RunLog& log, const std::filesystem::path& path);

/// Parses a CSV log. Fields not stored in the CSV (rates, claw state) are left
/// at their defaults.
[[nodiscard]] RunLog parse_run_log(const std::string& text);
[[nodiscard]] RunLog read_run_log(const std::filesystem::path& path);

/// Summary JSON with a fixed key order. Aggregate statistics are rounded to six
/// significant digits; per-run values keep full precision.
[[nodiscard]] std::string format_summary(const Scenario& scenario, const CampaignResult& result);
void write_summary(const Scenario& scenario, const CampaignResult& result, const std::filesystem::path& path);

/// Per-run outcomes recovered from a summary file.
[[nodiscard]] std::vector<RunOutcome> parse_summary_outcomes(const std::string& text);

/// Rounds to six significant digits, as stored in the summary.
[[nodiscard]] double round_sig6(double value);

}  // namespace perchsim
