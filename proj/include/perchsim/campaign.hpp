// Closed-loop flight runner and Monte Carlo campaigns.
#pragma once

#include "perchsim/control_stack.hpp"
#include "perchsim/grasp_model.hpp"
#include "perchsim/perception.hpp"
#include "perchsim/perch_fsm.hpp"
#include "perchsim/scenario.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace perchsim {

/// One row of the time-series log, taken after the FSM tick and before the
/// physics step of each simulation step.
struct LogSample {
    SimState state;
    double elevator = 0.0;
    double rudder = 0.0;
    Phase phase = Phase::OnLauncher;
    bool detector_valid = false;
    double vertical_offset = 0.0;
    double lateral_offset = 0.0;
};

using RunLog = std::vector<LogSample>;

inline constexpr std::size_t kPhaseCount = 7;

struct RunOutcome {
    std::uint64_t run_index = 0;
    Phase terminal_phase = Phase::Crashed;
    GraspResult grasp;
    bool crossed = false;          // the claw reached the branch plane
    double vertical_error = 0.0;   // m, body minus branch centre height
    double lateral_error = 0.0;    // m, body offset along the branch axis
    double vertical_miss = 0.0;    // m, claw tip minus branch centre height
    double contact_speed = 0.0;    // m/s
    double flight_time = 0.0;      // s
    std::optional<double> distance_at_altitude_capture;  // m downrange
    std::array<std::optional<double>, kPhaseCount> phase_entry_time{};
    std::uint64_t mocap_dropouts = 0;

    [[nodiscard]] bool perched() const { return terminal_phase == Phase::Perched; }
};

struct RunOptions {
    bool record_log = true;
    bool apply_dispersions = true;
};

struct FlightResult {
    RunOutcome outcome;
    RunLog log;
};

/// Scenario with this run's dispersions applied (deterministic in
/// master_seed and run_index).
[[nodiscard]] Scenario sample_dispersions(const Scenario& nominal, std::uint64_t run_index);

/// One flight from rail exit to a terminal phase. Event order inside a step:
/// sensors, controller, leg servo, FSM, physics.
[[nodiscard]] FlightResult run_flight(const Scenario& scenario, std::uint64_t run_index,
                                      const RunOptions& options = {});

struct Band {
    double min = 0.0;
    double max = 0.0;

    friend bool operator==(const Band&, const Band&) = default;
};

struct CampaignStats {
    std::size_t n_runs = 0;
    double success_rate = 0.0;
    double mean_abs_vertical_error = 0.0;  // over runs that reached the branch plane
    double p90_lateral_error = 0.0;        // nearest-rank, absolute values
    Band speed_band;                       // contact speeds
    Band altitude_capture_band;            // downrange distance of altitude capture
    std::map<std::string, std::size_t> failure_histogram;

    friend bool operator==(const CampaignStats&, const CampaignStats&) = default;
};

/// Nearest-rank quantile of the values (q in (0, 1]).
[[nodiscard]] double nearest_rank_quantile(std::vector<double> values, double q);

[[nodiscard]] CampaignStats compute_stats(const std::vector<RunOutcome>& outcomes);

struct CampaignResult {
    CampaignStats stats;
    std::vector<RunOutcome> outcomes;
};

/// Runs 0..n_runs-1 on `workers` threads (0 selects the hardware concurrency).
[[nodiscard]] CampaignResult run_campaign(const Scenario& scenario, std::size_t n_runs, unsigned workers = 0);

}  // namespace perchsim
