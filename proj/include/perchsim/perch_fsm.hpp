// Flight phase sequencing and the distance-based triggers of the perching
// manoeuvre.
#pragma once

#include "perchsim/control_stack.hpp"
#include "perchsim/vehicle_model.hpp"

#include <optional>
#include <string_view>

namespace perchsim {

/// Legal chain: OnLauncher -> ControlledFlight -> BranchApproach -> FlapCutoff
/// -> {Perched | Missed}. Any phase may go to Crashed. Terminal phases never exit.
enum class Phase {
    OnLauncher,
    ControlledFlight,
    BranchApproach,
    FlapCutoff,
    Perched,
    Missed,
    Crashed,
};

[[nodiscard]] std::string_view to_string(Phase phase);
[[nodiscard]] Phase phase_from_string(std::string_view name);
[[nodiscard]] bool is_terminal(Phase phase);

struct TriggerConfig {
    double approach_distance = 1.5;  // m
    double cutoff_distance = 0.2;    // m
    double flyby_distance = 0.5;     // m past the branch plane without contact
    double ground_altitude = 0.0;    // m
    double timeout = 15.0;           // s

    void validate() const;
};

/// Grasp verdict supplied by the runner on the step the claw crosses the
/// branch plane.
struct ContactVerdict {
    bool contact = false;
    bool perched = false;
};

/// One FSM tick. Distances are signed claw-tip distances to the branch plane.
[[nodiscard]] Phase phase_transition(Phase phase, const SimState& state, const VehicleParams& params,
                                     const BranchSpec& branch, const TriggerConfig& trig,
                                     std::optional<ContactVerdict> contact = std::nullopt);

/// Reference values the flight plan holds during the controlled phases.
struct FlightPlan {
    double pitch_ref = 0.0;
    double alt_ref = 0.0;
    double yaw_ref = 0.0;
};

[[nodiscard]] Setpoints setpoints_for_phase(Phase phase, const FlightPlan& plan);

[[nodiscard]] bool detector_enabled(Phase phase);

}  // namespace perchsim
