#include "perchsim/perch_fsm.hpp"

#include <array>
#include <string>
#include <utility>

namespace perchsim {

namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 7> kPhaseNames{{
    {Phase::OnLauncher, "OnLauncher"},
    {Phase::ControlledFlight, "ControlledFlight"},
    {Phase::BranchApproach, "BranchApproach"},
    {Phase::FlapCutoff, "FlapCutoff"},
    {Phase::Perched, "Perched"},
    {Phase::Missed, "Missed"},
    {Phase::Crashed, "Crashed"},
}};

}  // namespace

std::string_view to_string(Phase phase) {
    for (const auto& [p, name] : kPhaseNames) {
        if (p == phase) return name;
    }
    return "Unknown";
}

Phase phase_from_string(std::string_view name) {
    for (const auto& [p, n] : kPhaseNames) {
        if (n == name) return p;
    }
    throw ConfigError("unknown phase '" + std::string(name) + "'");
}

bool is_terminal(Phase phase) {
    return phase == Phase::Perched || phase == Phase::Missed || phase == Phase::Crashed;
}

void TriggerConfig::validate() const {
    if (!(approach_distance > 0.0)) throw ConfigError("triggers.approach_distance_m must be > 0");
    if (!(cutoff_distance > 0.0)) throw ConfigError("triggers.cutoff_distance_m must be > 0");
    if (!(flyby_distance > 0.0)) throw ConfigError("triggers.flyby_distance_m must be > 0");
    if (!(timeout > 0.0)) throw ConfigError("triggers.timeout_s must be > 0");
    if (!(cutoff_distance < approach_distance)) {
        throw ConfigError("triggers.cutoff_distance_m must be smaller than approach_distance_m");
    }
}

Phase phase_transition(Phase phase, const SimState& state, const VehicleParams& params, const BranchSpec& branch,
                       const TriggerConfig& trig, std::optional<ContactVerdict> contact) {
    if (is_terminal(phase)) {
        return phase;
    }
    if (!state.finite() || state.position.z() <= trig.ground_altitude || state.time > trig.timeout) {
        return Phase::Crashed;
    }

    const double distance = branch_plane_distance(state, params, branch);
    switch (phase) {
        case Phase::OnLauncher:
            // The run starts from the rail-exit state.
            return Phase::ControlledFlight;
        case Phase::ControlledFlight:
            return distance <= trig.approach_distance ? Phase::BranchApproach : phase;
        case Phase::BranchApproach:
            return distance <= trig.cutoff_distance ? Phase::FlapCutoff : phase;
        case Phase::FlapCutoff:
            if (contact && contact->contact) {
                return contact->perched ? Phase::Perched : Phase::Missed;
            }
            return distance <= -trig.flyby_distance ? Phase::Missed : phase;
        default:
            return phase;
    }
}

Setpoints setpoints_for_phase(Phase phase, const FlightPlan& plan) {
    Setpoints sp;
    switch (phase) {
        case Phase::OnLauncher:
        case Phase::ControlledFlight:
        case Phase::BranchApproach:
            sp.pitch_ref = plan.pitch_ref;
            sp.yaw_ref = plan.yaw_ref;
            sp.alt_ref = plan.alt_ref;
            sp.flapping_enabled = true;
            break;
        case Phase::FlapCutoff:
            sp.pitch_ref = plan.pitch_ref;
            sp.yaw_ref = plan.yaw_ref;
            sp.alt_ref = plan.alt_ref;
            sp.flapping_enabled = false;
            sp.hold_surfaces = true;
            break;
        default:
            sp.flapping_enabled = false;
            sp.hold_surfaces = false;
            break;
    }
    return sp;
}

bool detector_enabled(Phase phase) { return phase == Phase::BranchApproach || phase == Phase::FlapCutoff; }

}  // namespace perchsim
