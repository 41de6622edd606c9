#include "perchsim/campaign.hpp"
#include "perchsim/perch_fsm.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <vector>

using namespace perchsim;
using perchsim::test::kDeg;

namespace {

class PhaseTransitionTest : public ::testing::Test {
protected:
    Scenario sc = test::nominal_scenario();

    // State whose claw tip is `distance` before the branch plane, at branch height.
    SimState at_distance(double distance) const {
        SimState s;
        s.time = 3.0;
        s.pitch = 30.0 * kDeg;
        const Vec3 offset = claw_tip(s, sc.vehicle) - s.position;
        s.position = sc.branch.center - distance * sc.branch.plane_normal() - offset;
        return s;
    }

    Phase step(Phase p, double distance, std::optional<ContactVerdict> v = std::nullopt) const {
        return phase_transition(p, at_distance(distance), sc.vehicle, sc.branch, sc.triggers, v);
    }
};

int chain_rank(Phase p) {
    switch (p) {
        case Phase::OnLauncher: return 0;
        case Phase::ControlledFlight: return 1;
        case Phase::BranchApproach: return 2;
        case Phase::FlapCutoff: return 3;
        default: return 4;
    }
}

}  // namespace

TEST_F(PhaseTransitionTest, ApproachBoundary) {
    EXPECT_EQ(step(Phase::ControlledFlight, 1.51), Phase::ControlledFlight);
    EXPECT_EQ(step(Phase::ControlledFlight, 1.49), Phase::BranchApproach);
}

TEST_F(PhaseTransitionTest, CutoffBoundary) {
    EXPECT_EQ(step(Phase::BranchApproach, 0.21), Phase::BranchApproach);
    EXPECT_EQ(step(Phase::BranchApproach, 0.19), Phase::FlapCutoff);
}

TEST_F(PhaseTransitionTest, GroundContactCrashesFromAnyLivePhase) {
    for (Phase p : {Phase::OnLauncher, Phase::ControlledFlight, Phase::BranchApproach, Phase::FlapCutoff}) {
        SimState s = at_distance(5.0);
        s.position.z() = 0.0;
        EXPECT_EQ(phase_transition(p, s, sc.vehicle, sc.branch, sc.triggers), Phase::Crashed);
    }
}

TEST_F(PhaseTransitionTest, TimeoutAndNonFiniteCrash) {
    SimState s = at_distance(5.0);
    s.time = sc.triggers.timeout + 0.01;
    EXPECT_EQ(phase_transition(Phase::ControlledFlight, s, sc.vehicle, sc.branch, sc.triggers), Phase::Crashed);
    s = at_distance(5.0);
    s.pitch = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(phase_transition(Phase::ControlledFlight, s, sc.vehicle, sc.branch, sc.triggers), Phase::Crashed);
}

TEST_F(PhaseTransitionTest, LauncherExitEntersControlledFlight) {
    EXPECT_EQ(step(Phase::OnLauncher, 12.0), Phase::ControlledFlight);
}

TEST_F(PhaseTransitionTest, CutoffResolvesOnVerdictOrFlyBy) {
    EXPECT_EQ(step(Phase::FlapCutoff, -0.01, ContactVerdict{true, true}), Phase::Perched);
    EXPECT_EQ(step(Phase::FlapCutoff, -0.01, ContactVerdict{true, false}), Phase::Missed);
    EXPECT_EQ(step(Phase::FlapCutoff, -0.01, ContactVerdict{false, false}), Phase::FlapCutoff);
    EXPECT_EQ(step(Phase::FlapCutoff, -sc.triggers.flyby_distance), Phase::Missed);
}

TEST_F(PhaseTransitionTest, TerminalPhasesNeverExit) {
    for (Phase p : {Phase::Perched, Phase::Missed, Phase::Crashed}) {
        SimState s = at_distance(0.1);
        s.position.z() = -1.0;
        EXPECT_EQ(phase_transition(p, s, sc.vehicle, sc.branch, sc.triggers, ContactVerdict{true, true}), p);
    }
}

TEST_F(PhaseTransitionTest, NoBackwardTransitions) {
    // Moving away from the branch again does not undo a trigger.
    EXPECT_EQ(step(Phase::BranchApproach, 3.0), Phase::BranchApproach);
    EXPECT_EQ(step(Phase::FlapCutoff, 3.0), Phase::FlapCutoff);
}

TEST(Setpoints, PerPhase) {
    const FlightPlan plan{30.0 * kDeg, 2.0, 0.05};
    const Setpoints cruise = setpoints_for_phase(Phase::ControlledFlight, plan);
    EXPECT_DOUBLE_EQ(cruise.pitch_ref, 30.0 * kDeg);
    EXPECT_DOUBLE_EQ(cruise.alt_ref, 2.0);
    EXPECT_DOUBLE_EQ(cruise.yaw_ref, 0.05);
    EXPECT_TRUE(cruise.flapping_enabled);
    EXPECT_FALSE(cruise.hold_surfaces);

    const Setpoints cutoff = setpoints_for_phase(Phase::FlapCutoff, plan);
    EXPECT_FALSE(cutoff.flapping_enabled);
    EXPECT_TRUE(cutoff.hold_surfaces);

    const Setpoints perched = setpoints_for_phase(Phase::Perched, plan);
    EXPECT_FALSE(perched.flapping_enabled);
    EXPECT_EQ(perched.pitch_ref, 0.0);
    EXPECT_EQ(perched.alt_ref, 0.0);
    EXPECT_EQ(perched.yaw_ref, 0.0);
}

TEST(DetectorEnabled, OnlyNearTheBranch) {
    EXPECT_FALSE(detector_enabled(Phase::ControlledFlight));
    EXPECT_TRUE(detector_enabled(Phase::BranchApproach));
    EXPECT_TRUE(detector_enabled(Phase::FlapCutoff));
    EXPECT_FALSE(detector_enabled(Phase::Perched));
}

TEST(PhaseNames, RoundTrip) {
    for (Phase p : {Phase::OnLauncher, Phase::ControlledFlight, Phase::BranchApproach, Phase::FlapCutoff,
                    Phase::Perched, Phase::Missed, Phase::Crashed}) {
        EXPECT_EQ(phase_from_string(to_string(p)), p);
    }
    EXPECT_THROW((void)phase_from_string("Hovering"), ConfigError);
}

TEST(TriggerConfig, CutoffMustBeInsideApproach) {
    TriggerConfig t;
    EXPECT_NO_THROW(t.validate());
    t.cutoff_distance = 2.0;
    EXPECT_THROW(t.validate(), ConfigError);
}

TEST(PhaseSequence, LoggedRunsFollowTheLegalChain) {
    const Scenario sc = test::nominal_scenario();
    for (std::uint64_t run = 0; run < 60; ++run) {
        const FlightResult f = run_flight(sc, run);
        ASSERT_FALSE(f.log.empty());
        std::vector<Phase> seq{f.log.front().phase};
        for (const LogSample& s : f.log) {
            if (s.phase != seq.back()) seq.push_back(s.phase);
        }
        for (std::size_t i = 1; i < seq.size(); ++i) {
            const bool forward = seq[i] == Phase::Crashed || chain_rank(seq[i]) == chain_rank(seq[i - 1]) + 1;
            ASSERT_TRUE(forward) << "run " << run << ": " << to_string(seq[i - 1]) << " -> " << to_string(seq[i]);
        }
        const auto terminal = std::count_if(seq.begin(), seq.end(), is_terminal);
        EXPECT_EQ(terminal, 1) << run;
        EXPECT_TRUE(is_terminal(f.log.back().phase));
        EXPECT_EQ(f.outcome.terminal_phase, f.log.back().phase);
        EXPECT_NE(f.outcome.terminal_phase, Phase::Crashed) << run;
    }
}
