#include "perchsim/campaign.hpp"
#include "perchsim/run_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace perchsim;

namespace {

bool same_outcome(const RunOutcome& a, const RunOutcome& b) {
    return a.run_index == b.run_index && a.terminal_phase == b.terminal_phase &&
           a.grasp.failure_reason == b.grasp.failure_reason && a.grasp.impact_force == b.grasp.impact_force &&
           a.crossed == b.crossed && a.vertical_error == b.vertical_error && a.lateral_error == b.lateral_error &&
           a.vertical_miss == b.vertical_miss && a.contact_speed == b.contact_speed &&
           a.flight_time == b.flight_time && a.distance_at_altitude_capture == b.distance_at_altitude_capture &&
           a.phase_entry_time == b.phase_entry_time && a.mocap_dropouts == b.mocap_dropouts;
}

}  // namespace

TEST(RunFlight, NominalIsBitReproducible) {
    const Scenario s = test::nominal_scenario();
    const FlightResult a = run_flight(s, 0, RunOptions{true, false});
    const FlightResult b = run_flight(s, 0, RunOptions{true, false});
    EXPECT_TRUE(same_outcome(a.outcome, b.outcome));
    EXPECT_EQ(format_run_log(a.log), format_run_log(b.log));
}

TEST(RunFlight, NominalReachesBranchAndCapturesAltitudeInBand) {
    const Scenario s = test::nominal_scenario();
    const FlightResult f = run_flight(s, 0, RunOptions{true, false});
    EXPECT_TRUE(f.outcome.crossed);
    EXPECT_EQ(f.outcome.terminal_phase, Phase::Perched);
    ASSERT_TRUE(f.outcome.distance_at_altitude_capture.has_value());
    EXPECT_GE(*f.outcome.distance_at_altitude_capture, 8.0);
    EXPECT_LE(*f.outcome.distance_at_altitude_capture, 12.0);
    // Every logged sample before the capture is below the branch height.
    for (const LogSample& r : f.log) {
        if (r.state.position.x() >= *f.outcome.distance_at_altitude_capture) break;
        ASSERT_LT(r.state.position.z(), s.branch.center.z());
    }
}

TEST(RunFlight, FlappingStopsAtCutoff) {
    const FlightResult f = run_flight(test::nominal_scenario(), 3);
    for (const LogSample& r : f.log) {
        if (r.phase == Phase::FlapCutoff) {
            ASSERT_EQ(r.state.flap_freq, 0.0);
        }
    }
}

TEST(RunFlight, DispersionsAreDeterministicPerRun) {
    const Scenario s = test::nominal_scenario();
    const Scenario a = sample_dispersions(s, 17);
    const Scenario b = sample_dispersions(s, 17);
    const Scenario c = sample_dispersions(s, 18);
    EXPECT_EQ(write_scenario(a), write_scenario(b));
    EXPECT_NE(write_scenario(a), write_scenario(c));
    EXPECT_NE(a.launch.exit_speed, s.launch.exit_speed);
    EXPECT_EQ(a.launch.rail_length, s.launch.rail_length);
}

TEST(RunFlight, DifferentSeedsDiffer) {
    Scenario s = test::nominal_scenario();
    const RunOutcome a = run_flight(s, 4, RunOptions{false, true}).outcome;
    s.master_seed += 1;
    const RunOutcome b = run_flight(s, 4, RunOptions{false, true}).outcome;
    EXPECT_NE(a.lateral_error, b.lateral_error);
}

TEST(Campaign, SingleRunStatsEqualTheRun) {
    const Scenario s = test::nominal_scenario();
    const CampaignResult c = run_campaign(s, 1, 1);
    const RunOutcome& o = c.outcomes.front();
    EXPECT_EQ(c.stats.n_runs, 1U);
    EXPECT_EQ(c.stats.success_rate, o.perched() ? 1.0 : 0.0);
    EXPECT_EQ(c.stats.mean_abs_vertical_error, std::abs(o.vertical_error));
    EXPECT_EQ(c.stats.p90_lateral_error, std::abs(o.lateral_error));
    EXPECT_EQ(c.stats.speed_band, (Band{o.contact_speed, o.contact_speed}));
    EXPECT_TRUE(same_outcome(o, run_flight(s, 0, RunOptions{false, true}).outcome));
}

TEST(Campaign, WorkerCountDoesNotChangeResults) {
    const Scenario s = test::nominal_scenario();
    const CampaignResult one = run_campaign(s, 40, 1);
    const CampaignResult four = run_campaign(s, 40, 4);
    EXPECT_EQ(one.stats, four.stats);
    for (std::size_t i = 0; i < one.outcomes.size(); ++i) {
        EXPECT_TRUE(same_outcome(one.outcomes[i], four.outcomes[i])) << i;
        EXPECT_EQ(one.outcomes[i].run_index, i);
    }
    EXPECT_EQ(format_summary(s, one), format_summary(s, four));
}

TEST(Campaign, ZeroRunsRejected) { EXPECT_THROW((void)run_campaign(test::nominal_scenario(), 0), ConfigError); }

TEST(Campaign, StatsRecomputedFromSummaryMatch) {
    const Scenario s = test::nominal_scenario();
    const CampaignResult c = run_campaign(s, 50, 2);
    const std::string summary = format_summary(s, c);
    const std::vector<RunOutcome> reread = parse_summary_outcomes(summary);
    ASSERT_EQ(reread.size(), c.outcomes.size());
    const CampaignStats again = compute_stats(reread);
    EXPECT_EQ(again, c.stats);
    EXPECT_EQ(format_summary(s, CampaignResult{again, reread}), summary);
}

TEST(Stats, NearestRankQuantile) {
    EXPECT_EQ(nearest_rank_quantile({5.0}, 0.9), 5.0);
    EXPECT_EQ(nearest_rank_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9), 9.0);
    EXPECT_EQ(nearest_rank_quantile({10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0}, 0.9), 9.0);
    EXPECT_EQ(nearest_rank_quantile({3, 1, 2}, 1.0), 3.0);
}

TEST(Stats, HistogramCountsEveryFailure) {
    std::vector<RunOutcome> outcomes(4);
    outcomes[0].terminal_phase = Phase::Perched;
    outcomes[1].terminal_phase = Phase::Missed;
    outcomes[1].grasp.failure_reason = FailureReason::MissLateral;
    outcomes[2].terminal_phase = Phase::Crashed;
    outcomes[3].terminal_phase = Phase::Missed;
    outcomes[3].grasp.failure_reason = FailureReason::MissLateral;
    const CampaignStats st = compute_stats(outcomes);
    EXPECT_EQ(st.success_rate, 0.25);
    EXPECT_EQ(st.failure_histogram.at("miss_lateral"), 2U);
    EXPECT_EQ(st.failure_histogram.at("crashed"), 1U);
}
