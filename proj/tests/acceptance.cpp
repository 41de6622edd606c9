// Acceptance gate: runs every criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is non-zero if any criterion fails.

#include "perchsim/calibration.hpp"
#include "perchsim/campaign.hpp"
#include "perchsim/grasp_model.hpp"
#include "perchsim/run_io.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <string>
#include <vector>

using namespace perchsim;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int rank(Phase p) {
    switch (p) {
        case Phase::OnLauncher: return 0;
        case Phase::ControlledFlight: return 1;
        case Phase::BranchApproach: return 2;
        case Phase::FlapCutoff: return 3;
        default: return 4;
    }
}

Verdict speed_pitch_envelope(const Scenario& s) {
    const auto start = std::chrono::steady_clock::now();
    const FlightResult f = run_flight(s, 0, RunOptions{true, false});
    const FlightMetrics m = analyze_flight(f.log, s, 2.0 * kDeg);
    const double elapsed = seconds_since(start);
    const bool settled = m.pitch_settling_time.has_value() && std::abs(m.steady_pitch - s.pitch_ref) <= 2.0 * kDeg;
    const bool speed = m.steady_airspeed >= 2.5 && m.steady_airspeed <= 3.0;
    return {settled && speed && elapsed < 5.0,
            fmt::format("settling {:.3f} s, steady pitch {:.2f} deg, max {:.2f} deg, airspeed {:.3f} m/s, {:.2f} s",
                        m.pitch_settling_time.value_or(-1.0), m.steady_pitch / kDeg, m.max_pitch / kDeg,
                        m.steady_airspeed, elapsed)};
}

Verdict altitude_capture(const Scenario& s) {
    const RunOutcome o = run_flight(s, 0, RunOptions{false, false}).outcome;
    if (!o.distance_at_altitude_capture) return {false, "altitude never reached"};
    const double d = *o.distance_at_altitude_capture;
    return {d >= 8.0 && d <= 12.0, fmt::format("2.0 m first reached {:.3f} m downrange", d)};
}

Verdict accuracy(const CampaignResult& c, double elapsed) {
    const CampaignStats& st = c.stats;
    return {st.mean_abs_vertical_error <= 0.16 && st.p90_lateral_error <= 0.60 && elapsed < 60.0,
            fmt::format("mean |vertical| {:.4f} m, p90 |lateral| {:.4f} m over {} runs, {:.2f} s",
                        st.mean_abs_vertical_error, st.p90_lateral_error, st.n_runs, elapsed)};
}

Verdict success_rate(const CampaignResult& c) {
    double worst = 0.0;
    bool bounded = true;
    for (const RunOutcome& o : c.outcomes) {
        if (!o.perched()) continue;
        worst = std::max(worst, o.grasp.impact_force);
        bounded = bounded && o.grasp.impact_force < 150.0;
    }
    return {c.stats.success_rate >= 0.60 && bounded,
            fmt::format("success {:.3f}, largest perched impact {:.1f} N", c.stats.success_rate, worst)};
}

Verdict trigger_correctness(const Scenario& s, std::size_t n_runs) {
    std::size_t checked = 0;
    for (std::size_t i = 0; i < n_runs; ++i) {
        const Scenario realized = sample_dispersions(s, i);
        const FlightResult f = run_flight(s, i, RunOptions{true, true});
        auto distance = [&](std::size_t k) {
            return branch_plane_distance(f.log[k].state, realized.vehicle, realized.branch);
        };
        for (std::size_t k = 0; k < f.log.size(); ++k) {
            const Phase prev = k == 0 ? Phase::OnLauncher : f.log[k - 1].phase;
            const Phase cur = f.log[k].phase;
            if (cur == prev) continue;
            if (cur != Phase::Crashed && rank(cur) != rank(prev) + 1) {
                return {false, fmt::format("run {}: illegal {} -> {}", i, to_string(prev), to_string(cur))};
            }
            const double trigger = cur == Phase::BranchApproach ? realized.triggers.approach_distance
                                   : cur == Phase::FlapCutoff   ? realized.triggers.cutoff_distance
                                                                : 0.0;
            if (trigger > 0.0) {
                if (!(distance(k) <= trigger) || k == 0 || !(distance(k - 1) > trigger)) {
                    return {false, fmt::format("run {}: {} entered at distance {:.4f} m", i, to_string(cur),
                                               distance(k))};
                }
                ++checked;
            }
        }
        if (!is_terminal(f.log.back().phase)) {
            return {false, fmt::format("run {} has no terminal phase", i)};
        }
    }
    return {true, fmt::format("{} trigger events in {} logged runs", checked, n_runs)};
}

Verdict oracle_equivalences(const Scenario& s) {
    const VehicleParams& p = s.vehicle;
    const double g = s.env.gravity;
    const double hold_err = std::abs(hold_threshold(p, g) - p.claw_torque * p.pad_friction_margin / (p.mass * g));

    double impact_err = 0.0;
    for (double v : {0.0, 1.0, 2.4, 2.75, 3.5}) {
        ContactEvent ev;
        ev.relative_speed = v;
        const double closed = p.mass * v * v / (2.0 * s.grasp.stop_distance);
        impact_err = std::max(impact_err, std::abs(impact_force(ev, p, s.grasp.stop_distance) - closed));
    }

    VehicleParams ballistic = p;
    ballistic.wing_area = 0.0;
    SimState st;
    st.position = Vec3(1.0, 2.0, 50.0);
    st.velocity = Vec3(1.5, -0.5, 3.0);
    const Vec3 p0 = st.position;
    const Vec3 v0 = st.velocity;
    const double dt = 0.005;
    const int steps = 400;
    for (int i = 0; i < steps; ++i) st = step_rk4(st, {}, ballistic, s.env, dt);
    const double t = steps * dt;
    const Vec3 analytic = p0 + v0 * t + 0.5 * t * t * Vec3(0.0, 0.0, -g);
    const double rk4_err = (st.position - analytic).norm();

    return {hold_err <= 1e-12 && impact_err <= 1e-12 && rk4_err <= 1e-9,
            fmt::format("hold {:.1e}, impact {:.1e}, ballistic {:.1e}", hold_err, impact_err, rk4_err)};
}

Verdict numerical_soundness(const Scenario& s) {
    VehicleParams p = s.vehicle;
    p.drag_enabled = false;
    SimState st;
    st.position = Vec3(0.0, 0.0, 10.0);
    st.velocity = Vec3(3.0, 0.0, 0.0);
    st.pitch = 25.0 * kDeg;
    const double e0 = specific_energy(st, s.env);
    const double horizon = 4.0;
    const int steps = static_cast<int>(std::lround(horizon / s.dt));
    for (int i = 0; i < steps; ++i) st = step_rk4(st, {}, p, s.env, s.dt);
    const double drift = std::abs(specific_energy(st, s.env) - e0) / std::abs(e0) / horizon;

    Scenario half = s;
    half.dt = s.dt / 2.0;
    const FlightResult a = run_flight(s, 0, RunOptions{true, false});
    const FlightResult b = run_flight(half, 0, RunOptions{true, false});
    const double diff = (a.log.back().state.position - b.log.back().state.position).norm();
    return {drift <= 1e-6 && diff < 0.01,
            fmt::format("energy drift {:.2e} per s, dt vs dt/2 final position {:.4f} m", drift, diff)};
}

Verdict determinism(const Scenario& s, const CampaignResult& reference, std::size_t n_runs) {
    const std::string expected = format_summary(s, reference);
    for (unsigned workers : {1U, 2U, 5U}) {
        if (format_summary(s, run_campaign(s, n_runs, workers)) != expected) {
            return {false, fmt::format("summary differs with {} workers", workers)};
        }
    }
    return {true, fmt::format("{}-run summary identical with 1, 2, 5 and default workers", n_runs)};
}

Verdict compensation(const Scenario& s) {
    Scenario off = s;
    off.leg_servo.enabled = false;
    const CampaignResult on_r = run_campaign(s, 100);
    const CampaignResult off_r = run_campaign(off, 100);
    auto mean_miss = [](const CampaignResult& c) {
        double sum = 0.0;
        for (const RunOutcome& o : c.outcomes) sum += std::abs(o.vertical_miss);
        return sum / static_cast<double>(c.outcomes.size());
    };
    const double m_on = mean_miss(on_r);
    const double m_off = mean_miss(off_r);
    return {on_r.stats.success_rate >= off_r.stats.success_rate && m_on < m_off,
            fmt::format("success {:.2f} vs {:.2f}, mean |miss| {:.4f} m vs {:.4f} m (leg on vs off)",
                        on_r.stats.success_rate, off_r.stats.success_rate, m_on, m_off)};
}

template <typename F>
Verdict guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

int main() {
    const Scenario s = load_scenario(PERCHSIM_NOMINAL_SCENARIO);
    constexpr std::size_t kCampaignRuns = 500;

    const auto start = std::chrono::steady_clock::now();
    const CampaignResult campaign = run_campaign(s, kCampaignRuns);
    const double campaign_seconds = seconds_since(start);

    const std::vector<std::pair<std::string, Verdict>> results{
        {"speed/pitch envelope", guarded([&] { return speed_pitch_envelope(s); })},
        {"altitude capture", guarded([&] { return altitude_capture(s); })},
        {"accuracy envelope", guarded([&] { return accuracy(campaign, campaign_seconds); })},
        {"success rate", guarded([&] { return success_rate(campaign); })},
        {"trigger correctness", guarded([&] { return trigger_correctness(s, kCampaignRuns); })},
        {"oracle equivalences", guarded([&] { return oracle_equivalences(s); })},
        {"numerical soundness", guarded([&] { return numerical_soundness(s); })},
        {"determinism", guarded([&] { return determinism(s, campaign, kCampaignRuns); })},
        {"compensation efficacy", guarded([&] { return compensation(s); })},
    };

    int failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [name, v] = results[i];
        std::printf("[%s] %zu %-22s %s\n", v.pass ? "PASS" : "FAIL", i + 1, name.c_str(), v.detail.c_str());
        failures += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failures, results.size());
    return failures == 0 ? 0 : 1;
}
