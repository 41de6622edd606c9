#include "perchsim/campaign.hpp"

#include "perchsim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace perchsim {

namespace {

std::uint64_t steps_per_period(double rate, double dt) {
    return static_cast<std::uint64_t>(std::llround(1.0 / (rate * dt)));
}

std::size_t phase_slot(Phase phase) { return static_cast<std::size_t>(phase); }

struct Crossing {
    ContactEvent event;
    Vec3 body_position;
};

// Linear interpolation of the claw-plane crossing between two consecutive samples.
Crossing interpolate_crossing(const SimState& before, double d_before, const SimState& after, double d_after,
                              const VehicleParams& params, const BranchSpec& branch) {
    const double w = d_before / (d_before - d_after);
    const Vec3 tip = claw_tip(before, params) + w * (claw_tip(after, params) - claw_tip(before, params));
    const Vec3 velocity = before.velocity + w * (after.velocity - before.velocity);

    Crossing c;
    c.event.time = before.time + w * (after.time - before.time);
    c.event.claw_tip_position = tip;
    c.event.relative_speed = velocity.norm();
    c.event.vertical_miss = tip.z() - branch.center.z();
    c.event.lateral_miss = (tip - branch.center).dot(branch.axis);
    c.body_position = before.position + w * (after.position - before.position);
    return c;
}

}  // namespace

Scenario sample_dispersions(const Scenario& nominal, std::uint64_t run_index) {
    Scenario realized = nominal;
    std::mt19937_64 rng = make_stream(nominal.master_seed, run_index, StreamTag::Dispersion);
    for (const auto& [key, d] : nominal.dispersions) {
        double* field = find_numeric_field(realized, key);
        if (field == nullptr) {
            throw ScenarioError("dispersion." + key, "does not name a numeric scenario key");
        }
        if (d.kind == DispersionKind::Gaussian) {
            std::normal_distribution<double> dist(0.0, 1.0);
            *field += d.width * dist(rng);
        } else {
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            *field += d.width * dist(rng);
        }
    }
    realized.validate();
    return realized;
}

FlightResult run_flight(const Scenario& scenario, std::uint64_t run_index, const RunOptions& options) {
    const Scenario cfg = options.apply_dispersions ? sample_dispersions(scenario, run_index) : scenario;
    const VehicleParams& vehicle = cfg.vehicle;
    const BranchSpec& branch = cfg.branch;
    const FlightPlan plan = flight_plan(scenario);

    const std::uint64_t ctrl_steps = steps_per_period(cfg.gains.rate, cfg.dt);
    const std::uint64_t leg_steps = steps_per_period(cfg.leg_servo.update_rate, cfg.dt);
    const std::uint64_t mocap_steps = steps_per_period(cfg.mocap.rate, cfg.dt);
    const double ctrl_dt = 1.0 / cfg.gains.rate;
    const double leg_dt = 1.0 / cfg.leg_servo.update_rate;
    const LegServoModel servo = LegServoModel::from_vehicle(vehicle, cfg.leg_servo.update_rate);

    std::mt19937_64 mocap_rng = make_stream(cfg.master_seed, run_index, StreamTag::Mocap);
    PoseHistory history(cfg.mocap.latency + 0.05);

    FlightResult result;
    RunOutcome& out = result.outcome;
    out.run_index = run_index;

    SimState state = launch_release(cfg.launch, vehicle);
    ControlState cs;
    cs.last_command.flap_freq_cmd = vehicle.cruise_flap_freq;
    ControlCommand cmd = cs.last_command;
    SensorFrame frame;

    Phase phase = Phase::OnLauncher;
    out.phase_entry_time[phase_slot(phase)] = state.time;
    SimState prev_state = state;
    double prev_distance = branch_plane_distance(state, vehicle, branch);
    std::optional<Crossing> crossing;
    double terminal_time = state.time;

    for (std::uint64_t k = 0;; ++k) {
        history.push(state);

        // sensors
        if (k % mocap_steps == 0) {
            frame = mocap_sample(state, history, cfg.mocap, mocap_rng);
        }
        LineDetection detection;
        if (detector_enabled(phase)) {
            detection = line_detector(state, branch, vehicle, cfg.detector);
        }

        // controller
        if (k % ctrl_steps == 0) {
            const ControllerOutput ctrl =
                controller_update(frame, setpoints_for_phase(phase, plan), cs, cfg.gains, vehicle, ctrl_dt);
            cmd.elevator = ctrl.command.elevator;
            cmd.rudder = ctrl.command.rudder;
            cmd.flap_freq_cmd = ctrl.command.flap_freq_cmd;
            cs = ctrl.state;
        }

        // leg servo
        if (cfg.leg_servo.enabled && k % leg_steps == 0) {
            state.leg_angle = leg_servo_update(state.leg_angle, detection, servo, leg_dt);
            cmd.leg_angle_cmd = state.leg_angle;
        }

        // FSM
        const double distance = branch_plane_distance(state, vehicle, branch);
        std::optional<ContactVerdict> verdict;
        if (!crossing && k > 0 && prev_distance > 0.0 && distance <= 0.0) {
            crossing = interpolate_crossing(prev_state, prev_distance, state, distance, vehicle, branch);
            out.grasp = evaluate_grasp(crossing->event, vehicle, branch, cfg.grasp, cfg.env.gravity);
            if (phase == Phase::FlapCutoff) {
                verdict = ContactVerdict{out.grasp.contact(), out.grasp.perched()};
            }
        }
        const Phase next_phase = phase_transition(phase, state, vehicle, branch, cfg.triggers, verdict);
        if (next_phase != phase) {
            out.phase_entry_time[phase_slot(next_phase)] = state.time;
        }
        if (next_phase == Phase::FlapCutoff) {
            cmd.flap_freq_cmd = 0.0;
        }
        if (next_phase == Phase::Perched) {
            state.claw_closed = true;
            cmd.claw_trigger = true;
        }
        state.flap_freq = cmd.flap_freq_cmd;

        if (!out.distance_at_altitude_capture && state.position.z() >= plan.alt_ref) {
            out.distance_at_altitude_capture = state.position.x();
        }

        if (options.record_log) {
            result.log.push_back({state, cmd.elevator, cmd.rudder, next_phase, detection.valid,
                                  detection.vertical_offset, detection.lateral_offset});
        }

        phase = next_phase;
        terminal_time = state.time;
        if (is_terminal(phase)) {
            break;
        }

        // physics
        prev_state = state;
        prev_distance = distance;
        try {
            state = step_rk4(state, cmd, vehicle, cfg.env, cfg.dt);
            state.time = static_cast<double>(k + 1) * cfg.dt;
        } catch (const ModelFault&) {
            phase = Phase::Crashed;
            out.phase_entry_time[phase_slot(phase)] = state.time;
            break;
        }
    }

    out.terminal_phase = phase;
    out.mocap_dropouts = cs.dropouts;
    out.crossed = crossing.has_value();
    if (crossing) {
        out.vertical_error = crossing->body_position.z() - branch.center.z();
        out.lateral_error = (crossing->body_position - branch.center).dot(branch.axis);
        out.vertical_miss = crossing->event.vertical_miss;
        out.contact_speed = crossing->event.relative_speed;
    } else {
        const Vec3 tip = claw_tip(state, vehicle);
        out.vertical_error = state.position.z() - branch.center.z();
        out.lateral_error = (state.position - branch.center).dot(branch.axis);
        out.vertical_miss = tip.z() - branch.center.z();
        out.contact_speed = state.velocity.norm();
    }
    out.flight_time = (phase == Phase::Perched && crossing) ? crossing->event.time : terminal_time;
    return result;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

CampaignStats compute_stats(const std::vector<RunOutcome>& outcomes) {
    CampaignStats stats;
    stats.n_runs = outcomes.size();
    if (outcomes.empty()) {
        return stats;
    }

    std::size_t perched = 0;
    double abs_vertical_sum = 0.0;
    std::vector<double> lateral;
    std::vector<double> speeds;
    std::vector<double> captures;
    for (const RunOutcome& o : outcomes) {
        if (o.perched()) {
            ++perched;
        } else if (o.terminal_phase == Phase::Crashed) {
            ++stats.failure_histogram["crashed"];
        } else {
            ++stats.failure_histogram[std::string(to_string(o.grasp.failure_reason))];
        }
        if (o.crossed) {
            abs_vertical_sum += std::abs(o.vertical_error);
            lateral.push_back(std::abs(o.lateral_error));
            speeds.push_back(o.contact_speed);
        }
        if (o.distance_at_altitude_capture) {
            captures.push_back(*o.distance_at_altitude_capture);
        }
    }
    stats.success_rate = static_cast<double>(perched) / static_cast<double>(outcomes.size());
    if (!lateral.empty()) {
        stats.mean_abs_vertical_error = abs_vertical_sum / static_cast<double>(lateral.size());
        stats.p90_lateral_error = nearest_rank_quantile(lateral, 0.9);
        const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
        stats.speed_band = {*lo, *hi};
    }
    if (!captures.empty()) {
        const auto [lo, hi] = std::minmax_element(captures.begin(), captures.end());
        stats.altitude_capture_band = {*lo, *hi};
    }
    return stats;
}

CampaignResult run_campaign(const Scenario& scenario, std::size_t n_runs, unsigned workers) {
    if (n_runs == 0) {
        throw ConfigError("campaign needs at least one run");
    }
    scenario.validate();
    if (workers == 0) {
        workers = std::max(1U, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_runs));

    CampaignResult result;
    result.outcomes.resize(n_runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const RunOptions options{false, true};

    auto worker = [&] {
        for (std::size_t i = next++; i < n_runs && !failed; i = next++) {
            try {
                result.outcomes[i] = run_flight(scenario, i, options).outcome;
            } catch (...) {
                if (!failed.exchange(true)) {
                    failure = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    result.stats = compute_stats(result.outcomes);
    return result;
}

}  // namespace perchsim
