#include "perchsim/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

namespace perchsim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool controlled(Phase p) { return p == Phase::ControlledFlight || p == Phase::BranchApproach; }

}  // namespace

TrimSolution solve_trim(const VehicleParams& vehicle, const Environment& env, double pitch, double airspeed) {
    if (!(airspeed > 0.0) || !(pitch > 0.0 && pitch < std::numbers::pi / 2.0)) {
        throw ConfigError("trim needs a positive airspeed and a pitch in (0, 90) degrees");
    }
    const AeroCoefficients c = aero_coefficients(pitch, vehicle.parasitic_drag_coeff);
    const double drag_coeff = vehicle.drag_enabled ? c.drag : 0.0;
    const double q = 0.5 * env.air_density * airspeed * airspeed;

    TrimSolution t;
    t.wing_area = vehicle.mass * env.gravity / (q * (c.lift + drag_coeff * std::tan(pitch)));
    t.thrust = q * t.wing_area * drag_coeff / std::cos(pitch);
    if (vehicle.cruise_flap_freq > 0.0) {
        t.flap_thrust_coeff = t.thrust / (vehicle.cruise_flap_freq * vehicle.cruise_flap_freq);
    }
    return t;
}

FlightMetrics analyze_flight(const RunLog& log, const Scenario& scenario, double pitch_tolerance) {
    FlightMetrics m;
    const double ref = scenario.pitch_ref;
    const double alt_ref = scenario.branch.center.z();

    double last_outside = -1.0;
    double first_controlled = -1.0;
    double end_controlled = 0.0;
    for (const LogSample& r : log) {
        if (!m.altitude_capture_distance && r.state.position.z() >= alt_ref) {
            m.altitude_capture_distance = r.state.position.x();
        }
        if (!controlled(r.phase)) continue;
        if (first_controlled < 0.0) first_controlled = r.state.time;
        end_controlled = r.state.time;
        m.max_pitch = std::max(m.max_pitch, r.state.pitch);
        if (std::abs(r.state.pitch - ref) > pitch_tolerance) {
            last_outside = r.state.time;
        }
    }
    if (first_controlled < 0.0) {
        return m;
    }
    if (last_outside < 0.0) {
        m.pitch_settling_time = 0.0;
    } else if (last_outside < end_controlled) {
        m.pitch_settling_time = last_outside + scenario.dt;
    }

    double speed_sum = 0.0;
    double pitch_sum = 0.0;
    std::size_t n = 0;
    for (const LogSample& r : log) {
        if (!controlled(r.phase) || r.state.time < end_controlled - 1.0) continue;
        speed_sum += (r.state.velocity - scenario.env.wind).norm();
        pitch_sum += r.state.pitch;
        ++n;
    }
    if (n > 0) {
        m.steady_airspeed = speed_sum / static_cast<double>(n);
        m.steady_pitch = pitch_sum / static_cast<double>(n);
    }
    return m;
}

CalibrationReport calibrate(const Scenario& base) {
    CalibrationReport report;
    Scenario s = base;
    s.dispersions.clear();

    report.trim = solve_trim(s.vehicle, s.env, s.pitch_ref, s.calibration.target_airspeed);
    s.vehicle.wing_area = report.trim.wing_area;
    s.vehicle.flap_thrust_coeff = report.trim.flap_thrust_coeff;

    const double pitch_kp[] = {1.0, 2.0, 4.0, 8.0};
    const double pitch_ki[] = {0.5, 1.0, 2.0};
    const double pitch_kd[] = {0.1, 0.2, 0.4};
    const double alt_kp[] = {0.25, 0.5, 1.0, 2.0};
    const double alt_ki[] = {0.05, 0.1, 0.2};
    const double alt_rate_kd[] = {0.0, 0.5, 1.0, 2.0, 4.0};

    std::vector<ControlGains> grid;
    for (double kp : pitch_kp) {
        for (double ki : pitch_ki) {
            for (double kd : pitch_kd) {
                for (double akp : alt_kp) {
                    for (double aki : alt_ki) {
                        for (double ard : alt_rate_kd) {
                            ControlGains g = s.gains;
                            g.pitch_kp = kp;
                            g.pitch_ki = ki;
                            g.pitch_rate_kd = kd;
                            g.alt_kp = akp;
                            g.alt_ki = aki;
                            g.alt_rate_kd = ard;
                            grid.push_back(g);
                        }
                    }
                }
            }
        }
    }

    std::vector<std::optional<GainCandidate>> evaluated(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            Scenario trial = s;
            trial.gains = grid[i];
            const FlightResult flight = run_flight(trial, 0, RunOptions{true, false});
            const FlightMetrics m = analyze_flight(flight.log, trial);
            const bool feasible = flight.outcome.perched() && m.pitch_settling_time && m.max_pitch < 40.0 * kDeg &&
                                  m.altitude_capture_distance && *m.altitude_capture_distance >= 8.0 &&
                                  *m.altitude_capture_distance <= 12.0 && m.steady_airspeed >= 2.5 &&
                                  m.steady_airspeed <= 3.0;
            if (!feasible) continue;
            // Settling time first; vertical error at the branch breaks near-ties.
            const double score = *m.pitch_settling_time + std::abs(flight.outcome.vertical_error);
            evaluated[i] = GainCandidate{trial.gains, m, flight.outcome.terminal_phase, score};
        }
    };
    const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    report.candidates_evaluated = grid.size();
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& c : evaluated) {
        if (!c) continue;
        ++report.candidates_feasible;
        if (c->score < best_score) {
            best_score = c->score;
            report.best = *c;
        }
    }
    if (report.candidates_feasible == 0) {
        throw ConfigError("calibration found no feasible gain set");
    }
    s.gains = report.best.gains;
    s.dispersions = base.dispersions;
    report.scenario = s;
    return report;
}

}  // namespace perchsim
