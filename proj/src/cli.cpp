#include "perchsim/cli.hpp"

#include "perchsim/calibration.hpp"
#include "perchsim/campaign.hpp"
#include "perchsim/run_io.hpp"
#include "perchsim/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <map>
#include <numbers>
#include <ostream>

namespace perchsim {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

const std::map<std::string, CliMode> kModes{
    {"fly", CliMode::Fly}, {"campaign", CliMode::Campaign}, {"calibrate", CliMode::Calibrate}};

Scenario load_with_overrides(const CliConfig& config) {
    Scenario s = load_scenario(config.scenario_path);
    if (config.seed) s.master_seed = *config.seed;
    if (config.dt) s.dt = *config.dt;
    s.validate();
    return s;
}

void print_outcome(std::ostream& out, const RunOutcome& o) {
    fmt::print(out, "terminal phase:        {}\n", to_string(o.terminal_phase));
    fmt::print(out, "failure reason:        {}\n", to_string(o.grasp.failure_reason));
    fmt::print(out, "vertical error:        {:+.3f} m (claw miss {:+.3f} m)\n", o.vertical_error, o.vertical_miss);
    fmt::print(out, "lateral error:         {:+.3f} m\n", o.lateral_error);
    fmt::print(out, "contact speed:         {:.3f} m/s\n", o.contact_speed);
    fmt::print(out, "impact force:          {:.1f} N\n", o.grasp.impact_force);
    fmt::print(out, "flight time:           {:.3f} s\n", o.flight_time);
    if (o.distance_at_altitude_capture) {
        fmt::print(out, "altitude capture at:   {:.2f} m downrange\n", *o.distance_at_altitude_capture);
    } else {
        fmt::print(out, "altitude capture at:   never\n");
    }
}

void print_stats(std::ostream& out, const CampaignStats& st) {
    fmt::print(out, "runs:                      {}\n", st.n_runs);
    fmt::print(out, "success rate:              {:.4f}\n", st.success_rate);
    fmt::print(out, "mean |vertical error|:     {:.4f} m\n", st.mean_abs_vertical_error);
    fmt::print(out, "p90 |lateral error|:       {:.4f} m\n", st.p90_lateral_error);
    fmt::print(out, "contact speed band:        [{:.3f}, {:.3f}] m/s\n", st.speed_band.min, st.speed_band.max);
    fmt::print(out, "altitude capture band:     [{:.2f}, {:.2f}] m\n", st.altitude_capture_band.min,
               st.altitude_capture_band.max);
    for (const auto& [reason, count] : st.failure_histogram) {
        fmt::print(out, "  failure {:<22} {}\n", reason, count);
    }
}

int run_fly(const CliConfig& config, const Scenario& s, std::ostream& out) {
    const FlightResult flight = run_flight(s, 0, RunOptions{true, false});
    const auto csv = config.output_dir / "fly_run.csv";
    const auto json = config.output_dir / "fly_summary.json";
    write_run_log(flight.log, csv);
    CampaignResult single{compute_stats({flight.outcome}), {flight.outcome}};
    write_summary(s, single, json);
    print_outcome(out, flight.outcome);
    if (config.verbosity > 0) {
        const FlightMetrics m = analyze_flight(flight.log, s);
        fmt::print(out, "steady airspeed:       {:.3f} m/s\n", m.steady_airspeed);
        fmt::print(out, "steady pitch:          {:.2f} deg\n", m.steady_pitch * kRadToDeg);
        fmt::print(out, "max pitch:             {:.2f} deg\n", m.max_pitch * kRadToDeg);
    }
    fmt::print(out, "wrote {} and {}\n", csv.string(), json.string());
    return kExitOk;
}

int run_campaign_mode(const CliConfig& config, const Scenario& s, std::ostream& out) {
    const CampaignResult result = run_campaign(s, config.runs, config.workers);
    const auto json = config.output_dir / "campaign_summary.json";
    write_summary(s, result, json);
    print_stats(out, result.stats);
    if (config.verbosity > 0) {
        for (const RunOutcome& o : result.outcomes) {
            fmt::print(out, "run {:4d} {:<10} {:<22} dz {:+.3f} dy {:+.3f} v {:.3f}\n", o.run_index,
                       to_string(o.terminal_phase), to_string(o.grasp.failure_reason), o.vertical_error,
                       o.lateral_error, o.contact_speed);
        }
    }
    fmt::print(out, "wrote {}\n", json.string());
    return kExitOk;
}

int run_calibrate(const CliConfig& config, const Scenario& s, std::ostream& out) {
    const CalibrationReport report = calibrate(s);
    const auto path = config.output_dir / "calibrated.scn";
    save_scenario(report.scenario, path);
    const ControlGains& g = report.best.gains;
    fmt::print(out, "trim: wing_area {:.6f} m^2, thrust {:.4f} N, flap_thrust_coeff {:.6f} N s^2\n",
               report.trim.wing_area, report.trim.thrust, report.trim.flap_thrust_coeff);
    fmt::print(out, "gain search: {} candidates, {} feasible\n", report.candidates_evaluated,
               report.candidates_feasible);
    fmt::print(out, "best: pitch kp {} ki {} kd {}, alt kp {} ki {} rate kd {}\n", g.pitch_kp, g.pitch_ki,
               g.pitch_rate_kd, g.alt_kp, g.alt_ki, g.alt_rate_kd);
    fmt::print(out, "      settling {:.3f} s, steady airspeed {:.3f} m/s, altitude capture {:.2f} m\n",
               report.best.metrics.pitch_settling_time.value_or(-1.0), report.best.metrics.steady_airspeed,
               report.best.metrics.altitude_capture_distance.value_or(-1.0));
    fmt::print(out, "wrote {}\n", path.string());
    return kExitOk;
}

}  // namespace

CliConfig parse_args(const std::vector<std::string>& argv) {
    CLI::App app{"Flapping-wing perching simulator", argv.empty() ? "perchsim" : argv.front()};
    CliConfig config;
    std::string mode;
    std::string scenario;
    std::string out_dir;
    long long runs = 500;
    std::uint64_t seed = 0;
    double dt = 0.0;

    app.add_option("mode", mode, "fly | campaign | calibrate")->required();
    app.add_option("--scenario", scenario, "Scenario file")->required();
    auto* runs_opt = app.add_option("--runs", runs, "Number of campaign runs");
    auto* seed_opt = app.add_option("--seed", seed, "Override the master seed");
    app.add_option("--out", out_dir, "Output directory (default $PERCHSIM_OUT or .)");
    auto* dt_opt = app.add_option("--dt", dt, "Override the integration step [s]");
    app.add_option("--workers", config.workers, "Campaign worker threads (0 = all cores)");
    app.add_flag("-v", config.verbosity, "Verbose output");

    std::vector<const char*> args;
    for (const std::string& a : argv) args.push_back(a.c_str());
    if (args.empty()) args.push_back("perchsim");
    try {
        app.parse(static_cast<int>(args.size()), args.data());
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + app.help());
    }

    const auto it = kModes.find(mode);
    if (it == kModes.end()) {
        throw UsageError("unknown mode '" + mode + "'\n" + app.help());
    }
    config.mode = it->second;
    config.scenario_path = scenario;
    if (runs_opt->count() > 0 && runs < 1) {
        throw UsageError("--runs must be >= 1");
    }
    config.runs = static_cast<std::size_t>(runs);
    if (seed_opt->count() > 0) config.seed = seed;
    if (dt_opt->count() > 0) {
        if (!(dt > 0.0)) throw UsageError("--dt must be > 0");
        config.dt = dt;
    }
    if (!out_dir.empty()) {
        config.output_dir = out_dir;
    } else if (const char* env = std::getenv("PERCHSIM_OUT"); env != nullptr && *env != '\0') {
        config.output_dir = env;
    } else {
        config.output_dir = ".";
    }
    return config;
}

int run_cli(const CliConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (!std::filesystem::is_regular_file(config.scenario_path)) {
            fmt::print(err, "error: scenario file {} not found\n", config.scenario_path.string());
            return kExitScenarioError;
        }
        std::filesystem::create_directories(config.output_dir);
        const Scenario s = load_with_overrides(config);
        switch (config.mode) {
            case CliMode::Fly:
                return run_fly(config, s, out);
            case CliMode::Campaign:
                return run_campaign_mode(config, s, out);
            case CliMode::Calibrate:
                return run_calibrate(config, s, out);
        }
    } catch (const ScenarioError& e) {
        fmt::print(err, "scenario error: {}\n", e.what());
        return kExitScenarioError;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitScenarioError;
    }
    return kExitScenarioError;
}

int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CliConfig config;
    try {
        config = parse_args(argv);
    } catch (const UsageError& e) {
        fmt::print(err, "{}\n", e.what());
        return kExitUsage;
    }
    return run_cli(config, out, err);
}

}  // namespace perchsim
