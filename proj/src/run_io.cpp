#include "perchsim/run_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace perchsim {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

double to_double(std::string_view field) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw IoError("malformed number '" + std::string(field) + "' in run log");
    }
    return value;
}

ordered_json band_json(const Band& b) { return ordered_json::array({round_sig6(b.min), round_sig6(b.max)}); }

}  // namespace

double round_sig6(double value) {
    if (value == 0.0 || !std::isfinite(value)) {
        return value;
    }
    return std::stod(fmt::format("{:.6g}", value));
}

std::string format_run_log(const RunLog& log) {
    std::string out = kRunLogHeader;
    out += '\n';
    for (const LogSample& r : log) {
        const SimState& s = r.state;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.time, s.position.x(),
                           s.position.y(), s.position.z(), s.velocity.x(), s.velocity.y(), s.velocity.z(), s.pitch,
                           s.yaw, s.flap_freq, s.flap_phase, s.leg_angle, r.elevator, r.rudder, to_string(r.phase),
                           r.detector_valid ? 1 : 0, r.vertical_offset, r.lateral_offset);
    }
    return out;
}

void write_run_log(const RunLog& log, const std::filesystem::path& path) { write_text(format_run_log(log), path); }

RunLog parse_run_log(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kRunLogHeader) {
        throw IoError("run log header does not match the expected columns");
    }
    RunLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 18) {
            throw IoError("run log row has " + std::to_string(f.size()) + " columns, expected 18");
        }
        LogSample r;
        SimState& s = r.state;
        s.time = to_double(f[0]);
        s.position = Vec3(to_double(f[1]), to_double(f[2]), to_double(f[3]));
        s.velocity = Vec3(to_double(f[4]), to_double(f[5]), to_double(f[6]));
        s.pitch = to_double(f[7]);
        s.yaw = to_double(f[8]);
        s.flap_freq = to_double(f[9]);
        s.flap_phase = to_double(f[10]);
        s.leg_angle = to_double(f[11]);
        r.elevator = to_double(f[12]);
        r.rudder = to_double(f[13]);
        r.phase = phase_from_string(f[14]);
        r.detector_valid = f[15] == "1";
        r.vertical_offset = to_double(f[16]);
        r.lateral_offset = to_double(f[17]);
        log.push_back(r);
    }
    return log;
}

RunLog read_run_log(const std::filesystem::path& path) { return parse_run_log(read_text(path)); }

std::string format_summary(const Scenario& scenario, const CampaignResult& result) {
    const CampaignStats& st = result.stats;
    ordered_json j;
    j["scenario_hash"] = scenario_hash(scenario);
    j["master_seed"] = scenario.master_seed;
    j["n_runs"] = st.n_runs;
    j["success_rate"] = round_sig6(st.success_rate);
    j["mean_abs_vertical_error_m"] = round_sig6(st.mean_abs_vertical_error);
    j["p90_lateral_error_m"] = round_sig6(st.p90_lateral_error);
    j["speed_band_mps"] = band_json(st.speed_band);
    j["altitude_capture_band_m"] = band_json(st.altitude_capture_band);
    ordered_json hist = ordered_json::object();
    for (const auto& [reason, count] : st.failure_histogram) {
        hist[reason] = count;
    }
    j["failure_histogram"] = hist;

    ordered_json runs = ordered_json::array();
    for (const RunOutcome& o : result.outcomes) {
        ordered_json r;
        r["run_index"] = o.run_index;
        r["terminal_phase"] = std::string(to_string(o.terminal_phase));
        r["crossed"] = o.crossed;
        r["vertical_error_m"] = o.vertical_error;
        r["lateral_error_m"] = o.lateral_error;
        r["vertical_miss_m"] = o.vertical_miss;
        r["contact_speed_mps"] = o.contact_speed;
        r["flight_time_s"] = o.flight_time;
        r["distance_at_altitude_capture_m"] =
            o.distance_at_altitude_capture ? ordered_json(*o.distance_at_altitude_capture) : ordered_json(nullptr);
        r["mocap_dropouts"] = o.mocap_dropouts;
        r["grasp"] = {{"captured", o.grasp.captured},
                      {"held", o.grasp.held},
                      {"impact_force_n", o.grasp.impact_force},
                      {"failure_reason", std::string(to_string(o.grasp.failure_reason))}};
        ordered_json transitions = ordered_json::object();
        for (std::size_t p = 0; p < kPhaseCount; ++p) {
            if (o.phase_entry_time[p]) {
                transitions[std::string(to_string(static_cast<Phase>(p)))] = *o.phase_entry_time[p];
            }
        }
        r["phase_entry_time_s"] = transitions;
        runs.push_back(std::move(r));
    }
    j["per_run"] = std::move(runs);
    return j.dump(2) + "\n";
}

void write_summary(const Scenario& scenario, const CampaignResult& result, const std::filesystem::path& path) {
    write_text(format_summary(scenario, result), path);
}

std::vector<RunOutcome> parse_summary_outcomes(const std::string& text) {
    std::vector<RunOutcome> outcomes;
    try {
        const ordered_json j = ordered_json::parse(text);
        for (const auto& r : j.at("per_run")) {
            RunOutcome o;
            o.run_index = r.at("run_index").get<std::uint64_t>();
            o.terminal_phase = phase_from_string(r.at("terminal_phase").get<std::string>());
            o.crossed = r.at("crossed").get<bool>();
            o.vertical_error = r.at("vertical_error_m").get<double>();
            o.lateral_error = r.at("lateral_error_m").get<double>();
            o.vertical_miss = r.at("vertical_miss_m").get<double>();
            o.contact_speed = r.at("contact_speed_mps").get<double>();
            o.flight_time = r.at("flight_time_s").get<double>();
            if (const auto& d = r.at("distance_at_altitude_capture_m"); !d.is_null()) {
                o.distance_at_altitude_capture = d.get<double>();
            }
            o.mocap_dropouts = r.at("mocap_dropouts").get<std::uint64_t>();
            const auto& g = r.at("grasp");
            o.grasp.captured = g.at("captured").get<bool>();
            o.grasp.held = g.at("held").get<bool>();
            o.grasp.impact_force = g.at("impact_force_n").get<double>();
            o.grasp.failure_reason = failure_reason_from_string(g.at("failure_reason").get<std::string>());
            for (const auto& [name, t] : r.at("phase_entry_time_s").items()) {
                o.phase_entry_time[static_cast<std::size_t>(phase_from_string(name))] = t.get<double>();
            }
            outcomes.push_back(o);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed summary: ") + e.what());
    }
    return outcomes;
}

}  // namespace perchsim
