#include "perchsim/scenario.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace perchsim {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string at_line(int line) { return fmt::format(" (line {})", line); }

double parse_double(const std::string& text, const std::string& key, int line) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ScenarioError(key, "expected a finite number, got '" + text + "'" + at_line(line));
    }
    return value;
}

void assign(double& field, const std::string& text, const std::string& key, int line) {
    field = parse_double(text, key, line);
}

void assign(bool& field, const std::string& text, const std::string& key, int line) {
    if (text == "1" || text == "true") {
        field = true;
    } else if (text == "0" || text == "false") {
        field = false;
    } else {
        throw ScenarioError(key, "expected true/false, got '" + text + "'" + at_line(line));
    }
}

void assign(std::uint64_t& field, const std::string& text, const std::string& key, int line) {
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, field);
    if (ec != std::errc() || ptr != end) {
        throw ScenarioError(key, "expected an unsigned integer, got '" + text + "'" + at_line(line));
    }
}

std::string format_value(double v) { return fmt::format("{}", v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(std::uint64_t v) { return fmt::format("{}", v); }

const char* provenance_note(Provenance p) {
    switch (p) {
        case Provenance::Reported:
            return "reported value";
        case Provenance::Calibrated:
            return "calibrated";
        case Provenance::Assumed:
            return "assumed";
    }
    return "";
}

Dispersion parse_dispersion(const std::string& text, const std::string& key, int line) {
    std::istringstream in(text);
    std::string kind;
    std::string width;
    std::string extra;
    in >> kind >> width;
    if (kind.empty() || width.empty() || (in >> extra)) {
        throw ScenarioError(key, "expected 'gaussian <sigma>' or 'uniform <half_width>'" + at_line(line));
    }
    Dispersion d;
    if (kind == "gaussian") {
        d.kind = DispersionKind::Gaussian;
    } else if (kind == "uniform") {
        d.kind = DispersionKind::Uniform;
    } else {
        throw ScenarioError(key, "unknown dispersion kind '" + kind + "'" + at_line(line));
    }
    d.width = parse_double(width, key, line);
    if (d.width < 0.0) {
        throw ScenarioError(key, "dispersion width must be >= 0" + at_line(line));
    }
    return d;
}

// Steps per period of a rate, or throws if the rate does not divide the step.
void require_commensurate(double rate, double dt, const std::string& key) {
    const double steps = 1.0 / (rate * dt);
    if (std::abs(steps - std::round(steps)) > 1e-6 || std::round(steps) < 1.0) {
        throw ScenarioError(key, fmt::format("period must be a whole number of simulation steps (dt = {})", dt));
    }
}

}  // namespace

void Scenario::validate() const {
    try {
        vehicle.validate();
        env.validate();
        branch.validate();
        launch.validate();
        gains.validate();
        triggers.validate();
        mocap.validate();
        detector.validate();
        grasp.validate();
    } catch (const ScenarioError&) {
        throw;
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        const auto space = msg.find(' ');
        throw ScenarioError(msg.substr(0, space), msg.substr(space + 1));
    }
    if (!(dt > 0.0 && dt <= kMaxStep)) {
        throw ScenarioError("simulation.dt_s", "must be in (0, 0.005]");
    }
    if (!(pitch_ref < 40.0 * std::numbers::pi / 180.0)) {
        throw ScenarioError("setpoints.pitch_ref_rad", "must stay below 40 degrees");
    }
    if (!(leg_servo.update_rate > 0.0)) {
        throw ScenarioError("leg_servo.update_rate_hz", "must be > 0");
    }
    if (!(calibration.target_airspeed > 0.0)) {
        throw ScenarioError("calibration.target_airspeed_mps", "must be > 0");
    }
    require_commensurate(gains.rate, dt, "gains.rate_hz");
    require_commensurate(leg_servo.update_rate, dt, "leg_servo.update_rate_hz");
    require_commensurate(mocap.rate, dt, "mocap.rate_hz");

    Scenario probe = *this;
    for (const auto& [key, d] : dispersions) {
        if (find_numeric_field(probe, key) == nullptr) {
            throw ScenarioError("dispersion." + key, "does not name a numeric scenario key");
        }
        if (!(d.width >= 0.0)) {
            throw ScenarioError("dispersion." + key, "width must be >= 0");
        }
    }
}

double* find_numeric_field(Scenario& s, std::string_view dotted_key) {
    double* found = nullptr;
    visit_fields(s, [&](std::string_view section, std::string_view key, auto& value, Provenance) {
        if constexpr (std::is_same_v<std::remove_reference_t<decltype(value)>, double>) {
            if (dotted_key.size() == section.size() + 1 + key.size() && dotted_key.starts_with(section) &&
                dotted_key[section.size()] == '.' && dotted_key.ends_with(key)) {
                found = &value;
            }
        }
    });
    return found;
}

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    s.dispersions.clear();

    std::set<std::string> known_sections{"dispersion"};
    visit_fields(s, [&](std::string_view section, std::string_view, auto&, Provenance) {
        known_sections.emplace(section);
    });

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string content = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']') {
                throw ScenarioError(content, "malformed section header" + at_line(line));
            }
            section = trim(std::string_view(content).substr(1, content.size() - 2));
            if (!known_sections.contains(section)) {
                throw ScenarioError(section, "unknown section" + at_line(line));
            }
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ScenarioError(content, "expected 'key = value'" + at_line(line));
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (section.empty()) {
            throw ScenarioError(key, "key outside of any section" + at_line(line));
        }
        const std::string dotted = section + "." + key;
        if (!seen.insert(dotted).second) {
            throw ScenarioError(dotted, "duplicate key" + at_line(line));
        }

        if (section == "dispersion") {
            if (find_numeric_field(s, key) == nullptr) {
                throw ScenarioError(dotted, "does not name a numeric scenario key" + at_line(line));
            }
            s.dispersions[key] = parse_dispersion(value, dotted, line);
            continue;
        }

        bool matched = false;
        visit_fields(s, [&](std::string_view sec, std::string_view k, auto& field, Provenance) {
            if (!matched && sec == section && k == key) {
                assign(field, value, dotted, line);
                matched = true;
            }
        });
        if (!matched) {
            throw ScenarioError(dotted, "unknown key" + at_line(line));
        }
    }

    visit_fields(s, [&](std::string_view sec, std::string_view k, auto&, Provenance) {
        const std::string dotted = std::string(sec) + "." + std::string(k);
        if (!seen.contains(dotted)) {
            throw ScenarioError(dotted, "missing key");
        }
    });

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read scenario file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string write_scenario(const Scenario& s) {
    std::string out;
    std::string current;
    visit_fields(s, [&](std::string_view section, std::string_view key, const auto& value, Provenance p) {
        if (section != current) {
            if (!current.empty()) out += '\n';
            out += fmt::format("[{}]\n", section);
            current = section;
        }
        out += fmt::format("{} = {}  # {}\n", key, format_value(value), provenance_note(p));
    });
    out += "\n[dispersion]\n";
    for (const auto& [key, d] : s.dispersions) {
        out += fmt::format("{} = {} {}\n", key, d.kind == DispersionKind::Gaussian ? "gaussian" : "uniform",
                           format_value(d.width));
    }
    return out;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write scenario file " + path.string());
    }
    out << "# perchsim scenario. Units are SI and carried in key names.\n";
    out << write_scenario(s);
    if (!out) {
        throw ConfigError("failed writing scenario file " + path.string());
    }
}

std::string scenario_hash(const Scenario& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : write_scenario(s)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

FlightPlan flight_plan(const Scenario& s) {
    const SimState exit = launch_release(s.launch, s.vehicle);
    const Vec3 to_branch = s.branch.center - exit.position;
    return {s.pitch_ref, s.branch.center.z(), std::atan2(to_branch.y(), to_branch.x())};
}

}  // namespace perchsim
