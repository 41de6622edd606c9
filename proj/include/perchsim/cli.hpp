// Command-line front end: perchsim fly|campaign|calibrate --scenario <path>
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perchsim {

enum class CliMode { Fly, Campaign, Calibrate };

struct CliConfig {
    CliMode mode = CliMode::Fly;
    std::filesystem::path scenario_path;
    std::size_t runs = 500;
    std::optional<std::uint64_t> seed;
    std::filesystem::path output_dir;
    std::optional<double> dt;
    unsigned workers = 0;
    int verbosity = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitScenarioError = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses argv (argv[0] is the program name). Throws UsageError with the usage
/// text on unknown flags, missing --scenario, or invalid values. The output
/// directory defaults to $PERCHSIM_OUT, then the working directory.
[[nodiscard]] CliConfig parse_args(const std::vector<std::string>& argv);

/// Executes a parsed configuration and returns the process exit code.
int run_cli(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run_cli with exit-code mapping.
int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace perchsim
