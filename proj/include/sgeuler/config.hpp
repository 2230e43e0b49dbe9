#pragma once

// Run configuration for the command-line driver: flag parsing, optional
// configuration files (key=value lines or a run.json written by a previous
// run), and validation that reports every violated constraint at once.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgeuler/geopotential.hpp"

namespace sgeuler {

/// Every violated constraint, one message each.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// --help was given; what() is the help text.
class HelpRequested : public std::runtime_error {
public:
    explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

struct CoriolisSpec {
    enum class Kind { Off, Constant, Profile, File };
    Kind kind = Kind::Off;
    double value = 0.0;  // f0 for Constant, delta for Profile
    std::string path;    // File only

    bool operator==(const CoriolisSpec&) const = default;
};

/// "off", "const:F0", "profile:DELTA" or "file:PATH". Throws
/// std::invalid_argument on anything else.
CoriolisSpec parse_coriolis(const std::string& text);
std::string to_string(const CoriolisSpec& c);

struct RunConfig {
    std::array<int, 3> grid{16, 16, 16};
    Vec3 extent{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};

    Preset::Kind preset = Preset::Kind::Identity;
    Vec3 tilt{0.0, 0.0, 0.0};
    Vec3 quad{1.0, 1.0, 1.0};
    double bump_delta = 0.005;
    int bump_k = 1;

    // Exactly one of dt/steps and one of tmax/auto_tau end up set.
    std::optional<double> dt;
    std::optional<int> steps;
    std::optional<double> tmax;
    bool auto_tau = false;

    double p = 4.0;
    double c_star = 1.0;
    double c_m = 1.0;
    CoriolisSpec coriolis;

    double tol = 1e-10;
    int maxiter = 0;

    std::string out = "out";
    bool emit_csv = true;
    bool emit_fields = false;
    int snap_every = 10;
    int log_every = 1;
    bool strict = false;

    bool operator==(const RunConfig&) const = default;

    Preset make_preset() const;
    GridSpec make_grid() const;
};

struct Schedule {
    double horizon = 0.0;
    double epsilon = 0.0;
    int steps = 0;
};

/// Time step and step count for a given existence horizon. With dt and a
/// horizon H the step count is round(H/dt) (at least 1) and the step is
/// H/N, so the run ends exactly at H.
Schedule resolve_schedule(const RunConfig& cfg, double tau_star);

struct ParsedCommand {
    RunConfig config;
    std::optional<std::string> sweep_file;
};

/// Parses flags (without the program name). A configuration file, given
/// either here or with --config FILE, is read first so that flags override
/// its values. Throws UsageError or HelpRequested.
ParsedCommand parse_command(const std::vector<std::string>& args,
                            const std::optional<std::string>& config_file = std::nullopt);

RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& config_file = std::nullopt);

/// The configuration as flag tokens that parse back to an equal RunConfig.
std::vector<std::string> to_args(const RunConfig& cfg);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

}  // namespace sgeuler
