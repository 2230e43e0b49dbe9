#include "sgeuler/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace sgeuler {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& s) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

std::optional<int> to_int(const std::string& s) {
    const std::string t = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

std::optional<Vec3> to_vec3(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) return std::nullopt;
    Vec3 v{};
    for (std::size_t a = 0; a < 3; ++a) {
        const auto x = to_double(parts[a]);
        if (!x) return std::nullopt;
        v[a] = *x;
    }
    return v;
}

std::string vec3_string(const Vec3& v) {
    return format_double(v[0]) + "," + format_double(v[1]) + "," + format_double(v[2]);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError({"cannot read configuration file " + path});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string json_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::vector<std::string> items;
        for (const auto& x : v) items.push_back(json_scalar(x));
        return join(items, ",");
    }
    throw UsageError({"unsupported value in configuration file: " + v.dump()});
}

const std::vector<std::string> kFlagKeys = {"auto-tau", "strict"};

bool is_flag_key(const std::string& k) {
    return std::find(kFlagKeys.begin(), kFlagKeys.end(), k) != kFlagKeys.end();
}

bool truthy(const std::string& v) {
    const std::string t = trim(v);
    return t == "true" || t == "1" || t == "yes" || t == "on";
}

void push_entry(std::vector<std::string>& tokens, const std::string& key, const std::string& value) {
    if (is_flag_key(key)) {
        if (truthy(value)) tokens.push_back("--" + key);
        return;
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
}

// A configuration file as flag tokens. JSON files (a leading '{') may hold
// the entries at top level or under "config", as run.json does.
std::vector<std::string> file_tokens(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<std::string> tokens;
    if (trim(text).rfind('{', 0) == 0) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError({"malformed JSON in " + path + ": " + e.what()});
        }
        const nlohmann::json& entries = j.contains("config") ? j.at("config") : j;
        for (const auto& [key, value] : entries.items()) {
            if (value.is_null()) continue;
            if (value.is_boolean()) {
                push_entry(tokens, key, value.get<bool>() ? "true" : "false");
            } else {
                push_entry(tokens, key, json_scalar(value));
            }
        }
        return tokens;
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> problems;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            problems.push_back(path + ":" + std::to_string(lineno) + ": expected key=value");
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        push_entry(tokens, key, trim(t.substr(eq + 1)));
    }
    if (!problems.empty()) throw UsageError(problems);
    return tokens;
}

}  // namespace

UsageError::UsageError(std::vector<std::string> problems)
    : std::runtime_error(join(problems, "; ")), problems_(std::move(problems)) {}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

CoriolisSpec parse_coriolis(const std::string& text) {
    CoriolisSpec c;
    if (text == "off") return c;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected off, const:F0, profile:DELTA or file:PATH");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "file") {
        if (arg.empty()) throw std::invalid_argument("file: needs a path");
        c.kind = CoriolisSpec::Kind::File;
        c.path = arg;
        return c;
    }
    const auto v = to_double(arg);
    if (!v) throw std::invalid_argument("not a number: " + arg);
    if (kind == "const") {
        c.kind = CoriolisSpec::Kind::Constant;
    } else if (kind == "profile") {
        c.kind = CoriolisSpec::Kind::Profile;
    } else {
        throw std::invalid_argument("unknown rotation kind " + kind);
    }
    c.value = *v;
    return c;
}

std::string to_string(const CoriolisSpec& c) {
    switch (c.kind) {
        case CoriolisSpec::Kind::Off: return "off";
        case CoriolisSpec::Kind::Constant: return "const:" + format_double(c.value);
        case CoriolisSpec::Kind::Profile: return "profile:" + format_double(c.value);
        case CoriolisSpec::Kind::File: return "file:" + c.path;
    }
    return "off";
}

Preset RunConfig::make_preset() const {
    switch (preset) {
        case Preset::Kind::Identity: return Preset::identity();
        case Preset::Kind::Tilt: return Preset::tilted(tilt);
        case Preset::Kind::Quadratic: return Preset::quadratic(quad);
        case Preset::Kind::Bump: return Preset::bump(bump_delta, bump_k);
    }
    return Preset::identity();
}

GridSpec RunConfig::make_grid() const { return GridSpec(grid, origin, extent); }

Schedule resolve_schedule(const RunConfig& cfg, double tau_star) {
    Schedule s;
    s.horizon = cfg.auto_tau ? tau_star : cfg.tmax.value_or(1.0);
    if (!(s.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (cfg.dt) {
        s.steps = std::max(1, static_cast<int>(std::lround(s.horizon / *cfg.dt)));
    } else {
        s.steps = cfg.steps.value_or(100);
    }
    s.epsilon = s.horizon / s.steps;
    return s;
}

ParsedCommand parse_command(const std::vector<std::string>& args, const std::optional<std::string>& config_file) {
    CLI::App app{"Forward Euler semi-geostrophic simulator", "sgeuler"};
    app.allow_extras(false);

    std::string grid, extent, origin, preset, tilt, quad, bump_delta, bump_k, dt, steps, tmax, p, cstar, cm, coriolis,
        tol, maxiter, out, emit, snap_every, log_every, sweep, config_path;
    bool auto_tau = false;
    bool strict = false;

    auto opt = [&app](const std::string& name, std::string& target, const std::string& help) {
        app.add_option(name, target, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    opt("--grid", grid, "cells per axis: N or NX,NY,NZ (default 16)");
    opt("--extent", extent, "box lengths LX,LY,LZ (default 1,1,1)");
    opt("--origin", origin, "box corner (default 0,0,0)");
    opt("--preset", preset, "identity|tilt|quadratic|bump (default identity)");
    opt("--tilt", tilt, "tilt vector a1,a2,a3");
    opt("--quad", quad, "quadratic diagonal q1,q2,q3");
    opt("--bump-delta", bump_delta, "bump amplitude (default 0.005)");
    opt("--bump-k", bump_k, "bump wavenumber (default 1)");
    opt("--dt", dt, "time step");
    opt("--steps", steps, "number of steps (default 100)");
    opt("--tmax", tmax, "horizon (default 1)");
    app.add_flag("--auto-tau", auto_tau, "run to the computed existence time")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    opt("--p", p, "Lebesgue exponent (default 4)");
    opt("--cstar", cstar, "constant c* (default 1)");
    opt("--cm", cm, "Morrey constant C_M (default 1)");
    opt("--coriolis", coriolis, "off|const:F0|profile:DELTA|file:PATH (default off)");
    opt("--tol", tol, "relative solver tolerance (default 1e-10)");
    opt("--maxiter", maxiter, "solver iteration cap, 0 for ten times the cell count");
    opt("--out", out, "output directory (default out)");
    opt("--emit", emit, "csv, fields, csv,fields or none (default csv)");
    opt("--snap-every", snap_every, "field snapshot cadence in steps (default 10)");
    opt("--log-every", log_every, "series cadence in steps (default 1)");
    app.add_flag("--strict", strict, "exit non-zero when the run halts early")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    opt("--sweep", sweep, "file with one set of flags per line, run concurrently");
    opt("--config", config_path, "key=value or JSON configuration file");

    std::vector<std::string> tokens;
    std::optional<std::string> file = config_file;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") file = args[i + 1];
    }
    for (const auto& a : args) {
        if (a.rfind("--config=", 0) == 0) file = a.substr(9);
    }
    if (file) tokens = file_tokens(*file);
    tokens.insert(tokens.end(), args.begin(), args.end());

    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError({e.what()});
    }

    ParsedCommand cmd;
    RunConfig& c = cmd.config;
    std::vector<std::string> problems;

    if (!grid.empty()) {
        const auto parts = split(grid, ',');
        if (parts.size() == 1 && to_int(parts[0])) {
            const int n = *to_int(parts[0]);
            c.grid = {n, n, n};
        } else if (parts.size() == 3 && to_int(parts[0]) && to_int(parts[1]) && to_int(parts[2])) {
            c.grid = {*to_int(parts[0]), *to_int(parts[1]), *to_int(parts[2])};
        } else {
            problems.push_back("--grid expects N or NX,NY,NZ, got '" + grid + "'");
        }
    }
    for (int n : c.grid) {
        if (n < 5) {
            problems.push_back("--grid needs at least 5 cells per axis");
            break;
        }
    }
    auto vec_opt = [&problems](const std::string& text, const std::string& name, Vec3& target) {
        if (text.empty()) return;
        if (auto v = to_vec3(text)) {
            target = *v;
        } else {
            problems.push_back(name + " expects three comma-separated numbers, got '" + text + "'");
        }
    };
    auto num_opt = [&problems](const std::string& text, const std::string& name, auto& target) {
        if (text.empty()) return false;
        using T = std::remove_reference_t<decltype(target)>;
        if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::optional<int>>) {
            if (auto v = to_int(text)) {
                target = *v;
                return true;
            }
            problems.push_back(name + " expects an integer, got '" + text + "'");
        } else {
            if (auto v = to_double(text)) {
                target = *v;
                return true;
            }
            problems.push_back(name + " expects a number, got '" + text + "'");
        }
        return false;
    };

    vec_opt(extent, "--extent", c.extent);
    vec_opt(origin, "--origin", c.origin);
    for (double e : c.extent) {
        if (!(e > 0.0)) {
            problems.push_back("--extent must be positive on every axis");
            break;
        }
    }

    if (!preset.empty()) {
        if (preset == "identity") {
            c.preset = Preset::Kind::Identity;
        } else if (preset == "tilt") {
            c.preset = Preset::Kind::Tilt;
        } else if (preset == "quadratic") {
            c.preset = Preset::Kind::Quadratic;
        } else if (preset == "bump") {
            c.preset = Preset::Kind::Bump;
        } else {
            problems.push_back("--preset must be identity, tilt, quadratic or bump, got '" + preset + "'");
        }
    }
    vec_opt(tilt, "--tilt", c.tilt);
    vec_opt(quad, "--quad", c.quad);
    num_opt(bump_delta, "--bump-delta", c.bump_delta);
    num_opt(bump_k, "--bump-k", c.bump_k);
    if (c.preset == Preset::Kind::Quadratic && !(c.quad[0] > 0.0 && c.quad[1] > 0.0 && c.quad[2] > 0.0)) {
        problems.push_back("--quad entries must be positive for a convex quadratic preset");
    }
    if (c.preset == Preset::Kind::Bump) {
        if (c.bump_k < 1) problems.push_back("--bump-k must be at least 1");
        if (!(c.bump_delta >= 0.0)) problems.push_back("--bump-delta must be non-negative");
        const double drop = c.bump_delta * 3.0 * c.bump_k * c.bump_k * std::numbers::pi * std::numbers::pi;
        if (!(drop < 1.0)) problems.push_back("--bump-delta too large: delta*3k^2pi^2 must stay below 1");
    }

    num_opt(dt, "--dt", c.dt);
    num_opt(steps, "--steps", c.steps);
    num_opt(tmax, "--tmax", c.tmax);
    c.auto_tau = auto_tau;
    if (c.dt && c.steps) problems.push_back("give either --dt or --steps, not both");
    if (c.tmax && c.auto_tau) problems.push_back("give either --tmax or --auto-tau, not both");
    if (c.dt && !(*c.dt > 0.0)) problems.push_back("--dt must be positive");
    if (c.steps && *c.steps < 1) problems.push_back("--steps must be at least 1");
    if (c.tmax && !(*c.tmax > 0.0)) problems.push_back("--tmax must be positive");
    if (!c.dt && !c.steps) c.steps = 100;
    if (!c.tmax && !c.auto_tau) c.tmax = 1.0;

    num_opt(p, "--p", c.p);
    num_opt(cstar, "--cstar", c.c_star);
    num_opt(cm, "--cm", c.c_m);
    if (!(c.p > 3.0)) problems.push_back("--p must exceed 3");
    if (!(c.c_star > 0.0)) problems.push_back("--cstar must be positive");
    if (!(c.c_m > 0.0)) problems.push_back("--cm must be positive");

    if (!coriolis.empty()) {
        try {
            c.coriolis = parse_coriolis(coriolis);
        } catch (const std::invalid_argument& e) {
            problems.push_back(std::string("--coriolis: ") + e.what());
        }
    }
    if (c.coriolis.kind == CoriolisSpec::Kind::Constant && !(c.coriolis.value > 0.0)) {
        problems.push_back("--coriolis const:F0 needs F0 > 0");
    }
    if (c.coriolis.kind == CoriolisSpec::Kind::Profile) {
        const double lo = 1.0 + c.coriolis.value * c.origin[2];
        const double hi = 1.0 + c.coriolis.value * (c.origin[2] + c.extent[2]);
        if (!(lo > 0.0 && hi > 0.0)) problems.push_back("--coriolis profile must stay positive over the box");
    }

    num_opt(tol, "--tol", c.tol);
    num_opt(maxiter, "--maxiter", c.maxiter);
    if (!(c.tol > 0.0)) problems.push_back("--tol must be positive");
    if (c.maxiter < 0) problems.push_back("--maxiter must be non-negative");

    if (!out.empty()) c.out = out;
    if (!emit.empty()) {
        c.emit_csv = false;
        c.emit_fields = false;
        if (emit != "none") {
            for (const auto& item : split(emit, ',')) {
                if (item == "csv") {
                    c.emit_csv = true;
                } else if (item == "fields") {
                    c.emit_fields = true;
                } else {
                    problems.push_back("--emit accepts csv, fields or none, got '" + item + "'");
                }
            }
        }
    }
    num_opt(snap_every, "--snap-every", c.snap_every);
    num_opt(log_every, "--log-every", c.log_every);
    if (c.snap_every < 1) problems.push_back("--snap-every must be at least 1");
    if (c.log_every < 1) problems.push_back("--log-every must be at least 1");
    c.strict = strict;

    if (!problems.empty()) throw UsageError(problems);
    if (!sweep.empty()) cmd.sweep_file = sweep;
    return cmd;
}

RunConfig parse_config(const std::vector<std::string>& args, const std::optional<std::string>& config_file) {
    return parse_command(args, config_file).config;
}

std::vector<std::string> to_args(const RunConfig& c) {
    std::vector<std::string> a = {
        "--grid", std::to_string(c.grid[0]) + "," + std::to_string(c.grid[1]) + "," + std::to_string(c.grid[2]),
        "--extent", vec3_string(c.extent),
        "--origin", vec3_string(c.origin),
        "--preset", to_string(c.preset),
        "--tilt", vec3_string(c.tilt),
        "--quad", vec3_string(c.quad),
        "--bump-delta", format_double(c.bump_delta),
        "--bump-k", std::to_string(c.bump_k),
    };
    if (c.dt) a.insert(a.end(), {"--dt", format_double(*c.dt)});
    if (c.steps) a.insert(a.end(), {"--steps", std::to_string(*c.steps)});
    if (c.tmax) a.insert(a.end(), {"--tmax", format_double(*c.tmax)});
    if (c.auto_tau) a.push_back("--auto-tau");
    a.insert(a.end(), {"--p", format_double(c.p), "--cstar", format_double(c.c_star), "--cm", format_double(c.c_m),
                       "--coriolis", to_string(c.coriolis), "--tol", format_double(c.tol), "--maxiter",
                       std::to_string(c.maxiter), "--out", c.out});
    std::vector<std::string> emit;
    if (c.emit_csv) emit.emplace_back("csv");
    if (c.emit_fields) emit.emplace_back("fields");
    a.insert(a.end(), {"--emit", emit.empty() ? "none" : join(emit, ","), "--snap-every",
                       std::to_string(c.snap_every), "--log-every", std::to_string(c.log_every)});
    if (c.strict) a.push_back("--strict");
    return a;
}

}  // namespace sgeuler
