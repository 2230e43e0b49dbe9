#include "sgeuler/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sgeuler/coriolis.hpp"

namespace sgeuler {

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "step",       "time",         "energy",          "l2_gradP",        "lp_gradP",        "linf_gradP",
        "w3p_gradP",  "lambda_min",   "lambda_argmin_i", "lambda_argmin_j", "lambda_argmin_k", "curl_residual",
        "bbox_min_x", "bbox_min_y",   "bbox_min_z",      "bbox_max_x",      "bbox_max_y",      "bbox_max_z",
        "u_max",      "solver_iters", "solver_residual", "est_ratio_u",     "est_ratio_Au"};
    return cols;
}

void write_series_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : records) {
        const auto d = [](double x) { return format_double(x); };
        out << r.step << ',' << d(r.time) << ',' << d(r.energy) << ',' << d(r.l2_grad) << ',' << d(r.lp_grad) << ','
            << d(r.linf_grad) << ',' << d(r.w3p_grad) << ',' << d(r.lambda_min) << ',' << r.lambda_argmin.i << ','
            << r.lambda_argmin.j << ',' << r.lambda_argmin.k << ',' << d(r.curl_residual) << ',' << d(r.bbox.lo[0])
            << ',' << d(r.bbox.lo[1]) << ',' << d(r.bbox.lo[2]) << ',' << d(r.bbox.hi[0]) << ',' << d(r.bbox.hi[1])
            << ',' << d(r.bbox.hi[2]) << ',' << d(r.u_max) << ',' << r.solver_iterations << ','
            << d(r.solver_residual) << ',' << d(r.estimates.u_ratio) << ',' << d(r.estimates.au_ratio) << '\n';
    }
}

void write_vtk(std::ostream& out, const GeopotentialState& s, const VectorField* u) {
    const GridSpec& g = s.spec();
    const Vec3 first = g.center(0, 0, 0);
    out << "# vtk DataFile Version 3.0\n"
        << "geopotential t=" << format_double(s.time()) << "\n"
        << "ASCII\n"
        << "DATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << g.dim(0) << ' ' << g.dim(1) << ' ' << g.dim(2) << '\n'
        << "ORIGIN " << format_double(first[0]) << ' ' << format_double(first[1]) << ' ' << format_double(first[2])
        << '\n'
        << "SPACING " << format_double(g.h(0)) << ' ' << format_double(g.h(1)) << ' ' << format_double(g.h(2))
        << '\n'
        << "POINT_DATA " << g.cell_count() << '\n'
        << "SCALARS P double 1\nLOOKUP_TABLE default\n";
    for (double p : s.potential()) out << format_double(p) << '\n';
    const auto vectors = [&out](const char* name, const VectorField* v, std::size_t n) {
        out << "VECTORS " << name << " double\n";
        for (std::size_t c = 0; c < n; ++c) {
            const Vec3 x = v ? (*v)[c] : Vec3{0.0, 0.0, 0.0};
            out << format_double(x[0]) << ' ' << format_double(x[1]) << ' ' << format_double(x[2]) << '\n';
        }
    };
    vectors("gradP", &s.grad(), g.cell_count());
    vectors("u", u, g.cell_count());
}

namespace {

std::optional<CoriolisField> make_coriolis(const CoriolisSpec& spec, const GridSpec& g) {
    switch (spec.kind) {
        case CoriolisSpec::Kind::Off: return std::nullopt;
        case CoriolisSpec::Kind::Constant: return CoriolisField::constant(g, spec.value);
        case CoriolisSpec::Kind::Profile: return CoriolisField::profile(g, spec.value);
        case CoriolisSpec::Kind::File: return CoriolisField::from_file(g, spec.path);
    }
    return std::nullopt;
}

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    const auto args = to_args(cfg);
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string key = args[i].substr(2);
        if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
            j[key] = args[++i];
        } else {
            j[key] = true;
        }
    }
    return j;
}

nlohmann::json constants_json(const SchemeConstants& k) {
    return {{"p", k.p},           {"lambda0", k.lambda0},         {"omega", k.omega},
            {"grad_norm0", k.grad_norm0}, {"holder_alpha", k.holder_alpha}, {"m_star", k.m_star},
            {"c_star", k.c_star}, {"c_m", k.c_m},                 {"kappa", k.kappa},
            {"tau_star", k.tau_star}, {"domain_volume", k.domain_volume}};
}

std::string snapshot_name(int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fields_%04d.vtk", step);
    return buf;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentResult res;
    std::optional<GeopotentialState> s0;
    std::optional<CoriolisField> rot;
    try {
        const GridSpec g = cfg.make_grid();
        s0 = init_state(cfg.make_preset(), g);
        res.constants = compute_constants(*s0, cfg.p, cfg.c_star, cfg.c_m);
        res.schedule = resolve_schedule(cfg, res.constants.tau_star);
        rot = make_coriolis(cfg.coriolis, g);
        fs::create_directories(cfg.out);
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.error = e.what();
        return res;
    }

    SchemeConfig sc;
    sc.epsilon = res.schedule.epsilon;
    sc.steps = res.schedule.steps;
    sc.solver.tol = cfg.tol;
    sc.solver.maxiter = cfg.maxiter;
    sc.log_every = cfg.log_every;
    sc.coriolis = rot ? &*rot : nullptr;

    const fs::path dir(cfg.out);
    StateObserver observer;
    if (cfg.emit_fields) {
        observer = [&](int step, const GeopotentialState& s, const DarcySolution* sol) {
            if (step == 0 || step % cfg.snap_every != 0) return;
            const fs::path path = dir / snapshot_name(step);
            std::ofstream f(path);
            write_vtk(f, s, sol ? &sol->u : nullptr);
            res.snapshots.push_back(path);
        };
    }

    const RunResult rr = run(*s0, sc, res.constants, observer);
    res.halt = rr.halt;
    res.halt_detail = rr.halt_detail;
    res.steps_taken = rr.steps_taken;

    if (cfg.emit_csv) {
        std::ofstream f(dir / "series.csv");
        write_series_csv(f, rr.records);
    }

    nlohmann::json meta;
    meta["config"] = config_json(cfg);
    meta["constants"] = constants_json(res.constants);
    meta["schedule"] = {{"horizon", res.schedule.horizon},
                        {"epsilon", res.schedule.epsilon},
                        {"steps", res.schedule.steps}};
    meta["halt"] = {{"reason", to_string(rr.halt)}, {"detail", rr.halt_detail}, {"steps_taken", rr.steps_taken}};
    std::ofstream(dir / "run.json") << meta.dump(2) << '\n';

    if (cfg.strict && rr.halt != HaltReason::Completed) res.exit_code = 1;
    return res;
}

std::vector<ExperimentResult> run_sweep(const std::string& sweep_file, const std::vector<std::string>& base_args) {
    std::ifstream in(sweep_file);
    if (!in) throw UsageError({"cannot read sweep file " + sweep_file});
    const RunConfig base = parse_config(base_args);

    std::vector<RunConfig> configs;
    std::vector<std::string> problems;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        std::vector<std::string> args = base_args;
        args.insert(args.end(), tokens.begin(), tokens.end());
        try {
            RunConfig c = parse_config(args);
            if (std::find(tokens.begin(), tokens.end(), "--out") == tokens.end()) {
                char name[32];
                std::snprintf(name, sizeof name, "run_%03zu", configs.size());
                c.out = (std::filesystem::path(base.out) / name).string();
            }
            configs.push_back(std::move(c));
        } catch (const UsageError& e) {
            for (const auto& p : e.problems()) problems.push_back(sweep_file + ":" + std::to_string(lineno) + ": " + p);
        }
    }
    if (!problems.empty()) throw UsageError(problems);

    std::vector<ExperimentResult> results(configs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next++; i < configs.size(); i = next++) results[i] = run_experiment(configs[i]);
    };
    const std::size_t nthreads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(configs.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return results;
}

}  // namespace sgeuler
