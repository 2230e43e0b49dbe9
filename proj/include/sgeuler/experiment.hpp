#pragma once

// End-to-end runs: build the initial state, step it, and write series.csv,
// optional fields_NNNN.vtk snapshots and run.json into the output directory.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgeuler/config.hpp"
#include "sgeuler/diagnostics.hpp"
#include "sgeuler/stepper.hpp"

namespace sgeuler {

/// Column order of series.csv.
const std::vector<std::string>& csv_columns();

/// Header plus one row per record, numbers in shortest round-trip form.
void write_series_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Legacy ASCII STRUCTURED_POINTS with point data P, gradP and u (zero when
/// no velocity is given).
void write_vtk(std::ostream& out, const GeopotentialState& s, const VectorField* u);

struct ExperimentResult {
    int exit_code = 0;
    HaltReason halt = HaltReason::Completed;
    std::string halt_detail;
    std::string error;  // set when the run could not start
    SchemeConstants constants;
    Schedule schedule;
    int steps_taken = 0;
    std::vector<std::filesystem::path> snapshots;
};

/// Exit code 0 on success, 1 when the run could not start or, with
/// --strict, halted before the horizon.
ExperimentResult run_experiment(const RunConfig& cfg);

/// One flag set per non-empty, non-comment line, applied on top of `base`
/// (file and command-line flags). Lines without --out write to
/// base.out/run_NNN. Runs execute concurrently; results keep line order.
std::vector<ExperimentResult> run_sweep(const std::string& sweep_file, const std::vector<std::string>& base_args);

}  // namespace sgeuler
