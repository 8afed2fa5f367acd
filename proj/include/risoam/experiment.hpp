#ifndef RISOAM_EXPERIMENT_HPP
#define RISOAM_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "risoam/config.hpp"
#include "risoam/fp_optimizer.hpp"

namespace risoam {

struct RunResult {
    SolveResult solve;
    double wall_seconds = 0.0;
};

RunResult run_single(const ScenarioConfig &cfg);

enum class SweepAxis { RisElements, TotalPowerDb, Baseline };

SweepAxis sweep_axis_from_string(const std::string &name);
std::string to_string(SweepAxis axis);
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string &name);

struct SweepRow {
    std::string value;      // axis value (number, or scheme name on the baseline axis)
    double final_rate = 0.0;
    int iterations = 0;
    bool ok = false;
    std::string error;
};

/// One independent solver run per axis value; each run derives its own seed
/// from the master seed and the value, so rows are order-independent.
std::vector<SweepRow> run_sweep(const ScenarioConfig &cfg, SweepAxis axis,
                                const std::vector<std::string> &values);

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass = true;
};

struct ValidateOptions {
    // Test hook: negates one steering-vector entry in the analytic coupling
    // path so the Monte-Carlo consistency check must trip.
    bool inject_coupling_fault = false;
    int monte_carlo_draws = 100000;
};

/// Runs the oracle suite against a configuration: tiny-instance grid
/// equivalence, Monte-Carlo SINR consistency, closed-form stationarity,
/// and cross-solver agreement on the phase subproblem.
ValidationReport run_validate(const ScenarioConfig &cfg, const ValidateOptions &opts = {});

// --- File emission (formats are stable interfaces) ---

std::string trace_to_csv(const IterationTrace &trace, int n_users);
std::string sweep_to_csv(const std::vector<SweepRow> &rows, SweepAxis axis);
std::string summary_to_json(const ScenarioConfig &cfg, const RunResult &result);
std::string validation_to_text(const ValidationReport &report);

void write_text_file(const std::string &path, const std::string &content);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

} // namespace risoam

#endif
