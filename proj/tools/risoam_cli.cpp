// Command-line front end: single solves with convergence traces, sweeps over
// the RIS size / power budget / optimization scheme, and the self-validation
// suite. All outputs are deterministic for a fixed config and seed.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risoam/experiment.hpp"
#include "risoam/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitValidationError = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iters;
    std::optional<double> tol;
};

void add_common(CLI::App *cmd, CommonArgs &args)
{
    cmd->add_option("config", args.config_path, "scenario config (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--max-iters", args.max_iters, "override solver.max_iterations");
    cmd->add_option("--tol", args.tol, "override solver.tolerance");
}

risoam::ScenarioConfig load_with_overrides(const CommonArgs &args)
{
    risoam::ScenarioConfig cfg = risoam::load_config(args.config_path);
    if (args.seed) {
        cfg.seed = *args.seed;
        cfg.solver.seed = *args.seed;
    }
    if (args.max_iters)
        cfg.solver.max_iterations = *args.max_iters;
    if (args.tol)
        cfg.solver.tolerance = *args.tol;
    cfg.validate();
    return cfg;
}

std::string out_path(const CommonArgs &args, const std::string &file)
{
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / file).string();
}

int do_run(const CommonArgs &args)
{
    const risoam::ScenarioConfig cfg = load_with_overrides(args);
    const risoam::RunResult result = risoam::run_single(cfg);
    risoam::write_text_file(out_path(args, "trace.csv"),
                            risoam::trace_to_csv(result.solve.trace, cfg.n_users));
    risoam::write_text_file(out_path(args, "summary.json"),
                            risoam::summary_to_json(cfg, result));
    risoam::save_config(cfg, out_path(args, "resolved_config.json"));
    std::cout << "final sum rate: " << risoam::format_double(result.solve.report.weighted_sum)
              << " bits/s/Hz after " << result.solve.iterations << " iterations"
              << (result.solve.converged ? "" : " (not converged)") << "\n";
    for (const auto &warning : result.solve.warnings)
        std::cerr << "warning: " << warning << "\n";
    return kExitOk;
}

int do_sweep(const CommonArgs &args, const std::string &axis_name,
             const std::vector<std::string> &values)
{
    const risoam::ScenarioConfig cfg = load_with_overrides(args);
    const risoam::SweepAxis axis = risoam::sweep_axis_from_string(axis_name);
    const std::vector<risoam::SweepRow> rows = risoam::run_sweep(cfg, axis, values);
    risoam::write_text_file(out_path(args, "sweep.csv"), risoam::sweep_to_csv(rows, axis));
    risoam::save_config(cfg, out_path(args, "resolved_config.json"));
    bool any_failed = false;
    for (const auto &row : rows) {
        std::cout << risoam::to_string(axis) << "=" << row.value << ": ";
        if (row.ok)
            std::cout << risoam::format_double(row.final_rate) << " bits/s/Hz ("
                      << row.iterations << " iters)\n";
        else {
            std::cout << "failed: " << row.error << "\n";
            any_failed = true;
        }
    }
    return any_failed ? kExitSolverError : kExitOk;
}

int do_validate(const CommonArgs &args, bool inject_fault, int draws)
{
    const risoam::ScenarioConfig cfg = load_with_overrides(args);
    risoam::ValidateOptions opts;
    opts.inject_coupling_fault = inject_fault;
    opts.monte_carlo_draws = draws;
    const risoam::ValidationReport report = risoam::run_validate(cfg, opts);
    std::cout << risoam::validation_to_text(report);
    return report.all_pass ? kExitOk : kExitValidationError;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"RIS-assisted OAM multiuser downlink: simulation and sum-rate optimization"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App *run_cmd = app.add_subcommand("run", "single solve with convergence trace");
    add_common(run_cmd, run_args);

    CommonArgs sweep_args;
    std::string axis;
    std::vector<std::string> values;
    CLI::App *sweep_cmd = app.add_subcommand("sweep", "one solve per axis value");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--axis", axis, "M | Pt | baseline")->required();
    sweep_cmd->add_option("--values", values, "comma-separated axis values")->delimiter(',');

    CommonArgs validate_args;
    bool inject_fault = false;
    int draws = 100000;
    CLI::App *validate_cmd = app.add_subcommand("validate", "run the oracle suite");
    add_common(validate_cmd, validate_args);
    validate_cmd->add_option("--draws", draws, "Monte-Carlo draws");
    validate_cmd
        ->add_flag("--inject-fault", inject_fault,
                   "corrupt one coupling entry (sensitivity check of the gate)")
        ->group(""); // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run_cmd->parsed())
            return do_run(run_args);
        if (sweep_cmd->parsed())
            return do_sweep(sweep_args, axis, values);
        return do_validate(validate_args, inject_fault, draws);
    } catch (const std::invalid_argument &err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const risoam::SolverError &err) {
        std::cerr << "solver error: " << err.what() << "\n";
        return kExitSolverError;
    } catch (const std::exception &err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitSolverError;
    }
}
