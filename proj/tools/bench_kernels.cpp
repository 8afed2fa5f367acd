// Timing harness comparing the OpenMP kernels against their serial reference
// implementations: channel build, coupling build, phase-QP assembly,
// Monte-Carlo simulation, and grid search.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "risoam/channel.hpp"
#include "risoam/experiment.hpp"
#include "risoam/fp_optimizer.hpp"
#include "risoam/oracle.hpp"

namespace {

double time_best_of(const std::function<void()> &fn, int repeats)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto end = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(end - start).count());
    }
    return best;
}

void report(const std::string &name, double serial_s, double parallel_s)
{
    std::printf("%-28s %12.3f ms %12.3f ms %8.2fx\n", name.c_str(), serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s);
}

} // namespace

int main()
{
    using namespace risoam;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    std::printf("%-28s %15s %15s %9s\n", "kernel", "serial", "openmp", "speedup");

    // Large RIS so the kernels have something to chew on.
    ScenarioConfig cfg = default_config();
    cfg.ris.elements_y = 24;
    cfg.ris.elements_z = 20; // M = 480
    cfg.resolve_defaults();
    cfg.validate();

    const SceneGeometry scene = build_scene(cfg);
    report("channel_build (M=480)",
           time_best_of([&] { (void)ref::build_channels(scene, cfg); }, 3),
           time_best_of([&] { (void)build_channels(scene, cfg); }, 3));

    const ChannelSet channels = build_channels(scene, cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    report("coupling_build (M=480)",
           time_best_of([&] { (void)ref::build_coupling(channels, basis); }, 3),
           time_best_of([&] { (void)build_coupling(channels, basis); }, 3));

    const CouplingTensor coupling = build_coupling(channels, basis);
    Eigen::VectorXcd theta = Eigen::VectorXcd::Ones(cfg.ris_elements());
    Eigen::VectorXd p =
        Eigen::VectorXd::Constant(cfg.n_tx, cfg.total_power_linear() / cfg.n_tx);
    const CouplingScalars u = coupling_scalars(coupling, theta);
    const auto nu = update_nu(p, u, cfg);
    const auto eta_theta = update_eta_theta(p, u, nu, cfg);
    report("theta_qp_assembly (M=480)",
           time_best_of([&] { (void)ref::build_theta_qp(coupling, p, nu, eta_theta, cfg); }, 3),
           time_best_of([&] { (void)build_theta_qp(coupling, p, nu, eta_theta, cfg); }, 3));

    ScenarioConfig mc_cfg = default_config();
    Eigen::VectorXcd mc_theta = Eigen::VectorXcd::Ones(mc_cfg.ris_elements());
    Eigen::VectorXd mc_p =
        Eigen::VectorXd::Constant(mc_cfg.n_tx, mc_cfg.total_power_linear() / mc_cfg.n_tx);
    oracle::MonteCarloSpec mc_spec;
    mc_spec.draws = 50000;
    mc_spec.seed = 11;
    report("monte_carlo (5e4 draws)",
           time_best_of([&] { (void)oracle::ref::monte_carlo_sinr(mc_cfg, mc_p, mc_theta,
                                                                  mc_spec); }, 2),
           time_best_of([&] { (void)oracle::monte_carlo_sinr(mc_cfg, mc_p, mc_theta, mc_spec); },
                        2));

    ScenarioConfig tiny;
    tiny.n_users = 1;
    tiny.n_tx = 2;
    tiny.n_rx = 2;
    tiny.modes_per_user = {2};
    tiny.mode_sets = {{0, 1}};
    tiny.user_radius = {0.6};
    tiny.user_centers = {Eigen::Vector3d(0, 20, 0)};
    tiny.noise_power = {1.0};
    tiny.weights = {1.0};
    tiny.ris.elements_y = 2;
    tiny.ris.elements_z = 1;
    tiny.total_power_db = 13.0;
    tiny.resolve_defaults();
    tiny.validate();
    oracle::GridSpec grid;
    grid.phase_levels = 48;
    grid.power_levels = {0.0, 5.0, 10.0, 15.0, 20.0};
    report("grid_search (2304x25 pts)",
           time_best_of([&] { (void)oracle::ref::grid_search(tiny, grid); }, 2),
           time_best_of([&] { (void)oracle::grid_search(tiny, grid); }, 2));

    return 0;
}
