// The OpenMP kernels against their serial reference implementations, plus
// schedule-independence of the randomized reductions.

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "risoam/channel.hpp"
#include "risoam/fp_optimizer.hpp"
#include "risoam/oracle.hpp"
#include "test_support.hpp"

using namespace risoam;

namespace {

double rel_inf_gap(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

} // namespace

TEST_CASE("channel build: parallel equals the serial reference")
{
    for (int s = 0; s < 5; ++s) {
        const ScenarioConfig cfg = testing::random_scenario(6000 + s);
        const SceneGeometry scene = build_scene(cfg);
        const ChannelSet par = build_channels(scene, cfg);
        const ChannelSet ser = ref::build_channels(scene, cfg);
        CHECK(rel_inf_gap(par.g, ser.g) == 0.0);
        for (int k = 0; k < cfg.n_users; ++k)
            CHECK(rel_inf_gap(par.h[k], ser.h[k]) == 0.0);
    }
}

TEST_CASE("coupling build: parallel matches the naive entry-wise reference")
{
    for (int s = 0; s < 5; ++s) {
        const ScenarioConfig cfg = testing::random_scenario(6100 + s);
        const ChannelSet ch = build_channels(build_scene(cfg), cfg);
        const ModeBasis basis = build_mode_basis(cfg);
        const CouplingTensor par = build_coupling(ch, basis);
        const CouplingTensor ser = ref::build_coupling(ch, basis);
        for (int k = 0; k < cfg.n_users; ++k)
            CHECK(rel_inf_gap(par.a[k], ser.a[k]) <= 1e-12);
    }
}

TEST_CASE("phase-QP assembly: parallel matches the rank-one accumulation reference")
{
    for (int s = 0; s < 5; ++s) {
        const ScenarioConfig cfg = testing::random_scenario(6200 + s);
        const ChannelSet ch = build_channels(build_scene(cfg), cfg);
        const CouplingTensor coupling = build_coupling(ch, build_mode_basis(cfg));
        Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.n_tx);
        for (const auto &set : cfg.mode_sets)
            for (int mode : set)
                p(mode) = cfg.total_power_linear() / cfg.n_tx;
        const Eigen::VectorXcd theta = Eigen::VectorXcd::Ones(cfg.ris_elements());
        const CouplingScalars u = coupling_scalars(coupling, theta);
        const auto nu = update_nu(p, u, cfg);
        const auto eta = update_eta_theta(p, u, nu, cfg);
        const ThetaQp par = build_theta_qp(coupling, p, nu, eta, cfg);
        const ThetaQp ser = ref::build_theta_qp(coupling, p, nu, eta, cfg);
        CHECK(rel_inf_gap(par.U, ser.U) <= 1e-12);
        CHECK((par.v - ser.v).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(par.v.cwiseAbs().maxCoeff(), 1e-300));
        // per-entry conjugate pairing makes the parallel result exactly Hermitian
        CHECK((par.U - par.U.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("monte carlo: chunked parallel reduction matches the serial reference")
{
    const ScenarioConfig cfg = testing::random_scenario(6300);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.n_tx);
    for (const auto &set : cfg.mode_sets)
        for (int mode : set)
            p(mode) = cfg.total_power_linear() / cfg.n_tx;
    const Eigen::VectorXcd theta = Eigen::VectorXcd::Ones(cfg.ris_elements());
    oracle::MonteCarloSpec spec;
    spec.draws = 20000;
    spec.seed = 77;
    const oracle::McResult par = oracle::monte_carlo_sinr(cfg, p, theta, spec);
    const oracle::McResult ser = oracle::ref::monte_carlo_sinr(cfg, p, theta, spec);
    for (int k = 0; k < cfg.n_users; ++k)
        for (std::size_t i = 0; i < par.stats[k].size(); ++i) {
            CHECK(par.stats[k][i].sinr ==
                  doctest::Approx(ser.stats[k][i].sinr).epsilon(1e-12));
            CHECK(par.stats[k][i].signal_power ==
                  doctest::Approx(ser.stats[k][i].signal_power).epsilon(1e-12));
        }
}

TEST_CASE("monte carlo: result is independent of the thread count")
{
    const ScenarioConfig cfg = testing::random_scenario(6400);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.n_tx);
    for (const auto &set : cfg.mode_sets)
        for (int mode : set)
            p(mode) = cfg.total_power_linear() / cfg.n_tx;
    const Eigen::VectorXcd theta = Eigen::VectorXcd::Ones(cfg.ris_elements());
    oracle::MonteCarloSpec spec;
    spec.draws = 16000;
    spec.seed = 99;
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const oracle::McResult one = oracle::monte_carlo_sinr(cfg, p, theta, spec);
    omp_set_num_threads(3);
    const oracle::McResult three = oracle::monte_carlo_sinr(cfg, p, theta, spec);
    omp_set_num_threads(saved);
    for (int k = 0; k < cfg.n_users; ++k)
        for (std::size_t i = 0; i < one.stats[k].size(); ++i)
            CHECK(one.stats[k][i].sinr == three.stats[k][i].sinr);
#else
    const oracle::McResult alone = oracle::monte_carlo_sinr(cfg, p, theta, spec);
    CHECK(alone.draws == spec.draws);
#endif
}

TEST_CASE("grid search: parallel argmax equals the serial scan")
{
    for (int s = 0; s < 3; ++s) {
        const ScenarioConfig cfg = testing::tiny_scenario(6500 + s);
        oracle::GridSpec grid;
        grid.phase_levels = 16;
        grid.power_levels.resize(6);
        for (int l = 0; l < 6; ++l)
            grid.power_levels[l] = cfg.total_power_linear() * l / 5.0;
        const oracle::GridResult par = oracle::grid_search(cfg, grid);
        const oracle::GridResult ser = oracle::ref::grid_search(cfg, grid);
        CHECK(par.best_rate == ser.best_rate);
        CHECK((par.p - ser.p).cwiseAbs().maxCoeff() == 0.0);
        CHECK((par.theta - ser.theta).cwiseAbs().maxCoeff() == 0.0);
        CHECK(par.points_evaluated == ser.points_evaluated);
    }
}

TEST_CASE("grid search: argmax is independent of the thread count")
{
    const ScenarioConfig cfg = testing::tiny_scenario(6600);
    oracle::GridSpec grid;
    grid.phase_levels = 12;
    grid.power_levels = {0.0, cfg.total_power_linear() / 2.0, cfg.total_power_linear()};
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const oracle::GridResult one = oracle::grid_search(cfg, grid);
    omp_set_num_threads(4);
    const oracle::GridResult four = oracle::grid_search(cfg, grid);
    omp_set_num_threads(saved);
    CHECK(one.best_rate == four.best_rate);
    CHECK((one.theta - four.theta).cwiseAbs().maxCoeff() == 0.0);
#else
    const oracle::GridResult alone = oracle::grid_search(cfg, grid);
    CHECK(alone.points_evaluated > 0);
#endif
}
