#ifndef RISOAM_TEST_SUPPORT_HPP
#define RISOAM_TEST_SUPPORT_HPP

#include <random>

#include "risoam/channel.hpp"
#include "risoam/config.hpp"
#include "risoam/geometry.hpp"

namespace risoam::testing {

// Random but physically sane scenario in the ranges the acceptance gate
// exercises: Nt in [4,15], K in [1,3], M in [4,40].
inline ScenarioConfig random_scenario(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> users(1, 3);
    std::uniform_int_distribution<int> tx(4, 15);
    std::uniform_int_distribution<int> my(2, 8);
    std::uniform_int_distribution<int> mz(2, 5);

    ScenarioConfig cfg;
    cfg.n_users = users(rng);
    cfg.n_tx = std::max(tx(rng), cfg.n_users);
    cfg.modes_per_user.clear();
    const int base = cfg.n_tx / cfg.n_users;
    const int extra = cfg.n_tx % cfg.n_users;
    cfg.n_rx = 0;
    for (int k = 0; k < cfg.n_users; ++k) {
        cfg.modes_per_user.push_back(base + (k < extra ? 1 : 0));
        cfg.n_rx = std::max(cfg.n_rx, cfg.modes_per_user.back());
    }
    cfg.mode_sets.clear();
    cfg.ris.elements_y = my(rng);
    cfg.ris.elements_z = mz(rng);
    cfg.tx_radius = 0.3 + 0.5 * u01(rng);
    cfg.user_radius.assign(cfg.n_users, 0.3 + 0.5 * u01(rng));
    cfg.noise_power.assign(cfg.n_users, std::pow(10.0, -9.0 * u01(rng)));
    cfg.weights.assign(cfg.n_users, 0.5 + u01(rng));
    cfg.total_power_db = 20.0 * u01(rng);
    cfg.ris_x = 1.0 + 3.0 * u01(rng);
    cfg.ris_y = 10.0 + 30.0 * u01(rng);
    cfg.user_centers.clear();
    for (int k = 0; k < cfg.n_users; ++k)
        cfg.user_centers.emplace_back(10.0 * k + 5.0 * u01(rng), 15.0 + 10.0 * u01(rng), 0.0);
    cfg.seed = seed;
    cfg.solver.seed = seed;
    cfg.solver.theta_init = (seed % 2) ? ThetaInit::RandomPhases : ThetaInit::Ones;
    cfg.resolve_defaults();
    cfg.validate();
    return cfg;
}

// Two-mode single-user instance small enough for exhaustive search, with the
// noise floor placed at the received-signal scale so the power split matters.
inline ScenarioConfig tiny_scenario(std::uint64_t seed, double noise_factor = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ScenarioConfig cfg;
    cfg.n_users = 1;
    cfg.n_tx = 2;
    cfg.n_rx = 2;
    cfg.modes_per_user = {2};
    cfg.mode_sets = {{0, 1}};
    cfg.tx_radius = 0.4 + 0.4 * u01(rng);
    cfg.user_radius = {0.4 + 0.4 * u01(rng)};
    cfg.noise_power = {1.0};
    cfg.total_power_db = 10.0 + 10.0 * u01(rng);
    cfg.weights = {1.0};
    cfg.ris.elements_y = 2;
    cfg.ris.elements_z = 1;
    cfg.ris_x = 1.0 + 2.0 * u01(rng);
    cfg.ris_y = 20.0 + 10.0 * u01(rng);
    cfg.user_centers = {Eigen::Vector3d(0.0, 15.0 + 5.0 * u01(rng), 0.0)};
    cfg.seed = seed;
    cfg.solver.seed = seed;
    cfg.resolve_defaults();
    cfg.validate();

    const ChannelSet ch = build_channels(build_scene(cfg), cfg);
    const CouplingTensor coupling = build_coupling(ch, build_mode_basis(cfg));
    const CouplingScalars u =
        coupling_scalars(coupling, Eigen::VectorXcd::Ones(cfg.ris_elements()));
    double mean_signal = 0.0;
    for (int i = 0; i < 2; ++i)
        mean_signal += cfg.total_power_linear() / 2.0 * std::norm(u[0](i, i));
    cfg.noise_power = {0.5 * mean_signal * noise_factor};
    cfg.validate();
    return cfg;
}

// Synthetic coupling scalars of order one; the physical channel scale is
// irrelevant for algebraic identities.
inline CouplingScalars random_couplings(const ScenarioConfig &cfg, std::mt19937_64 &rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    CouplingScalars u(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        u[k].resize(static_cast<Eigen::Index>(cfg.mode_sets[k].size()), cfg.n_tx);
        for (Eigen::Index i = 0; i < u[k].rows(); ++i)
            for (int j = 0; j < cfg.n_tx; ++j)
                u[k](i, j) = cxd(gauss(rng), gauss(rng));
    }
    return u;
}

// Order-one synthetic problem for the closed-form update identities.
struct SyntheticProblem {
    ScenarioConfig cfg;
    CouplingScalars u;
    Eigen::VectorXd p;
};

inline SyntheticProblem synthetic_problem(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.2, 1.5);
    SyntheticProblem s;
    s.cfg.n_users = 2;
    s.cfg.n_tx = 4;
    s.cfg.n_rx = 2;
    s.cfg.modes_per_user = {2, 2};
    s.cfg.mode_sets = {{0, 1}, {2, 3}};
    s.cfg.noise_power = {unit(rng), unit(rng)};
    s.cfg.weights = {unit(rng), unit(rng)};
    s.cfg.total_power_db = 60.0;
    s.cfg.user_radius = {0.6, 0.6};
    s.cfg.user_centers = {Eigen::Vector3d(0, 20, 0), Eigen::Vector3d(10, 20, 0)};
    s.cfg.solver.seed = seed;
    s.u = random_couplings(s.cfg, rng);
    s.p = Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return unit(rng); });
    return s;
}

} // namespace risoam::testing

#endif
