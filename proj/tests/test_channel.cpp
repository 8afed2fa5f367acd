#include <doctest.h>

#include <random>

#include "risoam/channel.hpp"
#include "risoam/geometry.hpp"
#include "risoam/oracle.hpp"
#include "test_support.hpp"

using namespace risoam;

TEST_CASE("channel entries: free-space magnitude and phase")
{
    ScenarioConfig cfg = default_config();
    const SceneGeometry scene = build_scene(cfg);
    const ChannelSet ch = build_channels(scene, cfg);

    // 10 GHz wavelength and a 30 m hop
    const double wl = cfg.wavelength();
    CHECK(wl == doctest::Approx(0.0299792458));
    const double d = (scene.ris.elements[0] - scene.tx.elements[0]).norm();
    CHECK(std::abs(ch.g(0, 0)) == doctest::Approx(wl / (4.0 * kPi * d)).epsilon(1e-12));
    // reference point for the spec'd 30 m magnitude
    CHECK(wl / (4.0 * kPi * 30.0) == doctest::Approx(7.953e-5).epsilon(1e-3));

    const double phase = std::arg(ch.g(0, 0));
    const double expected = std::remainder(-2.0 * kPi * d / wl, 2.0 * kPi);
    CHECK(std::remainder(phase - expected, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));

    for (Eigen::Index m = 0; m < ch.g.rows(); ++m)
        for (Eigen::Index n = 0; n < ch.g.cols(); ++n) {
            CHECK(std::isfinite(std::abs(ch.g(m, n))));
            CHECK(std::abs(ch.g(m, n)) > 0.0);
        }
}

TEST_CASE("channel entries scale linearly with the attenuation factor")
{
    ScenarioConfig cfg = default_config();
    const SceneGeometry scene = build_scene(cfg);
    const ChannelSet base = build_channels(scene, cfg);
    cfg.attenuation = 2.0;
    const ChannelSet doubled = build_channels(scene, cfg);
    CHECK((doubled.g - 2.0 * base.g).cwiseAbs().maxCoeff() <= 1e-18);
    CHECK((doubled.h[1] - 2.0 * base.h[1]).cwiseAbs().maxCoeff() <= 1e-18);
}

TEST_CASE("channel magnitude depends only on the distance")
{
    ScenarioConfig cfg = testing::random_scenario(11);
    SceneGeometry scene = build_scene(cfg);
    const ChannelSet ch = build_channels(scene, cfg);
    // permute transmit elements; magnitudes must follow the permutation
    SceneGeometry permuted = scene;
    std::reverse(permuted.tx.elements.begin(), permuted.tx.elements.end());
    const ChannelSet ch_perm = build_channels(permuted, cfg);
    const Eigen::Index last = ch.g.cols() - 1;
    for (Eigen::Index m = 0; m < ch.g.rows(); ++m)
        for (Eigen::Index n = 0; n < ch.g.cols(); ++n)
            CHECK(std::abs(ch.g(m, n)) ==
                  doctest::Approx(std::abs(ch_perm.g(m, last - n))).epsilon(1e-12));
}

TEST_CASE("coincident elements are rejected as degenerate")
{
    ScenarioConfig cfg = default_config();
    SceneGeometry scene = build_scene(cfg);
    scene.tx.elements[0] = scene.ris.elements[0];
    CHECK_THROWS_AS(build_channels(scene, cfg), std::invalid_argument);
}

TEST_CASE("mode basis: zeroth mode, orthogonality, unitarity")
{
    ScenarioConfig cfg = default_config();
    cfg.n_tx = 4;
    cfg.modes_per_user.clear();
    cfg.mode_sets.clear();
    cfg.n_users = 1;
    cfg.n_rx = 4;
    cfg.user_radius = {0.6};
    cfg.noise_power = {1.0};
    cfg.weights = {1.0};
    cfg.user_centers = {Eigen::Vector3d(0, 20, 0)};
    cfg.resolve_defaults();
    const ModeBasis basis = build_mode_basis(cfg);

    CHECK((basis.tx.col(0) - Eigen::VectorXcd::Ones(4)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(basis.tx.col(1).dot(basis.tx.col(2))) <= 1e-12);

    const Eigen::MatrixXcd gram = basis.tx.adjoint() * basis.tx / 4.0;
    CHECK((gram - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("default mode assignment splits contiguously")
{
    const ScenarioConfig cfg = default_config();
    REQUIRE(cfg.mode_sets.size() == 3);
    CHECK(cfg.mode_sets[0] == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(cfg.mode_sets[1] == std::vector<int>{5, 6, 7, 8, 9});
    CHECK(cfg.mode_sets[2] == std::vector<int>{10, 11, 12, 13, 14});
}

TEST_CASE("overlapping mode assignments are rejected")
{
    ScenarioConfig cfg = default_config();
    cfg.mode_sets[1][0] = 0; // collides with user 1
    CHECK_THROWS_AS(build_mode_basis(cfg), std::invalid_argument);
}

TEST_CASE("single-element surface: coupling reduces to a scalar product")
{
    ScenarioConfig cfg = testing::tiny_scenario(3);
    cfg.ris.elements_y = 1;
    cfg.ris.elements_z = 1;
    const ChannelSet ch = build_channels(build_scene(cfg), cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    const CouplingTensor coupling = build_coupling(ch, basis);
    REQUIRE(coupling.m == 1);

    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_rx) * cfg.n_tx);
    const cxd rx_part = basis.rx[0].col(0).dot(ch.h[0].col(0)); // w^H H column
    const cxd tx_part = ch.g.row(0) * basis.tx.col(1);
    CHECK(std::abs(coupling.vec(0, 0, 1)(0) - scale * rx_part * tx_part) <= 1e-18);
}

TEST_CASE("flat phases reproduce the identity-reflection evaluation")
{
    const ScenarioConfig cfg = testing::random_scenario(5);
    const ChannelSet ch = build_channels(build_scene(cfg), cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    const CouplingTensor coupling = build_coupling(ch, basis);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(cfg.ris_elements());
    const CouplingScalars u = coupling_scalars(coupling, ones);

    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_rx) * cfg.n_tx);
    for (int k = 0; k < cfg.n_users; ++k) {
        const Eigen::MatrixXcd direct =
            scale * (basis.rx[k].adjoint() * ch.h[k] * ch.g * basis.tx);
        CHECK((u[k] - direct).cwiseAbs().maxCoeff() <=
              1e-12 * direct.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("steering vectors are linear in the user channel")
{
    ScenarioConfig cfg = testing::random_scenario(9);
    ChannelSet ch = build_channels(build_scene(cfg), cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    const CouplingTensor base = build_coupling(ch, basis);
    ch.h[0] *= 2.0;
    const CouplingTensor scaled = build_coupling(ch, basis);
    CHECK((scaled.a[0] - 2.0 * base.a[0]).cwiseAbs().maxCoeff() <=
          1e-14 * base.a[0].cwiseAbs().maxCoeff());
    if (cfg.n_users > 1)
        CHECK((scaled.a[1] - base.a[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coupling scalars: dark surface, linearity in the phase vector")
{
    const ScenarioConfig cfg = testing::random_scenario(13);
    const ChannelSet ch = build_channels(build_scene(cfg), cfg);
    const CouplingTensor coupling = build_coupling(ch, build_mode_basis(cfg));
    const int m_total = cfg.ris_elements();

    const CouplingScalars dark = coupling_scalars(coupling, Eigen::VectorXcd::Zero(m_total));
    for (const auto &u_k : dark)
        CHECK(u_k.cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd t1(m_total), t2(m_total);
    for (int m = 0; m < m_total; ++m) {
        t1(m) = cxd(gauss(rng), gauss(rng));
        t2(m) = cxd(gauss(rng), gauss(rng));
    }
    const CouplingScalars u1 = coupling_scalars(coupling, t1);
    const CouplingScalars u2 = coupling_scalars(coupling, t2);
    const CouplingScalars u12 = coupling_scalars(coupling, t1 + t2);
    for (int k = 0; k < cfg.n_users; ++k)
        CHECK((u12[k] - u1[k] - u2[k]).cwiseAbs().maxCoeff() <=
              1e-12 * u1[k].cwiseAbs().maxCoeff());
}

TEST_CASE("coupling scalars match the full matrix-product route on random scenarios")
{
    for (int s = 0; s < 100; ++s) {
        const ScenarioConfig cfg = testing::random_scenario(100 + s);
        const SceneGeometry scene = build_scene(cfg);
        const ChannelSet ch = build_channels(scene, cfg);
        const ModeBasis basis = build_mode_basis(cfg);
        const CouplingTensor coupling = build_coupling(ch, basis);

        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        std::uniform_real_distribution<double> mag(0.0, 1.0);
        Eigen::VectorXcd theta(cfg.ris_elements());
        for (int m = 0; m < cfg.ris_elements(); ++m)
            theta(m) = std::polar(mag(rng), phase(rng));

        const CouplingScalars via_steering = coupling_scalars(coupling, theta);
        const oracle::DirectEvaluator direct(cfg, scene);
        for (int k = 0; k < cfg.n_users; ++k) {
            const Eigen::MatrixXcd full = direct.couplings(k, theta);
            const double scale = full.cwiseAbs().maxCoeff();
            CHECK((via_steering[k] - full).cwiseAbs().maxCoeff() <= 1e-10 * scale);
        }
    }
}

TEST_CASE("coupling magnitude is bounded by the steering-vector one-norm")
{
    const ScenarioConfig cfg = testing::random_scenario(21);
    const ChannelSet ch = build_channels(build_scene(cfg), cfg);
    const CouplingTensor coupling = build_coupling(ch, build_mode_basis(cfg));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd theta(cfg.ris_elements());
        for (int m = 0; m < cfg.ris_elements(); ++m)
            theta(m) = std::polar(mag(rng), phase(rng));
        const CouplingScalars u = coupling_scalars(coupling, theta);
        for (int k = 0; k < cfg.n_users; ++k)
            for (Eigen::Index i = 0; i < u[k].rows(); ++i)
                for (int j = 0; j < cfg.n_tx; ++j) {
                    const double bound =
                        coupling.vec(k, static_cast<int>(i), j).cwiseAbs().sum();
                    CHECK(std::abs(u[k](i, j)) <= bound * (1.0 + 1e-12));
                }
    }
}
