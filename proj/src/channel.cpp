#include "risoam/channel.hpp"

#include <cmath>
#include <set>

namespace risoam {

namespace {

cxd path_gain(const Eigen::Vector3d &from, const Eigen::Vector3d &to, double wavelength,
              double attenuation)
{
    const double d = (to - from).norm();
    if (!(d > 0.0))
        throw std::invalid_argument("coincident element positions: zero-distance path");
    const double amp = attenuation * wavelength / (4.0 * kPi * d);
    const double phase = -2.0 * kPi * d / wavelength;
    return std::polar(amp, phase);
}

void check_mode_partition(const ScenarioConfig &cfg)
{
    std::set<int> seen;
    for (const auto &set : cfg.mode_sets) {
        for (int mode : set) {
            if (mode < 0 || mode >= cfg.n_tx)
                throw std::invalid_argument("mode index out of range");
            if (!seen.insert(mode).second)
                throw std::invalid_argument("mode assigned to more than one user");
        }
    }
}

} // namespace

ChannelSet build_channels(const SceneGeometry &scene, const ScenarioConfig &cfg)
{
    const int m_total = static_cast<int>(scene.ris.elements.size());
    const int n_tx = scene.tx.n_elements;
    const double wl = cfg.wavelength();
    const double beta = cfg.attenuation;

    ChannelSet ch;
    ch.wavelength = wl;
    ch.attenuation = beta;
    ch.g.resize(m_total, n_tx);
    ch.h.resize(scene.users.size());
    for (std::size_t k = 0; k < scene.users.size(); ++k)
        ch.h[k].resize(scene.users[k].n_elements, m_total);

#pragma omp parallel for schedule(static)
    for (int m = 0; m < m_total; ++m) {
        const Eigen::Vector3d &ris_el = scene.ris.elements[m];
        for (int n = 0; n < n_tx; ++n)
            ch.g(m, n) = path_gain(scene.tx.elements[n], ris_el, wl, beta);
        for (std::size_t k = 0; k < scene.users.size(); ++k) {
            const UserGeometry &user = scene.users[k];
            for (int q = 0; q < user.n_elements; ++q)
                ch.h[k](q, m) = path_gain(ris_el, user.elements[q], wl, beta);
        }
    }
    return ch;
}

ChannelSet ref::build_channels(const SceneGeometry &scene, const ScenarioConfig &cfg)
{
    const int m_total = static_cast<int>(scene.ris.elements.size());
    const int n_tx = scene.tx.n_elements;
    const double wl = cfg.wavelength();
    const double beta = cfg.attenuation;

    ChannelSet ch;
    ch.wavelength = wl;
    ch.attenuation = beta;
    ch.g.resize(m_total, n_tx);
    for (int m = 0; m < m_total; ++m)
        for (int n = 0; n < n_tx; ++n)
            ch.g(m, n) = path_gain(scene.tx.elements[n], scene.ris.elements[m], wl, beta);
    ch.h.resize(scene.users.size());
    for (std::size_t k = 0; k < scene.users.size(); ++k) {
        const UserGeometry &user = scene.users[k];
        ch.h[k].resize(user.n_elements, m_total);
        for (int q = 0; q < user.n_elements; ++q)
            for (int m = 0; m < m_total; ++m)
                ch.h[k](q, m) = path_gain(scene.ris.elements[m], user.elements[q], wl, beta);
    }
    return ch;
}

ModeBasis build_mode_basis(const ScenarioConfig &cfg)
{
    check_mode_partition(cfg);

    ModeBasis basis;
    basis.mode_sets = cfg.mode_sets;
    basis.tx.resize(cfg.n_tx, cfg.n_tx);
    for (int l = 0; l < cfg.n_tx; ++l)
        for (int n = 0; n < cfg.n_tx; ++n)
            basis.tx(n, l) = std::polar(1.0, l * 2.0 * kPi * n / cfg.n_tx);

    basis.rx.resize(cfg.mode_sets.size());
    for (std::size_t k = 0; k < cfg.mode_sets.size(); ++k) {
        const auto &modes = cfg.mode_sets[k];
        basis.rx[k].resize(cfg.n_rx, static_cast<Eigen::Index>(modes.size()));
        for (std::size_t i = 0; i < modes.size(); ++i)
            for (int q = 0; q < cfg.n_rx; ++q)
                basis.rx[k](q, static_cast<Eigen::Index>(i)) =
                    std::polar(1.0, modes[i] * 2.0 * kPi * q / cfg.n_rx);
    }
    return basis;
}

CouplingTensor build_coupling(const ChannelSet &ch, const ModeBasis &basis)
{
    const int m_total = static_cast<int>(ch.g.rows());
    const int n_tx = static_cast<int>(ch.g.cols());
    const int n_users = static_cast<int>(ch.h.size());
    const int n_rx = n_users ? static_cast<int>(ch.h[0].rows()) : 0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_rx) * n_tx);

    CouplingTensor coupling;
    coupling.m = m_total;
    coupling.n_tx = n_tx;
    coupling.a.resize(n_users);

    // G applied to every transmit mode vector, shared across users.
    const Eigen::MatrixXcd tx_side = ch.g * basis.tx; // M x Nt

    for (int k = 0; k < n_users; ++k) {
        const int n_modes = static_cast<int>(basis.rx[k].cols());
        coupling.n_modes.push_back(n_modes);
        // Column i: receive combining of detected mode i along the RIS, (w^H H)^T.
        const Eigen::MatrixXcd rx_side = ch.h[k].transpose() * basis.rx[k].conjugate(); // M x N_k
        Eigen::MatrixXcd &a_k = coupling.a[k];
        a_k.resize(m_total, static_cast<Eigen::Index>(n_modes) * n_tx);
#pragma omp parallel for schedule(static)
        for (int col = 0; col < n_modes * n_tx; ++col) {
            const int i = col / n_tx;
            const int j = col % n_tx;
            a_k.col(col) = scale * rx_side.col(i).cwiseProduct(tx_side.col(j));
        }
    }
    return coupling;
}

CouplingTensor ref::build_coupling(const ChannelSet &ch, const ModeBasis &basis)
{
    const int m_total = static_cast<int>(ch.g.rows());
    const int n_tx = static_cast<int>(ch.g.cols());
    const int n_users = static_cast<int>(ch.h.size());
    const int n_rx = n_users ? static_cast<int>(ch.h[0].rows()) : 0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_rx) * n_tx);

    CouplingTensor coupling;
    coupling.m = m_total;
    coupling.n_tx = n_tx;
    coupling.a.resize(n_users);
    for (int k = 0; k < n_users; ++k) {
        const int n_modes = static_cast<int>(basis.rx[k].cols());
        coupling.n_modes.push_back(n_modes);
        Eigen::MatrixXcd &a_k = coupling.a[k];
        a_k.resize(m_total, static_cast<Eigen::Index>(n_modes) * n_tx);
        for (int i = 0; i < n_modes; ++i) {
            for (int j = 0; j < n_tx; ++j) {
                for (int m = 0; m < m_total; ++m) {
                    cxd rx_part = 0.0;
                    for (int q = 0; q < n_rx; ++q)
                        rx_part += std::conj(basis.rx[k](q, i)) * ch.h[k](q, m);
                    cxd tx_part = 0.0;
                    for (int n = 0; n < n_tx; ++n)
                        tx_part += ch.g(m, n) * basis.tx(n, j);
                    a_k(m, static_cast<Eigen::Index>(i) * n_tx + j) = scale * rx_part * tx_part;
                }
            }
        }
    }
    return coupling;
}

CouplingScalars coupling_scalars(const CouplingTensor &coupling, const Eigen::VectorXcd &theta)
{
    if (theta.size() != coupling.m)
        throw std::invalid_argument("phase vector length does not match the coupling tensor");

    CouplingScalars u(coupling.a.size());
    for (std::size_t k = 0; k < coupling.a.size(); ++k) {
        const int n_modes = coupling.n_modes[k];
        const Eigen::RowVectorXcd flat = theta.adjoint() * coupling.a[k];
        u[k].resize(n_modes, coupling.n_tx);
        for (int i = 0; i < n_modes; ++i)
            for (int j = 0; j < coupling.n_tx; ++j)
                u[k](i, j) = flat(static_cast<Eigen::Index>(i) * coupling.n_tx + j);
    }
    return u;
}

} // namespace risoam
