#include "risoam/geometry.hpp"

#include <cmath>

namespace risoam {

Eigen::Matrix3d rotation_z(double angle)
{
    if (!std::isfinite(angle))
        throw std::invalid_argument("rotation angle must be finite");
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix3d q;
    q << c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0;
    return q;
}

TransmitterGeometry build_transmitter(const ScenarioConfig &cfg)
{
    if (cfg.n_tx < 1)
        throw std::invalid_argument("transmitter needs at least one element");
    if (!(cfg.tx_radius > 0.0))
        throw std::invalid_argument("transmitter radius must be positive");

    TransmitterGeometry geom;
    geom.n_elements = cfg.n_tx;
    geom.radius = cfg.tx_radius;
    geom.rotation = std::atan2(cfg.ris_x, cfg.ris_y);

    const Eigen::Matrix3d q = rotation_z(geom.rotation);
    geom.angles.resize(cfg.n_tx);
    geom.elements.resize(cfg.n_tx);
    for (int n = 0; n < cfg.n_tx; ++n) {
        geom.angles[n] = 2.0 * kPi * n / cfg.n_tx;
        Eigen::Vector3d local(cfg.tx_radius * std::cos(geom.angles[n]), 0.0,
                              cfg.tx_radius * std::sin(geom.angles[n]));
        geom.elements[n] = q * local;
    }
    return geom;
}

UserGeometry build_user(const ScenarioConfig &cfg, int user)
{
    if (user < 0 || user >= cfg.n_users)
        throw std::invalid_argument("user index out of range");
    if (cfg.n_rx < 1)
        throw std::invalid_argument("receiver needs at least one element");
    const double radius = cfg.user_radius.at(user);
    if (!(radius > 0.0))
        throw std::invalid_argument("receiver radius must be positive");

    UserGeometry geom;
    geom.user = user;
    geom.n_elements = cfg.n_rx;
    geom.radius = radius;
    geom.center = cfg.user_centers.at(user);
    geom.rotation = std::atan2(cfg.ris_x - geom.center.x(), geom.center.y() - cfg.ris_y);

    const Eigen::Matrix3d q = rotation_z(-geom.rotation);
    geom.angles.resize(cfg.n_rx);
    geom.elements.resize(cfg.n_rx);
    for (int n = 0; n < cfg.n_rx; ++n) {
        geom.angles[n] = 2.0 * kPi * n / cfg.n_rx;
        Eigen::Vector3d local(radius * std::cos(geom.angles[n]), 0.0,
                              radius * std::sin(geom.angles[n]));
        geom.elements[n] = q * local + geom.center;
    }
    return geom;
}

RisGeometry build_ris(const ScenarioConfig &cfg)
{
    if (cfg.ris.elements_y < 1 || cfg.ris.elements_z < 1)
        throw std::invalid_argument("ris grid dimensions must be positive");
    if (!(cfg.ris.spacing_y > 0.0) || !(cfg.ris.spacing_z > 0.0))
        throw std::invalid_argument("ris element spacings must be positive");

    RisGeometry geom;
    geom.elements_y = cfg.ris.elements_y;
    geom.elements_z = cfg.ris.elements_z;
    geom.spacing_y = cfg.ris.spacing_y;
    geom.spacing_z = cfg.ris.spacing_z;
    geom.center = Eigen::Vector3d(cfg.ris_x, cfg.ris_y, 0.0);

    // Centered grid in the plane x = ris_x, y index slowest.
    geom.elements.reserve(static_cast<std::size_t>(geom.elements_y) * geom.elements_z);
    for (int iy = 0; iy < geom.elements_y; ++iy) {
        const double dy = geom.spacing_y * (iy + 0.5 * (1.0 - geom.elements_y));
        for (int iz = 0; iz < geom.elements_z; ++iz) {
            const double dz = geom.spacing_z * (iz + 0.5 * (1.0 - geom.elements_z));
            geom.elements.emplace_back(cfg.ris_x, cfg.ris_y + dy, dz);
        }
    }
    return geom;
}

SceneGeometry build_scene(const ScenarioConfig &cfg)
{
    SceneGeometry scene;
    scene.tx = build_transmitter(cfg);
    scene.users.reserve(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k)
        scene.users.push_back(build_user(cfg, k));
    scene.ris = build_ris(cfg);
    return scene;
}

} // namespace risoam
