#ifndef RISOAM_GEOMETRY_HPP
#define RISOAM_GEOMETRY_HPP

#include <vector>

#include "risoam/config.hpp"

namespace risoam {

struct TransmitterGeometry {
    int n_elements = 0;
    double radius = 0.0;
    double rotation = 0.0;             // rotation of the circle plane about z
    std::vector<double> angles;        // element angular positions, 2*pi*(n-1)/N
    std::vector<Eigen::Vector3d> elements;
};

struct UserGeometry {
    int user = 0; // zero-based user index
    int n_elements = 0;
    double radius = 0.0;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double rotation = 0.0;
    std::vector<double> angles;
    std::vector<Eigen::Vector3d> elements;
};

struct RisGeometry {
    int elements_y = 0;
    int elements_z = 0;
    double spacing_y = 0.0;
    double spacing_z = 0.0;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    // Flattened with the y index slowest: element (iy, iz) sits at iy*elements_z + iz.
    std::vector<Eigen::Vector3d> elements;
};

struct SceneGeometry {
    TransmitterGeometry tx;
    std::vector<UserGeometry> users;
    RisGeometry ris;
};

/// Rotation about the z axis, [[cos, sin, 0], [-sin, cos, 0], [0, 0, 1]].
Eigen::Matrix3d rotation_z(double angle);

TransmitterGeometry build_transmitter(const ScenarioConfig &cfg);
UserGeometry build_user(const ScenarioConfig &cfg, int user); // user in [0, K)
RisGeometry build_ris(const ScenarioConfig &cfg);
SceneGeometry build_scene(const ScenarioConfig &cfg);

} // namespace risoam

#endif
