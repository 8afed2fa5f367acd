#ifndef RISOAM_CHANNEL_HPP
#define RISOAM_CHANNEL_HPP

#include <vector>

#include "risoam/geometry.hpp"

namespace risoam {

/// Free-space channel matrices of the two reflected hops.
struct ChannelSet {
    Eigen::MatrixXcd g;              // M x Nt, transmitter -> RIS
    std::vector<Eigen::MatrixXcd> h; // per user, Nr x M, RIS -> user
    double wavelength = 0.0;
    double attenuation = 1.0;
};

/// DFT/IDFT vectors of the circular arrays, unit-modulus entries.
struct ModeBasis {
    Eigen::MatrixXcd tx;                     // Nt x Nt, column l is the transmit vector of mode l
    std::vector<Eigen::MatrixXcd> rx;        // per user, Nr x N_k, column i is the vector of mode_sets[k][i]
    std::vector<std::vector<int>> mode_sets; // global mode indices per user
};

/// Steering vectors of the phase-shift variable: one M-entry vector per
/// (user, detected mode, transmit mode). Independent of both the power vector
/// and the phase vector.
struct CouplingTensor {
    int m = 0;
    int n_tx = 0;
    std::vector<int> n_modes;        // N_k per user
    // Per user: M x (N_k * Nt); column i * Nt + j holds the vector for
    // detected mode mode_sets[k][i] and transmit mode j.
    std::vector<Eigen::MatrixXcd> a;

    const Eigen::MatrixXcd::ConstColXpr vec(int k, int det, int tx_mode) const
    {
        return a[k].col(det * n_tx + tx_mode);
    }
};

/// RIS reflection coefficients; each entry must stay inside the unit disk.
struct PhaseVector {
    Eigen::VectorXcd theta;

    static PhaseVector ones(int m) { return {Eigen::VectorXcd::Ones(m)}; }

    double max_abs() const { return theta.size() ? theta.cwiseAbs().maxCoeff() : 0.0; }
    bool feasible(double tol = 1e-12) const { return max_abs() <= 1.0 + tol; }
};

/// Mode-domain couplings at a given phase vector, u = theta^H a.
/// Per user: N_k x Nt, row i is detected mode mode_sets[k][i].
using CouplingScalars = std::vector<Eigen::MatrixXcd>;

ChannelSet build_channels(const SceneGeometry &scene, const ScenarioConfig &cfg);
ModeBasis build_mode_basis(const ScenarioConfig &cfg);
CouplingTensor build_coupling(const ChannelSet &ch, const ModeBasis &basis);
CouplingScalars coupling_scalars(const CouplingTensor &coupling, const Eigen::VectorXcd &theta);

namespace ref {
// Serial reference implementations, kept for testing the parallel kernels.
ChannelSet build_channels(const SceneGeometry &scene, const ScenarioConfig &cfg);
CouplingTensor build_coupling(const ChannelSet &ch, const ModeBasis &basis);
} // namespace ref

} // namespace risoam

#endif
