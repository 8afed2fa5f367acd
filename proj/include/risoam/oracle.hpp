#ifndef RISOAM_ORACLE_HPP
#define RISOAM_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "risoam/channel.hpp"
#include "risoam/config.hpp"
#include "risoam/fp_optimizer.hpp"

namespace risoam::oracle {

/// Evaluates mode couplings and rates straight from the channel matrices
/// (receive DFT x channel x reflection x channel x transmit IDFT), bypassing
/// the steering-vector path the optimizer uses. Verification route only.
class DirectEvaluator {
  public:
    DirectEvaluator(const ScenarioConfig &cfg, const SceneGeometry &scene);
    explicit DirectEvaluator(const ScenarioConfig &cfg);

    /// N_k x Nt coupling matrix of one user via full matrix products.
    Eigen::MatrixXcd couplings(int user, const Eigen::VectorXcd &theta) const;
    double sum_rate(const Eigen::VectorXd &p, const Eigen::VectorXcd &theta) const;

    const ScenarioConfig &config() const { return cfg_; }
    const ChannelSet &channels() const { return channels_; }
    const ModeBasis &basis() const { return basis_; }

  private:
    ScenarioConfig cfg_;
    ChannelSet channels_;
    ModeBasis basis_;
};

struct GridSpec {
    std::vector<double> power_levels; // shared level set, applied per mode
    int phase_levels = 4;             // equally spaced unit-modulus phases per element
    std::uint64_t cap = 10'000'000;   // refuse larger grids
};

struct GridResult {
    Eigen::VectorXd p;
    Eigen::VectorXcd theta;
    double best_rate = 0.0;
    std::uint64_t points_evaluated = 0;
};

/// Exhaustive maximization of the weighted sum rate over the finite grid.
/// Infeasible power combinations (budget violations) are skipped.
GridResult grid_search(const ScenarioConfig &cfg, const GridSpec &grid);

struct MonteCarloSpec {
    int draws = 100000;
    std::uint64_t seed = 1;
};

struct McModeStat {
    double sinr = 0.0;       // empirical
    double std_error = 0.0;  // standard error of the empirical SINR
    double signal_power = 0.0;
    double interference_noise_power = 0.0;
    bool unbounded = false;  // flagged when the interference-plus-noise power is zero
};

struct McResult {
    std::vector<std::vector<McModeStat>> stats; // per user, per detected mode
    int draws = 0;
};

/// Symbol-level simulation of the transmit/reflect/receive chain with Gaussian
/// symbols and per-element receive noise; measures per-mode signal and
/// interference-plus-noise powers.
McResult monte_carlo_sinr(const ScenarioConfig &cfg, const Eigen::VectorXd &p,
                          const Eigen::VectorXcd &theta, const MonteCarloSpec &spec);

/// Central finite differences per real coordinate.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd &)> &f,
                                     const Eigen::VectorXd &x, double step);

struct PgdInfo {
    int iterations = 0;
    double objective = 0.0;
    double kkt_residual = 0.0;
    bool hit_max_iterations = false;
};

/// Reference solver for the phase quadratic program: fixed-step projected
/// gradient with the step bounded by the largest eigenvalue estimate.
Eigen::VectorXcd projected_gradient_theta(const ThetaQp &qp, const Eigen::VectorXcd &theta_init,
                                          double tolerance, int max_iterations,
                                          PgdInfo *info = nullptr);

/// Largest-eigenvalue estimate of a Hermitian PSD matrix by power iteration.
double power_iteration_lmax(const Eigen::MatrixXcd &mat, int iterations = 200);

// --- Surrogate objective evaluators used by the stationarity checks ---

struct DetectedModeView {
    // u(i, j): coupling of detected mode i (local index within the stacked
    // detected-mode list) to transmit mode j; weight/noise are per entry.
    Eigen::MatrixXcd u;
    Eigen::VectorXd weight;
    Eigen::VectorXd noise;
    Eigen::VectorXi tx_mode; // global transmit mode of each detected mode
};

/// Stacks all (user, detected mode) pairs of a scenario coupling into one view.
DetectedModeView stack_detected_modes(const CouplingScalars &u, const ScenarioConfig &cfg);

/// Dual-transform objective in bits: sum of w*log2(1+nu) + (w/ln2)*(-nu +
/// (1+nu)*signal/(total+noise)). Its stationary point in nu is the SINR and
/// its stationary value is the weighted sum rate.
double dual_transform_value(const DetectedModeView &view, const Eigen::VectorXd &p,
                            const Eigen::VectorXd &nu);

/// Quadratic-transform objective of the power step (ratio sum rewritten with
/// the eta auxiliaries), as a function of p and eta at fixed nu.
double quadratic_transform_value(const DetectedModeView &view, const Eigen::VectorXd &p,
                                 const Eigen::VectorXd &nu, const Eigen::VectorXd &eta);

/// Phase-step surrogate at fixed complex eta: 2 Re(eta^* amplitude(theta))
/// - |eta|^2 (denominator(theta)). Differs from the negated quadratic model
/// by a theta-independent constant.
double theta_surrogate_value(const CouplingTensor &coupling, const Eigen::VectorXd &p,
                             const std::vector<Eigen::VectorXd> &nu_theta,
                             const std::vector<Eigen::VectorXcd> &eta_theta,
                             const ScenarioConfig &cfg, const Eigen::VectorXcd &theta);

namespace ref {
GridResult grid_search(const ScenarioConfig &cfg, const GridSpec &grid);
McResult monte_carlo_sinr(const ScenarioConfig &cfg, const Eigen::VectorXd &p,
                          const Eigen::VectorXcd &theta, const MonteCarloSpec &spec);
} // namespace ref

} // namespace risoam::oracle

#endif
