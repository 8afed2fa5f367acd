#ifndef RISOAM_FP_OPTIMIZER_HPP
#define RISOAM_FP_OPTIMIZER_HPP

#include <string>
#include <vector>

#include "risoam/channel.hpp"
#include "risoam/config.hpp"
#include "risoam/rate.hpp"

namespace risoam {

/// Quadratic model of the phase subproblem: minimize theta^H U theta
/// - 2 Re(theta^H v) over the per-element unit disk.
struct ThetaQp {
    Eigen::MatrixXcd U; // M x M Hermitian positive semidefinite
    Eigen::VectorXcd v;
};

struct SolverState {
    PowerAllocation power;
    PhaseVector theta;
    std::vector<Eigen::VectorXd> nu;         // power-step SINR auxiliaries
    std::vector<Eigen::VectorXd> eta;        // power-step ratio auxiliaries
    std::vector<Eigen::VectorXd> nu_theta;   // phase-step twins
    std::vector<Eigen::VectorXcd> eta_theta; // complex: modulus matches the closed form,
                                             // phase carries the current coupling phase
    int iteration = 0;
    std::vector<double> objective_history;
    bool power_stalled = false;
};

struct IterationRecord {
    int iter = 0;
    double sum_rate = 0.0;
    std::vector<double> user_rates;
    double total_power = 0.0;
    double max_power = 0.0;
    double max_abs_theta = 0.0;
};

using IterationTrace = std::vector<IterationRecord>;

struct SolveResult {
    SolverState state;
    IterationTrace trace;
    RateReport report;
    bool converged = false;
    int iterations = 0;
    int power_steps_rejected = 0;
    int theta_steps_rejected = 0;
    std::vector<std::string> warnings;
};

struct ThetaSolveInfo {
    int sweeps = 0;
    double objective = 0.0;
    double kkt_residual = 0.0;
    bool hit_max_sweeps = false;
};

/// nu update: the stationary point in nu of the dual-transform objective,
/// which is the current SINR of every detected mode.
std::vector<Eigen::VectorXd> update_nu(const Eigen::VectorXd &p, const CouplingScalars &u,
                                       const ScenarioConfig &cfg);

/// eta update: closed-form ratio auxiliary of the quadratic transform.
std::vector<Eigen::VectorXd> update_eta(const Eigen::VectorXd &p, const CouplingScalars &u,
                                        const std::vector<Eigen::VectorXd> &nu,
                                        const ScenarioConfig &cfg);

/// Closed-form power update followed by budget enforcement. If every eta is
/// zero the previous powers are kept and *stalled is set.
PowerAllocation update_power(const PowerAllocation &previous, const CouplingScalars &u,
                             const std::vector<Eigen::VectorXd> &nu,
                             const std::vector<Eigen::VectorXd> &eta,
                             const ScenarioConfig &cfg, bool *stalled = nullptr);

/// Phase-step auxiliaries. Same closed form as update_eta in modulus; the
/// complex value carries e^{j arg(u)} of the direct coupling so the linear
/// term of the quadratic model touches the surrogate at the current phases.
std::vector<Eigen::VectorXcd> update_eta_theta(const Eigen::VectorXd &p, const CouplingScalars &u,
                                               const std::vector<Eigen::VectorXd> &nu_theta,
                                               const ScenarioConfig &cfg);

ThetaQp build_theta_qp(const CouplingTensor &coupling, const Eigen::VectorXd &p,
                       const std::vector<Eigen::VectorXd> &nu_theta,
                       const std::vector<Eigen::VectorXcd> &eta_theta,
                       const ScenarioConfig &cfg);

namespace ref {
// Serial rank-1-accumulation reference for the quadratic-model assembly.
ThetaQp build_theta_qp(const CouplingTensor &coupling, const Eigen::VectorXd &p,
                       const std::vector<Eigen::VectorXd> &nu_theta,
                       const std::vector<Eigen::VectorXcd> &eta_theta,
                       const ScenarioConfig &cfg);
} // namespace ref

double theta_qp_objective(const ThetaQp &qp, const Eigen::VectorXcd &theta);

/// Max per-element KKT residual of the disk-constrained quadratic program.
double theta_qp_kkt_residual(const ThetaQp &qp, const Eigen::VectorXcd &theta);

/// Cyclic block-coordinate descent on the phase quadratic program. Each
/// element is minimized exactly (closed form with unit-disk projection);
/// sweeps stop once the KKT residual falls below tolerance * gradient scale.
Eigen::VectorXcd solve_theta_qp(const ThetaQp &qp, const Eigen::VectorXcd &theta_init,
                                double tolerance, int max_sweeps,
                                ThetaSolveInfo *info = nullptr);

/// Alternating optimization of powers and phases. Each block update is
/// accepted only if it does not decrease the weighted sum rate, so the
/// objective history is non-decreasing by construction.
SolveResult alternating_optimize(const ScenarioConfig &cfg);
SolveResult alternating_optimize(const ScenarioConfig &cfg, const SolverOptions &opts);

} // namespace risoam

#endif
