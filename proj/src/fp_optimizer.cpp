#include "risoam/fp_optimizer.hpp"

#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>

namespace risoam {

namespace {

// Interference-plus-noise-plus-signal denominator of detected mode (k, i):
// sum over every transmit mode plus the user's noise power.
double total_received(const Eigen::VectorXd &p, const Eigen::MatrixXcd &u_k, int i,
                      double noise)
{
    double acc = noise;
    for (int j = 0; j < u_k.cols(); ++j)
        acc += p(j) * std::norm(u_k(i, j));
    return acc;
}

} // namespace

std::vector<Eigen::VectorXd> update_nu(const Eigen::VectorXd &p, const CouplingScalars &u,
                                       const ScenarioConfig &cfg)
{
    std::vector<Eigen::VectorXd> nu(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        const int n_modes = static_cast<int>(u[k].rows());
        nu[k].resize(n_modes);
        for (int i = 0; i < n_modes; ++i) {
            const int own = cfg.mode_sets[k][i];
            const double signal = p(own) * std::norm(u[k](i, own));
            const double denom = total_received(p, u[k], i, cfg.noise_power[k]) - signal;
            nu[k](i) = signal / denom;
        }
    }
    return nu;
}

std::vector<Eigen::VectorXd> update_eta(const Eigen::VectorXd &p, const CouplingScalars &u,
                                        const std::vector<Eigen::VectorXd> &nu,
                                        const ScenarioConfig &cfg)
{
    std::vector<Eigen::VectorXd> eta(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        const int n_modes = static_cast<int>(u[k].rows());
        eta[k].resize(n_modes);
        for (int i = 0; i < n_modes; ++i) {
            const int own = cfg.mode_sets[k][i];
            const double num =
                std::sqrt(cfg.weights[k] * (1.0 + nu[k](i)) * p(own) * std::norm(u[k](i, own)));
            eta[k](i) = num / total_received(p, u[k], i, cfg.noise_power[k]);
        }
    }
    return eta;
}

PowerAllocation update_power(const PowerAllocation &previous, const CouplingScalars &u,
                             const std::vector<Eigen::VectorXd> &nu,
                             const std::vector<Eigen::VectorXd> &eta,
                             const ScenarioConfig &cfg, bool *stalled)
{
    if (stalled)
        *stalled = false;
    const double budget = previous.budget;

    double eta_total = 0.0;
    for (const auto &e : eta)
        eta_total += e.cwiseAbs().sum();
    if (eta_total == 0.0) {
        if (stalled)
            *stalled = true;
        return previous;
    }

    // Per transmit mode: sum of eta^2 |u(i, j)|^2 over every detected mode.
    Eigen::VectorXd denom = Eigen::VectorXd::Zero(cfg.n_tx);
    for (int k = 0; k < cfg.n_users; ++k)
        for (int i = 0; i < eta[k].size(); ++i)
            for (int j = 0; j < cfg.n_tx; ++j)
                denom(j) += eta[k](i) * eta[k](i) * std::norm(u[k](i, j));

    // Linear coefficient of the surrogate in sqrt(p): the stationary point of
    // an unconstrained mode is (b / denom)^2, the closed-form expression.
    Eigen::VectorXd b = Eigen::VectorXd::Zero(cfg.n_tx);
    for (int k = 0; k < cfg.n_users; ++k) {
        for (int i = 0; i < eta[k].size(); ++i) {
            const int own = cfg.mode_sets[k][i];
            b(own) = eta[k](i) * std::sqrt(cfg.weights[k] * (1.0 + nu[k](i))) *
                     std::abs(u[k](i, own));
        }
    }

    PowerAllocation next;
    next.budget = budget;
    next.p = Eigen::VectorXd::Zero(cfg.n_tx);

    if (cfg.solver.budget_mode == PowerBudgetMode::PerModeClip) {
        for (int j = 0; j < cfg.n_tx; ++j)
            next.p(j) = denom(j) > 0.0
                            ? std::min(budget, (b(j) / denom(j)) * (b(j) / denom(j)))
                            : 0.0;
        return next;
    }

    // Total-budget mode: exact maximizer of the concave separable surrogate
    // under sum(p) <= budget. With a slack budget this is the closed form;
    // otherwise a single multiplier mu shifts every denominator, and the
    // budget pins mu by bisection.
    auto powers_at = [&](double mu) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.n_tx);
        for (int j = 0; j < cfg.n_tx; ++j) {
            const double d = denom(j) + mu;
            if (b(j) > 0.0 && d > 0.0)
                p(j) = (b(j) / d) * (b(j) / d);
        }
        return p;
    };

    next.p = powers_at(0.0);
    const double unconstrained_total = next.p.sum();
    if (unconstrained_total > budget) {
        double lo = 0.0;
        double hi = std::max(1.0, denom.maxCoeff());
        while (powers_at(hi).sum() > budget)
            hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (powers_at(mid).sum() > budget ? lo : hi) = mid;
        }
        next.p = powers_at(hi); // feasible side of the bracket
        const double total = next.p.sum();
        if (total > budget)
            next.p *= budget / total;
    }
    return next;
}

std::vector<Eigen::VectorXcd> update_eta_theta(const Eigen::VectorXd &p, const CouplingScalars &u,
                                               const std::vector<Eigen::VectorXd> &nu_theta,
                                               const ScenarioConfig &cfg)
{
    std::vector<Eigen::VectorXcd> eta(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        const int n_modes = static_cast<int>(u[k].rows());
        eta[k].resize(n_modes);
        for (int i = 0; i < n_modes; ++i) {
            const int own = cfg.mode_sets[k][i];
            const cxd amplitude = std::sqrt(cfg.weights[k] * (1.0 + nu_theta[k](i)) * p(own)) *
                                  u[k](i, own);
            eta[k](i) = amplitude / total_received(p, u[k], i, cfg.noise_power[k]);
        }
    }
    return eta;
}

ThetaQp build_theta_qp(const CouplingTensor &coupling, const Eigen::VectorXd &p,
                       const std::vector<Eigen::VectorXd> &nu_theta,
                       const std::vector<Eigen::VectorXcd> &eta_theta,
                       const ScenarioConfig &cfg)
{
    const int m_total = coupling.m;
    ThetaQp qp;
    qp.U = Eigen::MatrixXcd::Zero(m_total, m_total);
    qp.v = Eigen::VectorXcd::Zero(m_total);

    // Column weights |eta|^2 * p_j, flattened like the coupling storage.
    std::vector<Eigen::VectorXd> col_weight(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        const int n_modes = coupling.n_modes[k];
        col_weight[k].resize(static_cast<Eigen::Index>(n_modes) * coupling.n_tx);
        for (int i = 0; i < n_modes; ++i) {
            const double w = std::norm(eta_theta[k](i));
            for (int j = 0; j < coupling.n_tx; ++j)
                col_weight[k](static_cast<Eigen::Index>(i) * coupling.n_tx + j) = w * p(j);
        }
    }

#pragma omp parallel for schedule(static)
    for (int c = 0; c < m_total; ++c) {
        for (int k = 0; k < cfg.n_users; ++k) {
            const Eigen::MatrixXcd &a_k = coupling.a[k];
            for (Eigen::Index t = 0; t < a_k.cols(); ++t) {
                const double w = col_weight[k](t);
                if (w == 0.0)
                    continue;
                const cxd alpha = w * std::conj(a_k(c, t));
                qp.U.col(c) += alpha * a_k.col(t);
            }
        }
    }

    for (int k = 0; k < cfg.n_users; ++k) {
        for (int i = 0; i < coupling.n_modes[k]; ++i) {
            const int own = cfg.mode_sets[k][i];
            const double c = std::sqrt(cfg.weights[k] * (1.0 + nu_theta[k](i)) * p(own));
            qp.v += c * std::conj(eta_theta[k](i)) * coupling.vec(k, i, own);
        }
    }
    return qp;
}

ThetaQp ref::build_theta_qp(const CouplingTensor &coupling, const Eigen::VectorXd &p,
                            const std::vector<Eigen::VectorXd> &nu_theta,
                            const std::vector<Eigen::VectorXcd> &eta_theta,
                            const ScenarioConfig &cfg)
{
    const int m_total = coupling.m;
    ThetaQp qp;
    qp.U = Eigen::MatrixXcd::Zero(m_total, m_total);
    qp.v = Eigen::VectorXcd::Zero(m_total);
    for (int k = 0; k < cfg.n_users; ++k) {
        for (int i = 0; i < coupling.n_modes[k]; ++i) {
            Eigen::MatrixXcd inner = Eigen::MatrixXcd::Zero(m_total, m_total);
            for (int j = 0; j < coupling.n_tx; ++j) {
                const auto a = coupling.vec(k, i, j);
                inner += p(j) * (a * a.adjoint());
            }
            qp.U += std::norm(eta_theta[k](i)) * inner;
            const int own = cfg.mode_sets[k][i];
            const double c = std::sqrt(cfg.weights[k] * (1.0 + nu_theta[k](i)) * p(own));
            qp.v += c * std::conj(eta_theta[k](i)) * coupling.vec(k, i, own);
        }
    }
    return qp;
}

double theta_qp_objective(const ThetaQp &qp, const Eigen::VectorXcd &theta)
{
    const cxd quad = theta.dot(qp.U * theta);
    const cxd lin = theta.dot(qp.v);
    return quad.real() - 2.0 * lin.real();
}

double theta_qp_kkt_residual(const ThetaQp &qp, const Eigen::VectorXcd &theta)
{
    const Eigen::VectorXcd r = qp.U * theta - qp.v;
    double worst = 0.0;
    for (Eigen::Index m = 0; m < theta.size(); ++m) {
        const double mag = std::abs(theta(m));
        double res;
        if (mag < 1.0 - 1e-9) {
            res = std::abs(r(m));
        } else {
            // On the boundary the residual must point inward along -theta.
            const double mu = -(r(m) * std::conj(theta(m))).real() / (mag * mag);
            res = mu >= 0.0 ? std::abs(r(m) + mu * theta(m)) : std::abs(r(m));
        }
        worst = std::max(worst, res);
    }
    return worst;
}

Eigen::VectorXcd solve_theta_qp(const ThetaQp &qp, const Eigen::VectorXcd &theta_init,
                                double tolerance, int max_sweeps, ThetaSolveInfo *info)
{
    const Eigen::Index m_total = qp.v.size();
    if (qp.U.rows() != m_total || qp.U.cols() != m_total || theta_init.size() != m_total)
        throw std::invalid_argument("theta subproblem dimension mismatch");

    Eigen::VectorXcd theta = theta_init;
    // Gradient magnitude scale, so the stopping rule survives badly scaled scenarios.
    const double grad_scale =
        qp.v.cwiseAbs().maxCoeff() + qp.U.cwiseAbs().rowwise().sum().maxCoeff() + DBL_MIN;
    const double stop = tolerance * grad_scale;

    ThetaSolveInfo local;
    local.hit_max_sweeps = true;
    Eigen::VectorXcd w = qp.U * theta;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Eigen::Index m = 0; m < m_total; ++m) {
            const cxd c = qp.v(m) - (w(m) - qp.U(m, m) * theta(m));
            const double umm = qp.U(m, m).real();
            cxd updated = theta(m);
            if (umm > 0.0) {
                updated = c / umm;
                const double mag = std::abs(updated);
                if (mag > 1.0)
                    updated /= mag;
            } else if (std::abs(c) > 0.0) {
                updated = c / std::abs(c);
            }
            const cxd delta = updated - theta(m);
            if (delta != cxd(0.0, 0.0)) {
                w += delta * qp.U.col(m);
                theta(m) = updated;
            }
        }
        // Resynchronize the running product and test optimality.
        w = qp.U * theta;
        local.sweeps = sweep + 1;
        local.kkt_residual = theta_qp_kkt_residual(qp, theta);
        if (local.kkt_residual <= stop) {
            local.hit_max_sweeps = false;
            break;
        }
    }
    local.objective = theta_qp_objective(qp, theta);
    if (info)
        *info = local;
    return theta;
}

namespace {

Eigen::VectorXcd initial_theta(int m_total, const SolverOptions &opts)
{
    if (opts.theta_init == ThetaInit::Ones)
        return Eigen::VectorXcd::Ones(m_total);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    Eigen::VectorXcd theta(m_total);
    for (int m = 0; m < m_total; ++m)
        theta(m) = std::polar(1.0, phase(rng));
    return theta;
}

Eigen::VectorXd initial_power(const ScenarioConfig &cfg)
{
    // Uniform split of the budget across the mode range; unassigned modes
    // carry no signal and start (and stay) at zero.
    Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.n_tx);
    const double share = cfg.total_power_linear() / cfg.n_tx;
    for (const auto &set : cfg.mode_sets)
        for (int mode : set)
            p(mode) = share;
    return p;
}

IterationRecord make_record(int iter, const Eigen::VectorXd &p, const CouplingScalars &u,
                            const PhaseVector &theta, const ScenarioConfig &cfg)
{
    IterationRecord rec;
    rec.iter = iter;
    RateReport report = rate_report(p, u, cfg);
    rec.sum_rate = report.weighted_sum;
    rec.user_rates = report.user_rates;
    rec.total_power = p.sum();
    rec.max_power = p.maxCoeff();
    rec.max_abs_theta = theta.max_abs();
    return rec;
}

} // namespace

SolveResult alternating_optimize(const ScenarioConfig &cfg)
{
    return alternating_optimize(cfg, cfg.solver);
}

SolveResult alternating_optimize(const ScenarioConfig &cfg, const SolverOptions &opts)
{
    opts.validate();
    const SceneGeometry scene = build_scene(cfg);
    const ChannelSet channels = build_channels(scene, cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    const CouplingTensor coupling = build_coupling(channels, basis);
    const int m_total = cfg.ris_elements();

    SolveResult result;
    SolverState &state = result.state;
    state.theta.theta = initial_theta(m_total, opts);
    state.power.p = initial_power(cfg);
    state.power.budget = cfg.total_power_linear();

    CouplingScalars u = coupling_scalars(coupling, state.theta.theta);
    double objective = weighted_sum_rate(state.power.p, u, cfg);
    state.objective_history.push_back(objective);
    result.trace.push_back(make_record(0, state.power.p, u, state.theta, cfg));

    bool warned_inner = false;
    for (int t = 1; t <= opts.max_iterations; ++t) {
        const double previous = objective;

        if (opts.scheme != Scheme::PhaseOnly) {
            state.nu = update_nu(state.power.p, u, cfg);
            state.eta = update_eta(state.power.p, u, state.nu, cfg);
            bool stalled = false;
            PowerAllocation candidate =
                update_power(state.power, u, state.nu, state.eta, cfg, &stalled);
            state.power_stalled = stalled;
            const double candidate_objective = weighted_sum_rate(candidate.p, u, cfg);
            // The uniform budget rescale is not an exact surrogate maximizer,
            // so a candidate that loses rate is discarded.
            if (candidate_objective >= objective) {
                state.power = std::move(candidate);
                objective = candidate_objective;
            } else {
                ++result.power_steps_rejected;
            }
        }

        if (opts.scheme != Scheme::PowerOnly) {
            state.nu_theta = update_nu(state.power.p, u, cfg);
            state.eta_theta = update_eta_theta(state.power.p, u, state.nu_theta, cfg);
            const ThetaQp qp =
                build_theta_qp(coupling, state.power.p, state.nu_theta, state.eta_theta, cfg);
            ThetaSolveInfo inner;
            Eigen::VectorXcd candidate = solve_theta_qp(qp, state.theta.theta,
                                                        opts.inner_tolerance,
                                                        opts.inner_max_sweeps, &inner);
            if (inner.hit_max_sweeps && !warned_inner) {
                warned_inner = true;
                std::ostringstream os;
                os << "phase subproblem hit the sweep cap at iteration " << t
                   << " (kkt residual " << inner.kkt_residual << ")";
                result.warnings.push_back(os.str());
            }
            CouplingScalars u_candidate = coupling_scalars(coupling, candidate);
            const double candidate_objective =
                weighted_sum_rate(state.power.p, u_candidate, cfg);
            if (candidate_objective >= objective) {
                state.theta.theta = std::move(candidate);
                u = std::move(u_candidate);
                objective = candidate_objective;
            } else {
                ++result.theta_steps_rejected;
            }
        }

        if (!std::isfinite(objective))
            throw SolverError("weighted sum rate became non-finite at iteration " +
                              std::to_string(t));

        state.iteration = t;
        state.objective_history.push_back(objective);
        result.trace.push_back(make_record(t, state.power.p, u, state.theta, cfg));
        result.iterations = t;
        if (relative_change(objective, previous) <= opts.tolerance) {
            result.converged = true;
            break;
        }
    }

    result.report = rate_report(state.power.p, u, cfg);
    return result;
}

} // namespace risoam
