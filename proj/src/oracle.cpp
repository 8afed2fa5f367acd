#include "risoam/oracle.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <random>

#include "risoam/geometry.hpp"
#include "risoam/rate.hpp"

namespace risoam::oracle {

DirectEvaluator::DirectEvaluator(const ScenarioConfig &cfg, const SceneGeometry &scene)
    : cfg_(cfg), channels_(risoam::ref::build_channels(scene, cfg)),
      basis_(build_mode_basis(cfg))
{
}

DirectEvaluator::DirectEvaluator(const ScenarioConfig &cfg)
    : DirectEvaluator(cfg, build_scene(cfg))
{
}

Eigen::MatrixXcd DirectEvaluator::couplings(int user, const Eigen::VectorXcd &theta) const
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.n_rx) * cfg_.n_tx);
    // Receive DFT x channel x reflection x channel x transmit IDFT, as one
    // chain of plain matrix products.
    return scale * (basis_.rx[user].adjoint() * channels_.h[user] *
                    theta.conjugate().asDiagonal() * channels_.g * basis_.tx);
}

double DirectEvaluator::sum_rate(const Eigen::VectorXd &p, const Eigen::VectorXcd &theta) const
{
    double total = 0.0;
    for (int k = 0; k < cfg_.n_users; ++k) {
        const Eigen::MatrixXcd u = couplings(k, theta);
        for (int i = 0; i < u.rows(); ++i) {
            const int own = cfg_.mode_sets[k][i];
            double denom = cfg_.noise_power[k];
            for (int j = 0; j < cfg_.n_tx; ++j)
                if (j != own)
                    denom += p(j) * std::norm(u(i, j));
            total += cfg_.weights[k] * std::log2(1.0 + p(own) * std::norm(u(i, own)) / denom);
        }
    }
    return total;
}

namespace {

std::vector<int> assigned_modes(const ScenarioConfig &cfg)
{
    std::vector<int> modes;
    for (const auto &set : cfg.mode_sets)
        modes.insert(modes.end(), set.begin(), set.end());
    return modes;
}

// All power vectors on the level grid that satisfy the configured budget.
std::vector<Eigen::VectorXd> enumerate_power_grid(const ScenarioConfig &cfg,
                                                  const GridSpec &grid)
{
    if (grid.power_levels.empty())
        throw std::invalid_argument("grid: need at least one power level");
    for (double level : grid.power_levels)
        if (!(level >= 0.0))
            throw std::invalid_argument("grid: power levels must be nonnegative");

    const std::vector<int> modes = assigned_modes(cfg);
    const double budget = cfg.total_power_linear();
    const std::size_t levels = grid.power_levels.size();

    std::vector<Eigen::VectorXd> combos;
    std::vector<std::size_t> digit(modes.size(), 0);
    while (true) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.n_tx);
        double total = 0.0;
        double max_mode = 0.0;
        for (std::size_t d = 0; d < modes.size(); ++d) {
            const double level = grid.power_levels[digit[d]];
            p(modes[d]) = level;
            total += level;
            max_mode = std::max(max_mode, level);
        }
        const bool feasible = cfg.solver.budget_mode == PowerBudgetMode::TotalProjection
                                  ? total <= budget * (1.0 + 1e-12)
                                  : max_mode <= budget * (1.0 + 1e-12);
        if (feasible)
            combos.push_back(std::move(p));

        std::size_t pos = 0;
        while (pos < digit.size() && ++digit[pos] == levels) {
            digit[pos] = 0;
            ++pos;
        }
        if (pos == digit.size())
            break;
    }
    return combos;
}

Eigen::VectorXcd theta_from_index(std::uint64_t index, int m_total, int phase_levels)
{
    Eigen::VectorXcd theta(m_total);
    for (int m = 0; m < m_total; ++m) {
        const int digit = static_cast<int>(index % phase_levels);
        index /= phase_levels;
        theta(m) = std::polar(1.0, 2.0 * kPi * digit / phase_levels);
    }
    return theta;
}

std::uint64_t theta_grid_size(int m_total, int phase_levels, std::uint64_t cap)
{
    double size = 1.0;
    for (int m = 0; m < m_total; ++m) {
        size *= phase_levels;
        if (size > static_cast<double>(cap) * 2.0)
            return cap + 1; // already over any admissible cap
    }
    return static_cast<std::uint64_t>(size);
}

struct GridCandidate {
    double rate = -1.0;
    std::uint64_t theta_index = 0;
    std::size_t power_index = 0;
    bool better_than(const GridCandidate &other) const
    {
        if (rate != other.rate)
            return rate > other.rate;
        if (theta_index != other.theta_index)
            return theta_index < other.theta_index;
        return power_index < other.power_index;
    }
};

// Best power combo at one phase vector; |u|^2 is precomputed per theta.
GridCandidate best_power_at_theta(const DirectEvaluator &eval,
                                  const std::vector<Eigen::VectorXd> &powers,
                                  std::uint64_t theta_index, const Eigen::VectorXcd &theta)
{
    const ScenarioConfig &cfg = eval.config();
    std::vector<Eigen::MatrixXd> u_norm(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k)
        u_norm[k] = eval.couplings(k, theta).cwiseAbs2();

    GridCandidate best;
    best.theta_index = theta_index;
    for (std::size_t pi = 0; pi < powers.size(); ++pi) {
        const Eigen::VectorXd &p = powers[pi];
        double rate = 0.0;
        for (int k = 0; k < cfg.n_users; ++k) {
            for (int i = 0; i < u_norm[k].rows(); ++i) {
                const int own = cfg.mode_sets[k][i];
                double denom = cfg.noise_power[k];
                for (int j = 0; j < cfg.n_tx; ++j)
                    if (j != own)
                        denom += p(j) * u_norm[k](i, j);
                rate += cfg.weights[k] * std::log2(1.0 + p(own) * u_norm[k](i, own) / denom);
            }
        }
        if (rate > best.rate || (rate == best.rate && pi < best.power_index)) {
            best.rate = rate;
            best.power_index = pi;
        }
    }
    return best;
}

GridResult finish_grid(const DirectEvaluator &eval, const std::vector<Eigen::VectorXd> &powers,
                       const GridCandidate &best, int phase_levels, std::uint64_t n_theta)
{
    GridResult result;
    result.p = powers[best.power_index];
    result.theta = theta_from_index(best.theta_index, eval.config().ris_elements(), phase_levels);
    result.best_rate = best.rate;
    result.points_evaluated = n_theta * powers.size();
    return result;
}

} // namespace

GridResult grid_search(const ScenarioConfig &cfg, const GridSpec &grid)
{
    if (grid.phase_levels < 1)
        throw std::invalid_argument("grid: need at least one phase level");
    const std::vector<Eigen::VectorXd> powers = enumerate_power_grid(cfg, grid);
    const std::uint64_t n_theta = theta_grid_size(cfg.ris_elements(), grid.phase_levels, grid.cap);
    if (powers.empty())
        throw std::invalid_argument("grid: no feasible power combination");
    if (n_theta > grid.cap || powers.size() > grid.cap / n_theta)
        throw std::invalid_argument("grid: size exceeds the configured cap");

    const DirectEvaluator eval(cfg);
    GridCandidate best;
#pragma omp parallel
    {
        GridCandidate local;
#pragma omp for schedule(static) nowait
        for (std::int64_t ti = 0; ti < static_cast<std::int64_t>(n_theta); ++ti) {
            const Eigen::VectorXcd theta =
                theta_from_index(static_cast<std::uint64_t>(ti), cfg.ris_elements(),
                                 grid.phase_levels);
            GridCandidate cand = best_power_at_theta(eval, powers,
                                                     static_cast<std::uint64_t>(ti), theta);
            if (cand.better_than(local))
                local = cand;
        }
#pragma omp critical
        {
            if (local.better_than(best))
                best = local;
        }
    }
    return finish_grid(eval, powers, best, grid.phase_levels, n_theta);
}

GridResult ref::grid_search(const ScenarioConfig &cfg, const GridSpec &grid)
{
    if (grid.phase_levels < 1)
        throw std::invalid_argument("grid: need at least one phase level");
    const std::vector<Eigen::VectorXd> powers = enumerate_power_grid(cfg, grid);
    const std::uint64_t n_theta = theta_grid_size(cfg.ris_elements(), grid.phase_levels, grid.cap);
    if (powers.empty())
        throw std::invalid_argument("grid: no feasible power combination");
    if (n_theta > grid.cap || powers.size() > grid.cap / n_theta)
        throw std::invalid_argument("grid: size exceeds the configured cap");

    const DirectEvaluator eval(cfg);
    GridCandidate best;
    for (std::uint64_t ti = 0; ti < n_theta; ++ti) {
        const Eigen::VectorXcd theta = theta_from_index(ti, cfg.ris_elements(), grid.phase_levels);
        GridCandidate cand = best_power_at_theta(eval, powers, ti, theta);
        if (cand.better_than(best))
            best = cand;
    }
    return finish_grid(eval, powers, best, grid.phase_levels, n_theta);
}

namespace {

struct McAccumulator {
    Eigen::ArrayXd sum_signal;
    Eigen::ArrayXd sum_signal_sq;
    Eigen::ArrayXd sum_inpn;
    Eigen::ArrayXd sum_inpn_sq;

    explicit McAccumulator(int slots)
        : sum_signal(Eigen::ArrayXd::Zero(slots)), sum_signal_sq(Eigen::ArrayXd::Zero(slots)),
          sum_inpn(Eigen::ArrayXd::Zero(slots)), sum_inpn_sq(Eigen::ArrayXd::Zero(slots))
    {
    }

    void add(int slot, double signal_power, double inpn_power)
    {
        sum_signal(slot) += signal_power;
        sum_signal_sq(slot) += signal_power * signal_power;
        sum_inpn(slot) += inpn_power;
        sum_inpn_sq(slot) += inpn_power * inpn_power;
    }

    void merge(const McAccumulator &other)
    {
        sum_signal += other.sum_signal;
        sum_signal_sq += other.sum_signal_sq;
        sum_inpn += other.sum_inpn;
        sum_inpn_sq += other.sum_inpn_sq;
    }
};

struct McContext {
    const ScenarioConfig &cfg;
    const ChannelSet &channels;
    const ModeBasis &basis;
    const Eigen::VectorXd &p;
    const Eigen::VectorXcd &theta;
    Eigen::VectorXd amp;                      // sqrt(p)
    std::vector<Eigen::MatrixXcd> direct;     // per user, signal coefficient matrix
    std::vector<int> slot_base;               // accumulator offset per user
    int slots = 0;
};

McContext make_mc_context(const ScenarioConfig &cfg, const ChannelSet &channels,
                          const ModeBasis &basis, const Eigen::VectorXd &p,
                          const Eigen::VectorXcd &theta)
{
    McContext ctx{cfg, channels, basis, p, theta, p.cwiseSqrt(), {}, {}, 0};
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_rx) * cfg.n_tx);
    for (int k = 0; k < cfg.n_users; ++k) {
        ctx.slot_base.push_back(ctx.slots);
        ctx.slots += static_cast<int>(cfg.mode_sets[k].size());
        ctx.direct.push_back(scale * (basis.rx[k].adjoint() * channels.h[k] *
                                      theta.conjugate().asDiagonal() * channels.g * basis.tx));
    }
    return ctx;
}

// One modulated transmission through the element-level chain: IDFT beamform,
// reflect, propagate, add receive noise, decompose with the receive DFT.
void simulate_draw(const McContext &ctx, std::mt19937_64 &rng, McAccumulator &acc)
{
    const ScenarioConfig &cfg = ctx.cfg;
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double isqrt2 = 1.0 / std::sqrt(2.0);

    // Unit-variance circularly symmetric symbols, one per mode.
    Eigen::VectorXcd symbols(cfg.n_tx);
    for (int l = 0; l < cfg.n_tx; ++l)
        symbols(l) = cxd(gauss(rng) * isqrt2, gauss(rng) * isqrt2);

    const Eigen::VectorXcd weighted = ctx.amp.cast<cxd>().cwiseProduct(symbols);
    const Eigen::VectorXcd x =
        (ctx.basis.tx * weighted) / std::sqrt(static_cast<double>(cfg.n_tx));
    const Eigen::VectorXcd reflected =
        ctx.theta.conjugate().cwiseProduct(ctx.channels.g * x);

    for (int k = 0; k < cfg.n_users; ++k) {
        const double sigma = std::sqrt(cfg.noise_power[k]);
        Eigen::VectorXcd noise(cfg.n_rx);
        for (int q = 0; q < cfg.n_rx; ++q)
            noise(q) = cxd(gauss(rng) * isqrt2, gauss(rng) * isqrt2) * sigma;
        const Eigen::VectorXcd y = ctx.channels.h[k] * reflected + noise;
        // Receive DFT scaled by 1/sqrt(Nr); the combining weights have unit
        // modulus, so the mode-domain noise keeps the configured variance.
        const Eigen::VectorXcd decomposed =
            (ctx.basis.rx[k].adjoint() * y) / std::sqrt(static_cast<double>(cfg.n_rx));
        for (Eigen::Index i = 0; i < decomposed.size(); ++i) {
            const int own = cfg.mode_sets[k][static_cast<std::size_t>(i)];
            const cxd signal = ctx.direct[k](i, own) * ctx.amp(own) * symbols(own);
            const cxd rest = decomposed(i) - signal;
            acc.add(ctx.slot_base[k] + static_cast<int>(i), std::norm(signal), std::norm(rest));
        }
    }
}

McResult finalize_mc(const McAccumulator &acc, const McContext &ctx, int draws)
{
    McResult result;
    result.draws = draws;
    result.stats.resize(ctx.cfg.n_users);
    for (int k = 0; k < ctx.cfg.n_users; ++k) {
        const int n_modes = static_cast<int>(ctx.cfg.mode_sets[k].size());
        result.stats[k].resize(n_modes);
        for (int i = 0; i < n_modes; ++i) {
            const int slot = ctx.slot_base[k] + i;
            const double n = draws;
            const double mean_s = acc.sum_signal(slot) / n;
            const double mean_i = acc.sum_inpn(slot) / n;
            McModeStat &stat = result.stats[k][i];
            stat.signal_power = mean_s;
            stat.interference_noise_power = mean_i;
            if (mean_i <= 0.0) {
                stat.unbounded = true;
                stat.sinr = std::numeric_limits<double>::infinity();
                continue;
            }
            stat.sinr = mean_s / mean_i;
            const double var_s =
                std::max(0.0, (acc.sum_signal_sq(slot) - n * mean_s * mean_s) / (n - 1.0));
            const double var_i =
                std::max(0.0, (acc.sum_inpn_sq(slot) - n * mean_i * mean_i) / (n - 1.0));
            stat.std_error = stat.sinr * std::sqrt(var_s / (n * mean_s * mean_s) +
                                                   var_i / (n * mean_i * mean_i));
        }
    }
    return result;
}

} // namespace

McResult monte_carlo_sinr(const ScenarioConfig &cfg, const Eigen::VectorXd &p,
                          const Eigen::VectorXcd &theta, const MonteCarloSpec &spec)
{
    if (spec.draws < 2)
        throw std::invalid_argument("monte carlo: need at least two draws");
    const SceneGeometry scene = build_scene(cfg);
    const ChannelSet channels = risoam::ref::build_channels(scene, cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    const McContext ctx = make_mc_context(cfg, channels, basis, p, theta);

    constexpr int kChunk = 4096;
    const int n_chunks = (spec.draws + kChunk - 1) / kChunk;
    std::vector<McAccumulator> partials(n_chunks, McAccumulator(ctx.slots));

#pragma omp parallel for schedule(static)
    for (int c = 0; c < n_chunks; ++c) {
        std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(c)));
        const int begin = c * kChunk;
        const int end = std::min(spec.draws, begin + kChunk);
        for (int d = begin; d < end; ++d)
            simulate_draw(ctx, rng, partials[c]);
    }

    McAccumulator total(ctx.slots);
    for (const auto &partial : partials)
        total.merge(partial);
    return finalize_mc(total, ctx, spec.draws);
}

McResult ref::monte_carlo_sinr(const ScenarioConfig &cfg, const Eigen::VectorXd &p,
                               const Eigen::VectorXcd &theta, const MonteCarloSpec &spec)
{
    if (spec.draws < 2)
        throw std::invalid_argument("monte carlo: need at least two draws");
    const SceneGeometry scene = build_scene(cfg);
    const ChannelSet channels = risoam::ref::build_channels(scene, cfg);
    const ModeBasis basis = build_mode_basis(cfg);
    const McContext ctx = make_mc_context(cfg, channels, basis, p, theta);

    constexpr int kChunk = 4096;
    McAccumulator total(ctx.slots);
    const int n_chunks = (spec.draws + kChunk - 1) / kChunk;
    for (int c = 0; c < n_chunks; ++c) {
        std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(c)));
        const int begin = c * kChunk;
        const int end = std::min(spec.draws, begin + kChunk);
        for (int d = begin; d < end; ++d)
            simulate_draw(ctx, rng, total);
    }
    return finalize_mc(total, ctx, spec.draws);
}

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd &)> &f,
                                     const Eigen::VectorXd &x, double step)
{
    if (!(step > 0.0))
        throw std::invalid_argument("finite differences: step must be positive");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + step;
        const double fp = f(probe);
        probe(i) = x(i) - step;
        const double fm = f(probe);
        probe(i) = x(i);
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::invalid_argument("finite differences: non-finite evaluation");
        grad(i) = (fp - fm) / (2.0 * step);
    }
    return grad;
}

double power_iteration_lmax(const Eigen::MatrixXcd &mat, int iterations)
{
    if (mat.rows() == 0)
        return 0.0;
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(mat.rows()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd y = mat * x;
        const double norm = y.norm();
        if (norm == 0.0)
            return 0.0;
        x = y / norm;
        lambda = (x.dot(mat * x)).real();
    }
    return std::max(lambda, 0.0);
}

Eigen::VectorXcd projected_gradient_theta(const ThetaQp &qp, const Eigen::VectorXcd &theta_init,
                                          double tolerance, int max_iterations, PgdInfo *info)
{
    const Eigen::Index m_total = qp.v.size();
    Eigen::VectorXcd theta = theta_init;
    const double grad_scale =
        qp.v.cwiseAbs().maxCoeff() + qp.U.cwiseAbs().rowwise().sum().maxCoeff() + DBL_MIN;
    const double stop = tolerance * grad_scale;

    const double lmax = power_iteration_lmax(qp.U) * 1.02;
    PgdInfo local;
    local.hit_max_iterations = true;
    if (lmax <= DBL_MIN) {
        // Pure linear objective: the maximizer of Re(theta^H v) on the disk.
        for (Eigen::Index m = 0; m < m_total; ++m)
            if (std::abs(qp.v(m)) > 0.0)
                theta(m) = qp.v(m) / std::abs(qp.v(m));
        local.hit_max_iterations = false;
        local.iterations = 1;
    } else {
        const double step = 0.45 / lmax;
        for (int it = 0; it < max_iterations; ++it) {
            const Eigen::VectorXcd residual = qp.U * theta - qp.v;
            theta -= 2.0 * step * residual;
            for (Eigen::Index m = 0; m < m_total; ++m) {
                const double mag = std::abs(theta(m));
                if (mag > 1.0)
                    theta(m) /= mag;
            }
            local.iterations = it + 1;
            if (theta_qp_kkt_residual(qp, theta) <= stop) {
                local.hit_max_iterations = false;
                break;
            }
        }
    }
    local.objective = theta_qp_objective(qp, theta);
    local.kkt_residual = theta_qp_kkt_residual(qp, theta);
    if (info)
        *info = local;
    return theta;
}

DetectedModeView stack_detected_modes(const CouplingScalars &u, const ScenarioConfig &cfg)
{
    int slots = 0;
    for (const auto &set : cfg.mode_sets)
        slots += static_cast<int>(set.size());

    DetectedModeView view;
    view.u.resize(slots, cfg.n_tx);
    view.weight.resize(slots);
    view.noise.resize(slots);
    view.tx_mode.resize(slots);
    int row = 0;
    for (int k = 0; k < cfg.n_users; ++k) {
        for (std::size_t i = 0; i < cfg.mode_sets[k].size(); ++i) {
            view.u.row(row) = u[k].row(static_cast<Eigen::Index>(i));
            view.weight(row) = cfg.weights[k];
            view.noise(row) = cfg.noise_power[k];
            view.tx_mode(row) = cfg.mode_sets[k][i];
            ++row;
        }
    }
    return view;
}

double dual_transform_value(const DetectedModeView &view, const Eigen::VectorXd &p,
                            const Eigen::VectorXd &nu)
{
    const double inv_ln2 = 1.0 / std::log(2.0);
    double value = 0.0;
    for (int d = 0; d < view.u.rows(); ++d) {
        const int own = view.tx_mode(d);
        double denom = view.noise(d);
        for (int j = 0; j < view.u.cols(); ++j)
            denom += p(j) * std::norm(view.u(d, j));
        const double signal = p(own) * std::norm(view.u(d, own));
        value += view.weight(d) * (std::log2(1.0 + nu(d)) +
                                   inv_ln2 * (-nu(d) + (1.0 + nu(d)) * signal / denom));
    }
    return value;
}

double quadratic_transform_value(const DetectedModeView &view, const Eigen::VectorXd &p,
                                 const Eigen::VectorXd &nu, const Eigen::VectorXd &eta)
{
    double value = 0.0;
    for (int d = 0; d < view.u.rows(); ++d) {
        const int own = view.tx_mode(d);
        double denom = view.noise(d);
        for (int j = 0; j < view.u.cols(); ++j)
            denom += p(j) * std::norm(view.u(d, j));
        const double amplitude =
            std::sqrt(view.weight(d) * (1.0 + nu(d)) * p(own) * std::norm(view.u(d, own)));
        value += 2.0 * eta(d) * amplitude - eta(d) * eta(d) * denom;
    }
    return value;
}

double theta_surrogate_value(const CouplingTensor &coupling, const Eigen::VectorXd &p,
                             const std::vector<Eigen::VectorXd> &nu_theta,
                             const std::vector<Eigen::VectorXcd> &eta_theta,
                             const ScenarioConfig &cfg, const Eigen::VectorXcd &theta)
{
    double value = 0.0;
    for (int k = 0; k < cfg.n_users; ++k) {
        for (int i = 0; i < coupling.n_modes[k]; ++i) {
            const int own = cfg.mode_sets[k][i];
            const cxd coupling_own = theta.dot(coupling.vec(k, i, own));
            const cxd amplitude =
                std::sqrt(cfg.weights[k] * (1.0 + nu_theta[k](i)) * p(own)) * coupling_own;
            double denom = cfg.noise_power[k];
            for (int j = 0; j < cfg.n_tx; ++j)
                denom += p(j) * std::norm(theta.dot(coupling.vec(k, i, j)));
            value += 2.0 * (std::conj(eta_theta[k](i)) * amplitude).real() -
                     std::norm(eta_theta[k](i)) * denom;
        }
    }
    return value;
}

} // namespace risoam::oracle
