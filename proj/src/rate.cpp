#include "risoam/rate.hpp"

#include <cmath>

namespace risoam {

std::vector<Eigen::VectorXd> sinr(const Eigen::VectorXd &p, const CouplingScalars &u,
                                  const ScenarioConfig &cfg)
{
    std::vector<Eigen::VectorXd> gamma(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        const int n_modes = static_cast<int>(u[k].rows());
        gamma[k].resize(n_modes);
        for (int i = 0; i < n_modes; ++i) {
            const int own = cfg.mode_sets[k][i];
            double interference = 0.0;
            for (int j = 0; j < cfg.n_tx; ++j) {
                if (j == own)
                    continue;
                interference += p(j) * std::norm(u[k](i, j));
            }
            const double signal = p(own) * std::norm(u[k](i, own));
            gamma[k](i) = signal / (interference + cfg.noise_power[k]);
        }
    }
    return gamma;
}

RateReport rate_report(const Eigen::VectorXd &p, const CouplingScalars &u,
                       const ScenarioConfig &cfg)
{
    RateReport report;
    report.sinr = sinr(p, u, cfg);
    report.user_rates.resize(cfg.n_users, 0.0);
    for (int k = 0; k < cfg.n_users; ++k) {
        double rate = 0.0;
        for (int i = 0; i < report.sinr[k].size(); ++i)
            rate += std::log2(1.0 + report.sinr[k](i));
        report.user_rates[k] = rate;
        report.weighted_sum += cfg.weights[k] * rate;
    }
    return report;
}

double weighted_sum_rate(const Eigen::VectorXd &p, const CouplingScalars &u,
                         const ScenarioConfig &cfg)
{
    return rate_report(p, u, cfg).weighted_sum;
}

} // namespace risoam
