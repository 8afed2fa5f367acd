#ifndef RISOAM_RATE_HPP
#define RISOAM_RATE_HPP

#include <vector>

#include "risoam/channel.hpp"
#include "risoam/config.hpp"

namespace risoam {

struct PowerAllocation {
    Eigen::VectorXd p;   // per transmit mode, linear units
    double budget = 0.0; // total transmit power

    double total() const { return p.sum(); }
    double max_mode() const { return p.size() ? p.maxCoeff() : 0.0; }
};

struct RateReport {
    std::vector<Eigen::VectorXd> sinr; // per user, per detected mode
    std::vector<double> user_rates;    // bits/s/Hz
    double weighted_sum = 0.0;         // bits/s/Hz
};

/// Per-mode SINR. Interference sums over the full transmit mode range, not
/// just the victim user's own modes.
std::vector<Eigen::VectorXd> sinr(const Eigen::VectorXd &p, const CouplingScalars &u,
                                  const ScenarioConfig &cfg);

RateReport rate_report(const Eigen::VectorXd &p, const CouplingScalars &u,
                       const ScenarioConfig &cfg);

double weighted_sum_rate(const Eigen::VectorXd &p, const CouplingScalars &u,
                         const ScenarioConfig &cfg);

} // namespace risoam

#endif
