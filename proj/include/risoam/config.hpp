#ifndef RISOAM_CONFIG_HPP
#define RISOAM_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "risoam/common.hpp"

namespace risoam {

enum class PowerBudgetMode {
    TotalProjection, // sum of mode powers <= budget, uniform rescale after the closed-form update
    PerModeClip      // each mode power clipped at the budget
};

enum class ThetaInit { Ones, RandomPhases };

/// Which blocks the alternating solver is allowed to move. PowerOnly freezes
/// the phase vector at its initialization, PhaseOnly freezes the power vector
/// at uniform; both serve as comparison baselines for the joint scheme.
enum class Scheme { Joint, PowerOnly, PhaseOnly };

struct SolverOptions {
    int max_iterations = 500;
    double tolerance = 1e-6;       // relative objective change between outer iterations
    double inner_tolerance = 1e-8; // phase subproblem KKT residual, relative to gradient scale
    int inner_max_sweeps = 400;
    PowerBudgetMode budget_mode = PowerBudgetMode::TotalProjection;
    ThetaInit theta_init = ThetaInit::Ones;
    Scheme scheme = Scheme::Joint;
    std::uint64_t seed = 1;

    void validate() const;
};

struct RisLayout {
    int elements_y = 8;
    int elements_z = 5;
    // Spacings <= 0 mean "resolve to half a wavelength" at load time.
    double spacing_y = -1.0;
    double spacing_z = -1.0;
};

/// Full description of one physical scenario. Loaded from JSON; all optional
/// fields are filled in by resolve_defaults() so a resolved config round-trips
/// through serialization bit-exact.
struct ScenarioConfig {
    int n_users = 3; // K
    int n_tx = 15;   // transmit UCA elements and total mode count
    int n_rx = 5;    // receive UCA elements per user

    std::vector<int> modes_per_user;          // N_k; default splits n_tx evenly
    std::vector<std::vector<int>> mode_sets;  // global mode indices per user; default contiguous blocks

    double tx_radius = 0.6;          // m
    std::vector<double> user_radius; // m, per user
    double carrier_hz = 10e9;
    double attenuation = 1.0;              // channel gain scale factor
    std::vector<double> noise_power;       // per user, linear
    double total_power_db = 20.0;          // relative to unit noise
    std::vector<double> weights;           // per user

    RisLayout ris;
    double ris_x = 2.0;  // m
    double ris_y = 30.0; // m
    std::vector<Eigen::Vector3d> user_centers; // default ((k-1)*10, 20, 0)

    SolverOptions solver;
    std::uint64_t seed = 1;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double total_power_linear() const { return std::pow(10.0, total_power_db / 10.0); }
    int ris_elements() const { return ris.elements_y * ris.elements_z; }

    /// Fills every unset optional field (mode sets, user centers, per-user
    /// arrays, RIS spacings) with its documented default.
    void resolve_defaults();

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// The bundled default scenario: K=3, Nt=15, Nr=5, M=40 (8x5), Pt=20 dB, 10 GHz.
ScenarioConfig default_config();

ScenarioConfig load_config(const std::string &path);
void save_config(const ScenarioConfig &cfg, const std::string &path);
std::string config_to_json_string(const ScenarioConfig &cfg);
ScenarioConfig config_from_json_string(const std::string &text);

/// Grid factorization used when sweeping the RIS element count:
/// 20->5x4, 40->8x5, 60->10x6, 80->10x8, 120->12x10; other values fall back
/// to the most square factor pair.
std::pair<int, int> ris_grid_for(int m_total);

} // namespace risoam

#endif
