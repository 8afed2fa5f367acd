#include "risoam/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace risoam {

using nlohmann::json;

void SolverOptions::validate() const
{
    if (max_iterations < 1)
        throw std::invalid_argument("solver.max_iterations: must be at least 1");
    if (!(tolerance > 0.0))
        throw std::invalid_argument("solver.tolerance: must be positive");
    if (!(inner_tolerance > 0.0))
        throw std::invalid_argument("solver.inner_tolerance: must be positive");
    if (inner_max_sweeps < 1)
        throw std::invalid_argument("solver.inner_max_sweeps: must be at least 1");
}

void ScenarioConfig::resolve_defaults()
{
    if (modes_per_user.empty() && mode_sets.empty()) {
        // even split of the mode budget
        modes_per_user.assign(n_users, 0);
        int base = n_users > 0 ? n_tx / n_users : 0;
        int extra = n_users > 0 ? n_tx % n_users : 0;
        for (int k = 0; k < n_users; ++k)
            modes_per_user[k] = base + (k < extra ? 1 : 0);
    }
    if (mode_sets.empty()) {
        // contiguous blocks in user order
        mode_sets.resize(modes_per_user.size());
        int next = 0;
        for (std::size_t k = 0; k < modes_per_user.size(); ++k) {
            for (int i = 0; i < modes_per_user[k]; ++i)
                mode_sets[k].push_back(next++);
        }
    }
    if (modes_per_user.empty()) {
        for (const auto &set : mode_sets)
            modes_per_user.push_back(static_cast<int>(set.size()));
    }
    if (user_radius.empty())
        user_radius.assign(n_users, 0.6);
    if (user_radius.size() == 1 && n_users > 1)
        user_radius.assign(n_users, user_radius[0]);
    if (noise_power.empty())
        noise_power.assign(n_users, 1.0);
    if (noise_power.size() == 1 && n_users > 1)
        noise_power.assign(n_users, noise_power[0]);
    if (weights.empty())
        weights.assign(n_users, 1.0);
    if (weights.size() == 1 && n_users > 1)
        weights.assign(n_users, weights[0]);
    if (user_centers.empty()) {
        for (int k = 0; k < n_users; ++k)
            user_centers.emplace_back(10.0 * k, 20.0, 0.0);
    }
    if (ris.spacing_y <= 0.0)
        ris.spacing_y = wavelength() / 2.0;
    if (ris.spacing_z <= 0.0)
        ris.spacing_z = wavelength() / 2.0;
}

void ScenarioConfig::validate() const
{
    if (n_users < 1)
        throw std::invalid_argument("users: must be at least 1");
    if (n_tx < 1)
        throw std::invalid_argument("tx_elements: must be at least 1");
    if (n_rx < 1)
        throw std::invalid_argument("rx_elements: must be at least 1");
    if (!(tx_radius > 0.0))
        throw std::invalid_argument("tx_radius_m: must be positive");
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("carrier_frequency_hz: must be positive");
    if (!(attenuation > 0.0))
        throw std::invalid_argument("attenuation: must be positive");
    if (ris.elements_y < 1 || ris.elements_z < 1)
        throw std::invalid_argument("ris.elements_y/elements_z: must be at least 1");
    if (!(ris.spacing_y > 0.0) || !(ris.spacing_z > 0.0))
        throw std::invalid_argument("ris.spacing_y_m/spacing_z_m: must be positive");

    auto expect_per_user = [&](std::size_t n, const char *field) {
        if (n != static_cast<std::size_t>(n_users)) {
            std::ostringstream os;
            os << field << ": expected " << n_users << " entries, got " << n;
            throw std::invalid_argument(os.str());
        }
    };
    expect_per_user(modes_per_user.size(), "modes_per_user");
    expect_per_user(mode_sets.size(), "mode_sets");
    expect_per_user(user_radius.size(), "user_radius_m");
    expect_per_user(noise_power.size(), "noise_power");
    expect_per_user(weights.size(), "weights");
    expect_per_user(user_centers.size(), "user_centers_m");

    int total_modes = 0;
    std::set<int> seen;
    for (int k = 0; k < n_users; ++k) {
        if (modes_per_user[k] < 1)
            throw std::invalid_argument("modes_per_user: every entry must be at least 1");
        if (modes_per_user[k] > n_rx)
            throw std::invalid_argument("modes_per_user: entries must not exceed rx_elements");
        if (static_cast<int>(mode_sets[k].size()) != modes_per_user[k])
            throw std::invalid_argument("mode_sets: size mismatch with modes_per_user");
        for (int mode : mode_sets[k]) {
            if (mode < 0 || mode >= n_tx)
                throw std::invalid_argument("mode_sets: mode index out of range");
            if (!seen.insert(mode).second)
                throw std::invalid_argument("mode_sets: mode assigned to more than one user");
        }
        total_modes += modes_per_user[k];
        if (!(user_radius[k] > 0.0))
            throw std::invalid_argument("user_radius_m: must be positive");
        if (!(noise_power[k] > 0.0))
            throw std::invalid_argument("noise_power: must be positive");
        if (weights[k] < 0.0)
            throw std::invalid_argument("weights: must be nonnegative");
        if (!user_centers[k].allFinite())
            throw std::invalid_argument("user_centers_m: entries must be finite");
    }
    if (total_modes > n_tx)
        throw std::invalid_argument("modes_per_user: total assigned modes exceeds tx_elements");
    solver.validate();
}

ScenarioConfig default_config()
{
    ScenarioConfig cfg;
    cfg.resolve_defaults();
    cfg.validate();
    return cfg;
}

std::pair<int, int> ris_grid_for(int m_total)
{
    switch (m_total) {
    case 20: return {5, 4};
    case 40: return {8, 5};
    case 60: return {10, 6};
    case 80: return {10, 8};
    case 120: return {12, 10};
    default: break;
    }
    if (m_total < 1)
        throw std::invalid_argument("ris element count must be positive");
    int best = 1;
    for (int d = 1; d * d <= m_total; ++d) {
        if (m_total % d == 0)
            best = d;
    }
    return {m_total / best, best};
}

namespace {

const char *to_cstr(PowerBudgetMode mode)
{
    return mode == PowerBudgetMode::TotalProjection ? "total_projection" : "per_mode_clip";
}

const char *to_cstr(ThetaInit init)
{
    return init == ThetaInit::Ones ? "ones" : "random_phases";
}

const char *to_cstr(Scheme scheme)
{
    switch (scheme) {
    case Scheme::PowerOnly: return "power_only";
    case Scheme::PhaseOnly: return "phase_only";
    default: return "joint";
    }
}

PowerBudgetMode budget_from_string(const std::string &s)
{
    if (s == "total_projection")
        return PowerBudgetMode::TotalProjection;
    if (s == "per_mode_clip")
        return PowerBudgetMode::PerModeClip;
    throw std::invalid_argument("solver.power_budget: unknown value '" + s + "'");
}

ThetaInit theta_init_from_string(const std::string &s)
{
    if (s == "ones")
        return ThetaInit::Ones;
    if (s == "random_phases")
        return ThetaInit::RandomPhases;
    throw std::invalid_argument("solver.theta_init: unknown value '" + s + "'");
}

Scheme scheme_from_string_impl(const std::string &s)
{
    if (s == "joint")
        return Scheme::Joint;
    if (s == "power_only")
        return Scheme::PowerOnly;
    if (s == "phase_only")
        return Scheme::PhaseOnly;
    throw std::invalid_argument("solver.scheme: unknown value '" + s + "'");
}

void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw std::invalid_argument(where + it.key() + ": unknown field");
    }
}

std::vector<double> read_scalar_or_array(const json &value, const char *field)
{
    std::vector<double> out;
    if (value.is_number()) {
        out.push_back(value.get<double>());
    } else if (value.is_array()) {
        for (const auto &entry : value) {
            if (!entry.is_number())
                throw std::invalid_argument(std::string(field) + ": entries must be numbers");
            out.push_back(entry.get<double>());
        }
    } else {
        throw std::invalid_argument(std::string(field) + ": expected number or array");
    }
    return out;
}

} // namespace

ScenarioConfig config_from_json_string(const std::string &text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &err) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + err.what());
    }
    if (!root.is_object())
        throw std::invalid_argument("config: top-level value must be an object");

    check_keys(root,
               {"users", "tx_elements", "rx_elements", "modes_per_user", "mode_sets",
                "tx_radius_m", "user_radius_m", "carrier_frequency_hz", "attenuation",
                "noise_power", "total_power_db", "weights", "ris", "ris_center",
                "user_centers_m", "solver", "seed"},
               "");

    ScenarioConfig cfg;
    cfg.user_radius.clear();
    cfg.noise_power.clear();
    cfg.weights.clear();

    if (root.contains("users"))
        cfg.n_users = root["users"].get<int>();
    if (root.contains("tx_elements"))
        cfg.n_tx = root["tx_elements"].get<int>();
    if (root.contains("rx_elements"))
        cfg.n_rx = root["rx_elements"].get<int>();
    if (root.contains("modes_per_user"))
        cfg.modes_per_user = root["modes_per_user"].get<std::vector<int>>();
    if (root.contains("mode_sets"))
        cfg.mode_sets = root["mode_sets"].get<std::vector<std::vector<int>>>();
    if (root.contains("tx_radius_m"))
        cfg.tx_radius = root["tx_radius_m"].get<double>();
    if (root.contains("user_radius_m"))
        cfg.user_radius = read_scalar_or_array(root["user_radius_m"], "user_radius_m");
    if (root.contains("carrier_frequency_hz"))
        cfg.carrier_hz = root["carrier_frequency_hz"].get<double>();
    if (root.contains("attenuation"))
        cfg.attenuation = root["attenuation"].get<double>();
    if (root.contains("noise_power"))
        cfg.noise_power = read_scalar_or_array(root["noise_power"], "noise_power");
    if (root.contains("total_power_db"))
        cfg.total_power_db = root["total_power_db"].get<double>();
    if (root.contains("weights"))
        cfg.weights = read_scalar_or_array(root["weights"], "weights");

    if (root.contains("ris")) {
        const json &ris = root["ris"];
        check_keys(ris, {"elements_y", "elements_z", "spacing_y_m", "spacing_z_m"}, "ris.");
        if (ris.contains("elements_y"))
            cfg.ris.elements_y = ris["elements_y"].get<int>();
        if (ris.contains("elements_z"))
            cfg.ris.elements_z = ris["elements_z"].get<int>();
        if (ris.contains("spacing_y_m"))
            cfg.ris.spacing_y = ris["spacing_y_m"].get<double>();
        if (ris.contains("spacing_z_m"))
            cfg.ris.spacing_z = ris["spacing_z_m"].get<double>();
    }
    if (root.contains("ris_center")) {
        const json &c = root["ris_center"];
        check_keys(c, {"x_m", "y_m"}, "ris_center.");
        if (c.contains("x_m"))
            cfg.ris_x = c["x_m"].get<double>();
        if (c.contains("y_m"))
            cfg.ris_y = c["y_m"].get<double>();
    }
    if (root.contains("user_centers_m")) {
        for (const auto &entry : root["user_centers_m"]) {
            if (!entry.is_array() || entry.size() != 3)
                throw std::invalid_argument("user_centers_m: entries must be [x, y, z]");
            cfg.user_centers.emplace_back(entry[0].get<double>(), entry[1].get<double>(),
                                          entry[2].get<double>());
        }
    }
    if (root.contains("solver")) {
        const json &s = root["solver"];
        check_keys(s,
                   {"max_iterations", "tolerance", "inner_tolerance", "inner_max_sweeps",
                    "power_budget", "theta_init", "scheme", "seed"},
                   "solver.");
        if (s.contains("max_iterations"))
            cfg.solver.max_iterations = s["max_iterations"].get<int>();
        if (s.contains("tolerance"))
            cfg.solver.tolerance = s["tolerance"].get<double>();
        if (s.contains("inner_tolerance"))
            cfg.solver.inner_tolerance = s["inner_tolerance"].get<double>();
        if (s.contains("inner_max_sweeps"))
            cfg.solver.inner_max_sweeps = s["inner_max_sweeps"].get<int>();
        if (s.contains("power_budget"))
            cfg.solver.budget_mode = budget_from_string(s["power_budget"].get<std::string>());
        if (s.contains("theta_init"))
            cfg.solver.theta_init = theta_init_from_string(s["theta_init"].get<std::string>());
        if (s.contains("scheme"))
            cfg.solver.scheme = scheme_from_string_impl(s["scheme"].get<std::string>());
        if (s.contains("seed"))
            cfg.solver.seed = s["seed"].get<std::uint64_t>();
    }
    if (root.contains("seed"))
        cfg.seed = root["seed"].get<std::uint64_t>();

    cfg.resolve_defaults();
    cfg.validate();
    return cfg;
}

std::string config_to_json_string(const ScenarioConfig &cfg)
{
    json root;
    root["users"] = cfg.n_users;
    root["tx_elements"] = cfg.n_tx;
    root["rx_elements"] = cfg.n_rx;
    root["modes_per_user"] = cfg.modes_per_user;
    root["mode_sets"] = cfg.mode_sets;
    root["tx_radius_m"] = cfg.tx_radius;
    root["user_radius_m"] = cfg.user_radius;
    root["carrier_frequency_hz"] = cfg.carrier_hz;
    root["attenuation"] = cfg.attenuation;
    root["noise_power"] = cfg.noise_power;
    root["total_power_db"] = cfg.total_power_db;
    root["weights"] = cfg.weights;
    root["ris"] = {{"elements_y", cfg.ris.elements_y},
                   {"elements_z", cfg.ris.elements_z},
                   {"spacing_y_m", cfg.ris.spacing_y},
                   {"spacing_z_m", cfg.ris.spacing_z}};
    root["ris_center"] = {{"x_m", cfg.ris_x}, {"y_m", cfg.ris_y}};
    json centers = json::array();
    for (const auto &c : cfg.user_centers)
        centers.push_back({c.x(), c.y(), c.z()});
    root["user_centers_m"] = centers;
    root["solver"] = {{"max_iterations", cfg.solver.max_iterations},
                      {"tolerance", cfg.solver.tolerance},
                      {"inner_tolerance", cfg.solver.inner_tolerance},
                      {"inner_max_sweeps", cfg.solver.inner_max_sweeps},
                      {"power_budget", to_cstr(cfg.solver.budget_mode)},
                      {"theta_init", to_cstr(cfg.solver.theta_init)},
                      {"scheme", to_cstr(cfg.solver.scheme)},
                      {"seed", cfg.solver.seed}};
    root["seed"] = cfg.seed;
    return root.dump(2) + "\n";
}

ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_string(buffer.str());
}

void save_config(const ScenarioConfig &cfg, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << config_to_json_string(cfg);
}

} // namespace risoam
