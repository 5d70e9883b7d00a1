#pragma once

#include <charconv>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccm/coupled.hpp"
#include "ccm/oracle.hpp"

namespace ccm {

// Scenario configuration and the sweep/surface/verify runners behind the CLI.
// Output is deterministic: the same config always produces byte-identical
// CSV, with doubles printed in their shortest round-trip form.

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SweepSpec {
    double mu_min = 0.0;
    double mu_max = 2.0;
    int points = 100;
    enum class Spacing { Linear, Log } spacing = Spacing::Linear;
};

struct SurfaceSpec {
    double d_mu_min = 1e-3;
    double d_mu_max = 0.1;
    int d_mu_points = 10;
};

struct ScenarioConfig {
    CoupledState state;
    SweepSpec sweep;
    std::optional<SurfaceSpec> surface;
    std::string output_path;  // may be empty: CLI decides the destination
};

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

namespace config_detail {

inline const nlohmann::json& member(const nlohmann::json& obj, const std::string& scope,
                                    const std::string& key) {
    if (!obj.contains(key)) {
        throw ConfigError("config: missing field '" + scope + key + "'");
    }
    return obj.at(key);
}

inline double number(const nlohmann::json& obj, const std::string& scope,
                     const std::string& key) {
    const nlohmann::json& v = member(obj, scope, key);
    if (!v.is_number()) {
        throw ConfigError("config: field '" + scope + key + "' must be a number");
    }
    return v.get<double>();
}

inline int integer(const nlohmann::json& obj, const std::string& scope,
                   const std::string& key) {
    const double v = number(obj, scope, key);
    const double rounded = std::nearbyint(v);
    if (rounded != v || std::abs(v) > 1e9) {
        throw ConfigError("config: field '" + scope + key + "' must be an integer");
    }
    return static_cast<int>(rounded);
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& scope,
                           std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("config: unknown field '" + scope + item.key() + "'");
        }
    }
}

}  // namespace config_detail

inline ScenarioConfig parse_config(const nlohmann::json& root) {
    namespace cd = config_detail;
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    cd::reject_unknown(root, "", {"reserves", "fees", "sweep", "surface", "output_path"});

    ScenarioConfig config;

    const nlohmann::json& reserves = cd::member(root, "", "reserves");
    cd::reject_unknown(reserves, "reserves.", {"x", "y1", "y2", "z"});
    config.state.x = cd::number(reserves, "reserves.", "x");
    config.state.y1 = cd::number(reserves, "reserves.", "y1");
    config.state.y2 = cd::number(reserves, "reserves.", "y2");
    config.state.z = cd::number(reserves, "reserves.", "z");

    const nlohmann::json& fees = cd::member(root, "", "fees");
    cd::reject_unknown(fees, "fees.", {"fee1", "fee2"});
    const double fee1 = cd::number(fees, "fees.", "fee1");
    const double fee2 = cd::number(fees, "fees.", "fee2");
    if (fee1 < 0.0 || fee1 >= 1.0 || fee2 < 0.0 || fee2 >= 1.0) {
        throw ConfigError("config: fees must lie in [0, 1)");
    }
    config.state.gamma1 = 1.0 - fee1;
    config.state.gamma2 = 1.0 - fee2;
    try {
        validate(config.state);
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("config: reserves: ") + e.what());
    }

    const nlohmann::json& sweep = cd::member(root, "", "sweep");
    cd::reject_unknown(sweep, "sweep.", {"mu_min", "mu_max", "points", "spacing"});
    config.sweep.mu_min = cd::number(sweep, "sweep.", "mu_min");
    config.sweep.mu_max = cd::number(sweep, "sweep.", "mu_max");
    config.sweep.points = cd::integer(sweep, "sweep.", "points");
    if (sweep.contains("spacing")) {
        const std::string spacing = sweep.at("spacing").get<std::string>();
        if (spacing == "linear") {
            config.sweep.spacing = SweepSpec::Spacing::Linear;
        } else if (spacing == "log") {
            config.sweep.spacing = SweepSpec::Spacing::Log;
        } else {
            throw ConfigError("config: sweep.spacing must be 'linear' or 'log'");
        }
    }
    if (!(config.sweep.mu_min >= 0.0)) throw ConfigError("config: sweep.mu_min must be >= 0");
    if (!(config.sweep.mu_max > config.sweep.mu_min)) {
        throw ConfigError("config: sweep.mu_max must exceed sweep.mu_min");
    }
    if (config.sweep.points < 2) throw ConfigError("config: sweep.points must be >= 2");
    if (config.sweep.spacing == SweepSpec::Spacing::Log && config.sweep.mu_min <= 0.0) {
        throw ConfigError("config: log spacing requires sweep.mu_min > 0");
    }

    if (root.contains("surface")) {
        const nlohmann::json& surface = root.at("surface");
        cd::reject_unknown(surface, "surface.", {"d_mu_min", "d_mu_max", "d_mu_points"});
        SurfaceSpec spec;
        spec.d_mu_min = cd::number(surface, "surface.", "d_mu_min");
        spec.d_mu_max = cd::number(surface, "surface.", "d_mu_max");
        spec.d_mu_points = cd::integer(surface, "surface.", "d_mu_points");
        if (!(spec.d_mu_min > 0.0) || !(spec.d_mu_max > spec.d_mu_min) || spec.d_mu_max > 0.1) {
            throw ConfigError("config: surface d_mu range must satisfy 0 < d_mu_min < d_mu_max <= 0.1");
        }
        if (spec.d_mu_points < 1) throw ConfigError("config: surface.d_mu_points must be >= 1");
        config.surface = spec;
    }

    if (root.contains("output_path")) {
        config.output_path = root.at("output_path").get<std::string>();
    }
    return config;
}

// Bundled scenario: the case-study parameterization used throughout, with
// 3% fees on both pools.
inline ScenarioConfig preset(std::string_view name) {
    if (name != "paper-case-study") {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
    ScenarioConfig config;
    config.state = {1e7, 4.5e8, 7.2e7, 1e9, 0.97, 0.97};
    config.sweep = {0.0, 2.0, 100, SweepSpec::Spacing::Linear};
    config.surface = SurfaceSpec{1e-3, 0.1, 12};
    return config;
}

inline std::vector<double> sweep_grid(const SweepSpec& spec) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(spec.points));
    const int n = spec.points;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        if (spec.spacing == SweepSpec::Spacing::Linear) {
            grid.push_back(spec.mu_min + t * (spec.mu_max - spec.mu_min));
        } else {
            grid.push_back(spec.mu_min * std::pow(spec.mu_max / spec.mu_min, t));
        }
    }
    return grid;
}

inline std::vector<double> surface_steps(const SurfaceSpec& spec) {
    std::vector<double> steps;
    steps.reserve(static_cast<std::size_t>(spec.d_mu_points));
    const int n = spec.d_mu_points;
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        steps.push_back(spec.d_mu_min * std::pow(spec.d_mu_max / spec.d_mu_min, t));
    }
    return steps;
}

inline constexpr const char* kDataHeader = "# ccm v1";

namespace csv_detail {

inline void write_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_double(values[i]);
    }
    out << '\n';
}

}  // namespace csv_detail

inline void write_purchase_sweep(const ScenarioConfig& config, std::ostream& out) {
    out << kDataHeader << '\n';
    out << "mu_y,delta_x,value_discrepancy,indicator,mu_z,depth_marg_y,kappa_y,kappa_z,a2\n";
    for (double mu : sweep_grid(config.sweep)) {
        const MetricsSample s = sample_purchase(config.state, mu);
        csv_detail::write_row(out, {s.mu_y, s.trade_in, s.value_discrepancy, s.indicator,
                                    s.transmitted_drift, s.depth_marg_y, s.kappa_y,
                                    s.kappa_z_or_x, -0.5 * s.curvature_compound});
    }
}

inline void write_liquidation_sweep(const ScenarioConfig& config, std::ostream& out) {
    out << kDataHeader << '\n';
    out << "mu_y,gamma_z,value_discrepancy,mu_x,depth_marg_y,kappa_y,kappa_x,b2\n";
    for (double mu : sweep_grid(config.sweep)) {
        const MetricsSample s = sample_liquidation(config.state, mu);
        csv_detail::write_row(out, {s.mu_y, s.trade_in, s.value_discrepancy,
                                    s.transmitted_drift, s.depth_marg_y, s.kappa_y,
                                    s.kappa_z_or_x, -0.5 * s.curvature_compound});
    }
}

inline void write_transmission(const ScenarioConfig& config, TradeDirection event,
                               std::ostream& out) {
    out << kDataHeader << '\n';
    out << "mu_y,transmitted_drift\n";
    for (double mu : sweep_grid(config.sweep)) {
        const double transmitted = event == TradeDirection::Purchase
                                       ? drift_transmission_purchase(config.state, mu)
                                       : drift_transmission_liquidation(config.state, mu);
        csv_detail::write_row(out, {mu, transmitted});
    }
}

// Long-format surface: one row per (mu_y, d_mu_y) cell. marginal_output is
// the realized output gain for the extra d_mu_y of drift.
inline void write_surface(const ScenarioConfig& config, TradeDirection event,
                          std::ostream& out) {
    if (!config.surface) {
        throw ConfigError("surface command requires a 'surface' config block");
    }
    out << kDataHeader << '\n';
    out << "mu_y,d_mu_y,marginal_output,order1,order2,residual\n";
    for (double mu : sweep_grid(config.sweep)) {
        for (double d_mu : surface_steps(*config.surface)) {
            const ExpansionReport r = event == TradeDirection::Purchase
                                          ? marginal_output_purchase(config.state, mu, d_mu)
                                          : marginal_output_liquidation(config.state, mu, d_mu);
            csv_detail::write_row(out, {mu, d_mu, -r.exact_delta, r.order1, r.order2,
                                        r.residual});
        }
    }
}

// Runs the oracle suite; prints a fixed-width pass/fail table and a JSON
// report. Returns 0 iff every oracle passed.
inline int run_verify(const ScenarioConfig& config, std::ostream& table,
                      std::ostream& report_out) {
    const std::vector<OracleReport> reports = run_suite(config.state, sweep_grid(config.sweep));
    bool all_passed = true;
    nlohmann::json json_reports = nlohmann::json::array();
    table << std::left << std::setw(34) << "oracle" << std::setw(8) << "status"
          << std::setw(14) << "max_rel_err" << "samples" << '\n';
    for (const OracleReport& r : reports) {
        all_passed = all_passed && r.passed;
        table << std::left << std::setw(34) << r.name << std::setw(8)
              << (r.passed ? "pass" : "FAIL") << std::setw(14) << format_double(r.max_rel_error)
              << r.samples << '\n';
        json_reports.push_back({{"name", r.name},
                                {"passed", r.passed},
                                {"max_rel_error", r.max_rel_error},
                                {"samples", r.samples},
                                {"tolerance", r.tolerance},
                                {"worst_case_input", r.worst_case_input}});
    }
    report_out << nlohmann::json{{"passed", all_passed}, {"oracles", json_reports}}.dump(2)
               << '\n';
    return all_passed ? 0 : 1;
}

}  // namespace ccm
