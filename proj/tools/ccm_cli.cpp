// ccm: coupled constant-function market maker analytics.
//
// Subcommands sweep the compound purchase/liquidation metrics over a price
// drift grid and emit deterministic CSV; `verify` runs the numerical oracle
// suite against the configured state.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccm/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct CommonOptions {
    std::string config_path;
    std::string preset_name;
    std::string out_path;
    std::string event = "purchase";
};

ccm::ScenarioConfig load_config(const CommonOptions& opts) {
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) {
            throw std::ios_base::failure("cannot open config file '" + opts.config_path + "'");
        }
        nlohmann::json root;
        try {
            in >> root;
        } catch (const nlohmann::json::exception& e) {
            throw ccm::ConfigError(std::string("config: invalid JSON: ") + e.what());
        }
        return ccm::parse_config(root);
    }
    // No config file: fall back to the named preset (default paper-case-study).
    return ccm::preset(opts.preset_name.empty() ? "paper-case-study" : opts.preset_name);
}

ccm::TradeDirection parse_event(const std::string& event) {
    if (event == "purchase") return ccm::TradeDirection::Purchase;
    if (event == "liquidation") return ccm::TradeDirection::Liquidation;
    throw ccm::ConfigError("--event must be 'purchase' or 'liquidation'");
}

// Writes through a stringstream so a failed run never leaves a partial file.
int emit(const ccm::ScenarioConfig& config, const CommonOptions& opts,
         const std::function<void(std::ostream&)>& writer) {
    std::ostringstream buffer;
    writer(buffer);
    const std::string destination =
        !opts.out_path.empty() ? opts.out_path : config.output_path;
    if (destination.empty()) {
        std::cout << buffer.str();
        return kExitOk;
    }
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        std::cerr << "ccm: cannot open output file '" << destination << "'\n";
        return kExitIoError;
    }
    out << buffer.str();
    if (!out) {
        std::cerr << "ccm: write to '" << destination << "' failed\n";
        return kExitIoError;
    }
    return kExitOk;
}

void add_common_options(CLI::App* cmd, CommonOptions& opts, bool with_event) {
    cmd->add_option("--config", opts.config_path, "Path to a JSON scenario config");
    cmd->add_option("--preset", opts.preset_name, "Named bundled scenario (paper-case-study)");
    cmd->add_option("--out", opts.out_path, "Output file (default: config output_path or stdout)");
    if (with_event) {
        cmd->add_option("--event", opts.event, "Trade direction: purchase|liquidation");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled CFMM market metrics: sweeps, surfaces, and verification"};
    app.require_subcommand(1);

    CommonOptions opts;
    CLI::App* purchase = app.add_subcommand("purchase-sweep",
                                            "Purchase metrics over the drift grid");
    add_common_options(purchase, opts, false);
    CLI::App* liquidation = app.add_subcommand("liquidation-sweep",
                                               "Liquidation metrics over the drift grid");
    add_common_options(liquidation, opts, false);
    CLI::App* surface = app.add_subcommand("surface",
                                           "Marginal output surface over (mu_y, d_mu_y)");
    add_common_options(surface, opts, true);
    CLI::App* transmission = app.add_subcommand("transmission",
                                                "Drift transmission over the grid");
    add_common_options(transmission, opts, true);
    CLI::App* verify = app.add_subcommand("verify", "Run the oracle cross-check suite");
    add_common_options(verify, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        const ccm::ScenarioConfig config = load_config(opts);
        if (purchase->parsed()) {
            return emit(config, opts,
                        [&](std::ostream& out) { ccm::write_purchase_sweep(config, out); });
        }
        if (liquidation->parsed()) {
            return emit(config, opts,
                        [&](std::ostream& out) { ccm::write_liquidation_sweep(config, out); });
        }
        if (surface->parsed()) {
            const ccm::TradeDirection event = parse_event(opts.event);
            return emit(config, opts,
                        [&](std::ostream& out) { ccm::write_surface(config, event, out); });
        }
        if (transmission->parsed()) {
            const ccm::TradeDirection event = parse_event(opts.event);
            return emit(config, opts,
                        [&](std::ostream& out) { ccm::write_transmission(config, event, out); });
        }
        if (verify->parsed()) {
            std::ostringstream report;
            const int status = ccm::run_verify(config, std::cout, report);
            const std::string destination =
                !opts.out_path.empty() ? opts.out_path : config.output_path;
            if (!destination.empty()) {
                std::ofstream out(destination, std::ios::binary);
                if (!out) {
                    std::cerr << "ccm: cannot open report file '" << destination << "'\n";
                    return kExitIoError;
                }
                out << report.str();
            } else {
                std::cout << report.str();
            }
            return status == 0 ? kExitOk : kExitVerifyFailed;
        }
    } catch (const ccm::ConfigError& e) {
        std::cerr << "ccm: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "ccm: " << e.what() << '\n';
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "ccm: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitOk;
}
