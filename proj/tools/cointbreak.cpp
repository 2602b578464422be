#include <cointbreak/commands.hpp>
#include <cointbreak/config_file.hpp>
#include <cointbreak/errors.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

// Flags shared by all subcommands; each maps onto a config key.
struct Overrides {
    std::string config;
    std::vector<std::string> settings; // key=value
    std::vector<std::pair<std::string, std::optional<std::string>>> flags;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    app->add_option("--set", o.settings, "extra key=value override (repeatable)");
    static const std::vector<std::pair<std::string, std::string>> keyed = {
        {"--max-breaks", "max_breaks"}, {"--min-regime", "min_regime"}, {"--trim-lo", "trim_lo"},
        {"--trim-hi", "trim_hi"},       {"--gamma", "gamma"},           {"--delta", "delta"},
        {"--leads-lags", "leads_lags"}, {"--method", "method"},         {"--seed", "seed"},
        {"--jobs", "jobs"},
    };
    o.flags.reserve(keyed.size() + 2);
    for (const auto& [flag, key] : keyed) {
        o.flags.emplace_back(key, std::nullopt);
        auto& slot = o.flags.back().second;
        app->add_option_function<std::string>(flag, [&slot](const std::string& v) { slot = v; },
                                               "sets `" + key + "`");
    }
}

cointbreak::RunOptions resolve(const Overrides& o, const std::vector<std::pair<std::string, std::string>>& first) {
    cointbreak::RunOptions options;
    for (const auto& [key, value] : first) {
        cointbreak::apply_setting(key, value, options);
    }
    if (!o.config.empty()) {
        cointbreak::apply_config(cointbreak::read_key_values(o.config), options);
    }
    for (const auto& [key, value] : o.flags) {
        if (value) {
            cointbreak::apply_setting(key, *value, options);
        }
    }
    for (const auto& s : o.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw cointbreak::InputError("--set expects key=value, got " + s);
        }
        cointbreak::apply_setting(s.substr(0, eq), s.substr(eq + 1), options);
    }
    return options;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural breaks in cointegrating regressions via adaptive group lasso"};
    app.require_subcommand(1);

    std::string csv;
    std::string out_dir;
    Overrides est_o;
    auto* est = app.add_subcommand("estimate", "estimate breakpoints in a series CSV");
    est->add_option("csv", csv, "input CSV (date?, y, x1, ...)")->required()->check(CLI::ExistingFile);
    est->add_option("--out", out_dir, "directory for report.json and residual CSVs");
    add_common(est, est_o);

    std::string scenario;
    std::optional<std::string> t_len;
    std::optional<std::string> reps;
    bool no_augment = false;
    bool include_all = false;
    std::string sim_out;
    Overrides sim_o;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo study for a named scenario or a config file");
    sim->add_option("scenario", scenario, "scenario name (null, sb1, sb2, sb4, partial, ...)");
    sim->add_option_function<std::string>("--T", [&](const std::string& v) { t_len = v; }, "sample size");
    sim->add_option_function<std::string>("--reps", [&](const std::string& v) { reps = v; }, "replications");
    sim->add_flag("--no-augment", no_augment, "disable leads/lags augmentation");
    sim->add_flag("--include-all", include_all, "average hd/T over every run");
    sim->add_option("--out", sim_out, "directory for report.json and table.csv");
    add_common(sim, sim_o);

    std::string path_csv;
    std::string path_out;
    Overrides path_o;
    auto* path = app.add_subcommand("path", "stage-1 lambda path diagnostics");
    path->add_option("csv", path_csv, "input CSV")->required()->check(CLI::ExistingFile);
    path->add_option("--out", path_out, "directory for path.csv");
    add_common(path, path_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cointbreak::kExitInput;
    }

    return cointbreak::guarded(
        [&]() -> int {
            if (est->parsed()) {
                return cointbreak::cmd_estimate(csv, resolve(est_o, {}), out_dir, std::cout);
            }
            if (sim->parsed()) {
                std::vector<std::pair<std::string, std::string>> first;
                if (!scenario.empty()) {
                    first.emplace_back("scenario", scenario);
                } else if (sim_o.config.empty()) {
                    throw cointbreak::InputError("simulate needs a scenario name or --config");
                }
                auto options = resolve(sim_o, first);
                if (t_len) {
                    cointbreak::apply_setting("T", *t_len, options);
                }
                if (reps) {
                    cointbreak::apply_setting("reps", *reps, options);
                }
                if (no_augment) {
                    cointbreak::apply_setting("augment", "false", options);
                }
                if (include_all) {
                    options.include_all = true;
                }
                return cointbreak::cmd_simulate(options, sim_out, std::cout);
            }
            return cointbreak::cmd_path(path_csv, resolve(path_o, {}), path_out, std::cout);
        },
        std::cerr);
}
