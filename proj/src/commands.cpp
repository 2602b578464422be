#include <cointbreak/bai_perron.hpp>
#include <cointbreak/commands.hpp>
#include <cointbreak/csv.hpp>
#include <cointbreak/dols.hpp>
#include <cointbreak/errors.hpp>
#include <cointbreak/report.hpp>
#include <cointbreak/simulator.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace cointbreak {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> methods_of(const std::string& method) {
    if (method == "both") {
        return {"lasso", "baiperron"};
    }
    return {method};
}

TimeSeriesData prepare(const TimeSeriesData& raw, const RunOptions& options) {
    return options.leads_lags ? augment(raw, *options.leads_lags) : raw;
}

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create output directory " + dir + ": " + ec.message());
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    return out;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

json sim_json(const RunOptions& options) {
    const SimConfig& s = options.sim;
    json j;
    j["name"] = s.name;
    j["T"] = s.T;
    j["N"] = s.N;
    j["reps"] = s.reps;
    j["seed"] = s.seed;
    j["mu"] = s.mu;
    j["baseline_beta"] = vector_json(s.baseline_beta);
    j["break_fractions"] = s.break_fractions;
    json jumps = json::array();
    for (const auto& v : s.jumps) {
        jumps.push_back(vector_json(v));
    }
    j["jumps"] = std::move(jumps);
    j["break_indices"] = s.break_indices();
    j["sigma_theta_sq"] = s.sigma_theta_sq;
    j["sigma_omega_sq"] = s.sigma_omega_sq;
    j["endogenous"] = s.endogenous;
    j["leads_lags"] = options.leads_lags ? json(*options.leads_lags) : json(nullptr);
    j["trim_lo"] = options.pipeline.stage1.trim_lo;
    j["trim_hi"] = options.pipeline.stage1.trim_hi;
    j["max_breaks"] = options.pipeline.max_breaks;
    return j;
}

void print_model(std::ostream& out, const std::string& method, const TimeSeriesData& data, const BreakModel& model) {
    out << method << ": " << model.num_breaks() << " break(s)";
    for (auto b : model.breakpoints) {
        out << ' ' << b;
        if (!data.labels().empty()) {
            out << " (" << data.labels()[data.local_index(b) - 1] << ')';
        }
    }
    out << "; ssr " << model.ssr << '\n';
}

} // namespace

RunRecord simulate_one(const RunOptions& options, const std::string& method, std::size_t rep) {
    const SimDraw draw = generate(options.sim, rep);
    const TimeSeriesData data = prepare(draw.data, options);
    BreakModel estimate;
    if (method == "lasso") {
        estimate = estimate_breaks(data, options.effective_pipeline());
    } else if (method == "baiperron") {
        estimate = select_num_breaks(data, options.pipeline.max_breaks, options.effective_bai_perron());
    } else {
        throw InputError("unknown method: " + method);
    }
    return evaluate_run(estimate, draw.truth, options.sim.T);
}

std::vector<RunRecord> simulate_records(const RunOptions& options, const std::string& method) {
    options.validate();
    options.sim.validate();
    const std::size_t reps = options.sim.reps;
    if (reps == 0) {
        throw InputError("reps must be positive");
    }
    std::vector<std::optional<RunRecord>> results(reps);
    std::vector<std::exception_ptr> errors(reps);
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t rep = next++; rep < reps; rep = next++) {
            try {
                results[rep] = simulate_one(options, method, rep);
            } catch (...) {
                errors[rep] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(options.jobs, reps);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<RunRecord> out;
    out.reserve(reps);
    for (auto& r : results) {
        out.push_back(std::move(*r));
    }
    return out;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cmd_estimate(const std::string& csv_path, const RunOptions& options, const std::string& out_dir,
                 std::ostream& out) {
    options.validate();
    const SeriesTable table = read_series_csv(csv_path);
    const TimeSeriesData data = prepare(table.to_data(), options);
    const ReportContext context{table.columns, table.to_data().length()};
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
    }

    json doc;
    doc["input"] = csv_path;
    doc["observations"] = context.sample_length;
    doc["regressors"] = table.columns;
    doc["leads_lags"] = options.leads_lags ? json(*options.leads_lags) : json(nullptr);
    for (const auto& method : methods_of(options.method)) {
        BreakModel model;
        if (method == "lasso") {
            const EstimateTrace trace = estimate_breaks_traced(data, options.effective_pipeline());
            doc["lasso"] = lasso_json(data, trace, context);
            model = trace.model;
        } else {
            const BaiPerronFit fit =
                select_num_breaks_traced(data, options.pipeline.max_breaks, options.effective_bai_perron());
            doc["baiperron"] = bai_perron_json(data, fit, context);
            model = fit.model;
        }
        print_model(out, method, data, model);
        if (!out_dir.empty()) {
            auto file = open_out(join_path(out_dir, "residuals_" + method + ".csv"));
            write_residuals_csv(file, data, model);
        }
    }
    if (!out_dir.empty()) {
        write_json(join_path(out_dir, "report.json"), doc);
    }
    return kExitOk;
}

int cmd_simulate(const RunOptions& options, const std::string& out_dir, std::ostream& out) {
    options.validate();
    options.sim.validate();
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
    }

    json doc;
    doc["scenario"] = sim_json(options);
    json results = json::array();
    std::string tables;
    for (const auto& method : methods_of(options.method)) {
        const auto records = simulate_records(options, method);
        const MonteCarloReport report = aggregate(records, options.include_all, options.sim.name);
        json entry;
        entry["method"] = method;
        entry["summary"] = to_json(report);
        if (records.size() == 1) {
            entry["run"] = to_json(records.front());
            out << to_json(records.front()).dump(2) << '\n';
        } else {
            out << "# " << options.sim.name << " (" << method << ")\n" << format_table(report, ';');
        }
        tables += "# " + method + '\n' + format_table(report, ';');
        results.push_back(std::move(entry));
    }
    doc["results"] = std::move(results);
    if (!out_dir.empty()) {
        write_json(join_path(out_dir, "report.json"), doc);
        auto file = open_out(join_path(out_dir, "table.csv"));
        file << tables;
    }
    return kExitOk;
}

int cmd_path(const std::string& csv_path, const RunOptions& options, const std::string& out_dir,
             std::ostream& out) {
    options.validate();
    const SeriesTable table = read_series_csv(csv_path);
    const TimeSeriesData data = prepare(table.to_data(), options);
    const auto path = lambda_path(data, options.effective_pipeline().stage1);
    const std::string text = format_path(path, ';');
    out << text;
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        auto file = open_out(join_path(out_dir, "path.csv"));
        file << format_path(path, ',');
    }
    return kExitOk;
}

} // namespace cointbreak
