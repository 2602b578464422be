#include <cointbreak/config_file.hpp>
#include <cointbreak/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cointbreak {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) {
        out.push_back(trim(part));
    }
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& what) {
    throw InputError("invalid value '" + value + "' for " + key + ": expected " + what);
}

double to_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        bad(key, value, "a number");
    }
    if (used != value.size() || !std::isfinite(out)) {
        bad(key, value, "a finite number");
    }
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    if (value.empty() || !std::all_of(value.begin(), value.end(), [](unsigned char c) { return std::isdigit(c); })) {
        bad(key, value, "a nonnegative integer");
    }
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        bad(key, value, "a nonnegative integer");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    bad(key, value, "true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (trim(value).empty()) {
        return out;
    }
    for (const auto& part : split(value, ',')) {
        out.push_back(to_real(key, part));
    }
    return out;
}

Vector to_vector(const std::string& key, const std::string& value) {
    const auto list = to_list(key, value);
    return Eigen::Map<const Vector>(list.data(), static_cast<Eigen::Index>(list.size()));
}

std::size_t to_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(to_unsigned(key, value));
}

} // namespace

void RunOptions::validate() const {
    if (method != "lasso" && method != "baiperron" && method != "both") {
        throw InputError("method must be lasso, baiperron or both");
    }
    if (jobs == 0) {
        throw InputError("jobs must be positive");
    }
    if (pipeline.max_breaks == 0) {
        throw InputError("max_breaks must be positive");
    }
    if (min_regime && *min_regime == 0) {
        throw InputError("min_regime must be positive");
    }
    pipeline.stage1.validate();
    pipeline.stage2.validate();
}

PipelineConfig RunOptions::effective_pipeline() const {
    PipelineConfig out = pipeline;
    if (min_regime) {
        out.stage1.min_spacing = *min_regime;
    }
    return out;
}

BaiPerronOptions RunOptions::effective_bai_perron() const {
    BaiPerronOptions out = bai_perron;
    if (min_regime && out.min_seg == 0) {
        out.min_seg = *min_regime;
    }
    return out;
}

std::vector<KeyValue> parse_key_values(std::istream& in) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("line " + std::to_string(line_no) + ": expected key = value");
        }
        KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (kv.key.empty()) {
            throw InputError("line " + std::to_string(line_no) + ": empty key");
        }
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<KeyValue> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config file " + path);
    }
    return parse_key_values(in);
}

std::vector<std::string> config_keys() {
    return {"scenario",       "name",           "T",              "N",
            "reps",           "mu",             "baseline_beta",  "break_fractions",
            "jumps",          "sigma_theta_sq", "sigma_omega_sq", "endogenous",
            "endogenous_cov", "augment",        "seed",           "delta",
            "c0_grid",        "max_candidates", "min_spacing",    "trim_lo",
            "trim_hi",        "tol",            "max_iter",       "rho",
            "gamma",          "grid_size",      "lambda_lo",      "lambda_hi",
            "max_breaks",     "min_regime",     "min_seg",        "bic_base_params",
            "bic_params_per_break", "leads_lags", "method",       "jobs",
            "include_all"};
}

void apply_setting(const std::string& key, const std::string& value, RunOptions& o) {
    auto& s1 = o.pipeline.stage1;
    auto& s2 = o.pipeline.stage2;
    auto& sim = o.sim;
    if (key == "scenario") {
        const auto seed = sim.seed;
        sim = scenario(value);
        sim.seed = seed;
        s1.trim_lo = sim.trim_lo;
        s1.trim_hi = sim.trim_hi;
        o.pipeline.max_breaks = sim.max_breaks;
        o.leads_lags = sim.augment ? std::optional<std::size_t>(sim.leads_lags) : std::nullopt;
    } else if (key == "name") {
        sim.name = value;
    } else if (key == "T") {
        sim.T = to_size(key, value);
    } else if (key == "N") {
        sim.N = to_size(key, value);
    } else if (key == "reps") {
        sim.reps = to_size(key, value);
    } else if (key == "mu") {
        sim.mu = to_real(key, value);
    } else if (key == "baseline_beta") {
        sim.baseline_beta = to_vector(key, value);
    } else if (key == "break_fractions") {
        sim.break_fractions = to_list(key, value);
    } else if (key == "jumps") {
        sim.jumps.clear();
        if (!trim(value).empty()) {
            for (const auto& part : split(value, ';')) {
                sim.jumps.push_back(to_vector(key, part));
            }
        }
    } else if (key == "sigma_theta_sq") {
        sim.sigma_theta_sq = to_real(key, value);
    } else if (key == "sigma_omega_sq") {
        sim.sigma_omega_sq = to_real(key, value);
    } else if (key == "endogenous") {
        sim.endogenous = to_bool(key, value);
    } else if (key == "endogenous_cov") {
        sim.endogenous_cov = to_real(key, value);
    } else if (key == "augment") {
        sim.augment = to_bool(key, value);
        if (!sim.augment) {
            o.leads_lags.reset();
        } else {
            o.leads_lags = sim.leads_lags;
        }
    } else if (key == "seed") {
        o.seed = to_unsigned(key, value);
        sim.seed = o.seed;
    } else if (key == "delta") {
        s1.delta = to_real(key, value);
        s2.delta = s1.delta;
    } else if (key == "c0_grid") {
        s1.c0_grid = to_list(key, value);
    } else if (key == "max_candidates") {
        s1.max_candidates = to_size(key, value);
        o.pipeline.candidates_from_max_breaks = false;
    } else if (key == "min_spacing") {
        s1.min_spacing = to_size(key, value);
        s2.min_spacing = s1.min_spacing;
    } else if (key == "trim_lo") {
        s1.trim_lo = to_real(key, value);
        sim.trim_lo = s1.trim_lo;
    } else if (key == "trim_hi") {
        s1.trim_hi = to_real(key, value);
        sim.trim_hi = s1.trim_hi;
    } else if (key == "tol") {
        s1.tol = to_real(key, value);
        s2.tol = s1.tol;
    } else if (key == "max_iter") {
        s1.max_iter = to_size(key, value);
        s2.max_iter = s1.max_iter;
    } else if (key == "rho") {
        s1.rho = to_real(key, value);
    } else if (key == "gamma") {
        s2.gamma = to_real(key, value);
    } else if (key == "grid_size") {
        s2.grid_size = to_size(key, value);
    } else if (key == "lambda_lo") {
        s2.lambda_lo = to_real(key, value);
    } else if (key == "lambda_hi") {
        s2.lambda_hi = to_real(key, value);
    } else if (key == "max_breaks") {
        o.pipeline.max_breaks = to_size(key, value);
        sim.max_breaks = o.pipeline.max_breaks;
    } else if (key == "min_regime") {
        o.min_regime = to_size(key, value);
    } else if (key == "min_seg") {
        o.bai_perron.min_seg = to_size(key, value);
    } else if (key == "bic_base_params") {
        o.bai_perron.base_params = to_real(key, value);
    } else if (key == "bic_params_per_break") {
        o.bai_perron.params_per_break = to_real(key, value);
    } else if (key == "leads_lags") {
        o.leads_lags = to_size(key, value);
        sim.leads_lags = *o.leads_lags;
        sim.augment = true;
    } else if (key == "method") {
        o.method = value;
    } else if (key == "jobs") {
        o.jobs = to_size(key, value);
    } else if (key == "include_all") {
        o.include_all = to_bool(key, value);
    } else {
        throw InputError("unknown configuration key '" + key + "'");
    }
}

void apply_config(const std::vector<KeyValue>& entries, RunOptions& options) {
    auto run = [&](const KeyValue& kv) {
        try {
            apply_setting(kv.key, kv.value, options);
        } catch (const InputError& e) {
            throw InputError("config line " + std::to_string(kv.line) + ": " + e.what());
        }
    };
    for (const auto& kv : entries) {
        if (kv.key == "scenario") {
            run(kv);
        }
    }
    for (const auto& kv : entries) {
        if (kv.key != "scenario") {
            run(kv);
        }
    }
}

} // namespace cointbreak
