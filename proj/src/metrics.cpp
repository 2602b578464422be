#include <cointbreak/errors.hpp>
#include <cointbreak/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace cointbreak {

namespace {

double directed(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    double worst = 0.0;
    for (auto b : to) {
        double nearest = std::numeric_limits<double>::infinity();
        for (auto a : from) {
            nearest = std::min(nearest, std::abs(static_cast<double>(b) - static_cast<double>(a)));
        }
        worst = std::max(worst, nearest);
    }
    return worst;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string cell(double mean, double sd, int mean_digits, int sd_digits) {
    if (std::isnan(mean)) {
        return "NA";
    }
    char buf[64];
    if (std::isnan(sd)) {
        std::snprintf(buf, sizeof buf, "%.*f", mean_digits, mean);
    } else {
        std::snprintf(buf, sizeof buf, "%.*f (%.*f)", mean_digits, mean, sd_digits, sd);
    }
    return buf;
}

std::string number(double value, int digits) {
    if (std::isnan(value)) {
        return "NA";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

nlohmann::ordered_json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json matrix_json(const Matrix& m) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(finite_or_null(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

double hausdorff(const std::vector<std::size_t>& estimated, const std::vector<std::size_t>& truth,
                 std::size_t length) {
    if (estimated.empty() && truth.empty()) {
        return 0.0;
    }
    if (estimated.empty() || truth.empty()) {
        return static_cast<double>(length);
    }
    return directed(estimated, truth);
}

double symmetric_hausdorff(const std::vector<std::size_t>& estimated, const std::vector<std::size_t>& truth,
                           std::size_t length) {
    if (estimated.empty() && truth.empty()) {
        return 0.0;
    }
    if (estimated.empty() || truth.empty()) {
        return static_cast<double>(length);
    }
    return std::max(directed(estimated, truth), directed(truth, estimated));
}

RunRecord evaluate_run(const BreakModel& estimate, const BreakModel& truth, std::size_t length) {
    if (length == 0) {
        throw InputError("sample length must be positive");
    }
    RunRecord rec;
    rec.length = length;
    rec.m_hat = estimate.num_breaks();
    rec.m_true = truth.num_breaks();
    rec.correct = rec.m_hat == rec.m_true;
    const double tt = static_cast<double>(length);
    rec.hd_frac = hausdorff(estimate.breakpoints, truth.breakpoints, length) / tt;
    rec.hd_sym_frac = symmetric_hausdorff(estimate.breakpoints, truth.breakpoints, length) / tt;
    rec.breakpoints = estimate.breakpoints;
    for (auto b : estimate.breakpoints) {
        rec.tau_hat.push_back(static_cast<double>(b) / tt);
    }
    rec.coefficients = estimate.coefficient_changes();
    rec.intercept = estimate.intercept;
    return rec;
}

MonteCarloReport aggregate(const std::vector<RunRecord>& records, bool include_all, std::string name) {
    if (records.empty()) {
        throw InputError("no records to aggregate");
    }
    MonteCarloReport rep;
    rep.name = std::move(name);
    rep.length = records.front().length;
    rep.width = static_cast<std::size_t>(records.front().coefficients.cols());
    rep.m_true = records.front().m_true;
    rep.runs = records.size();
    rep.include_all = include_all;

    std::vector<double> hd;
    std::vector<double> hd_sym;
    const std::size_t m0 = rep.m_true;
    std::vector<std::vector<double>> taus(m0);
    std::vector<std::vector<double>> thetas((m0 + 1) * rep.width);
    for (const auto& r : records) {
        if (r.length != rep.length || r.m_true != m0 ||
            static_cast<std::size_t>(r.coefficients.cols()) != rep.width) {
            throw InputError("records come from different designs");
        }
        if (rep.m_hat_counts.size() <= r.m_hat) {
            rep.m_hat_counts.resize(r.m_hat + 1, 0);
        }
        ++rep.m_hat_counts[r.m_hat];
        if (r.correct || include_all) {
            hd.push_back(r.hd_frac);
            hd_sym.push_back(r.hd_sym_frac);
        }
        if (!r.correct) {
            continue;
        }
        ++rep.correct;
        for (std::size_t j = 0; j < m0; ++j) {
            taus[j].push_back(r.tau_hat[j]);
        }
        for (std::size_t k = 0; k <= m0; ++k) {
            for (std::size_t i = 0; i < rep.width; ++i) {
                thetas[k * rep.width + i].push_back(
                    r.coefficients(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)));
            }
        }
    }
    rep.pce = 100.0 * static_cast<double>(rep.correct) / static_cast<double>(rep.runs);
    rep.hd_pct = 100.0 * mean_of(hd);
    rep.hd_sym_pct = 100.0 * mean_of(hd_sym);
    for (std::size_t j = 0; j < m0; ++j) {
        rep.tau_mean.push_back(mean_of(taus[j]));
        rep.tau_sd.push_back(sd_of(taus[j]));
    }
    const auto rows = static_cast<Eigen::Index>(m0 + 1);
    const auto cols = static_cast<Eigen::Index>(rep.width);
    rep.theta_mean.resize(rows, cols);
    rep.theta_sd.resize(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k) {
        for (Eigen::Index i = 0; i < cols; ++i) {
            const auto& v = thetas[static_cast<std::size_t>(k * cols + i)];
            rep.theta_mean(k, i) = mean_of(v);
            rep.theta_sd(k, i) = sd_of(v);
        }
    }
    return rep;
}

std::string format_table(const MonteCarloReport& report, char delimiter, bool header) {
    std::ostringstream out;
    const std::size_t m0 = report.m_true;
    if (header) {
        out << "T" << delimiter << "pce" << delimiter << "hd/T";
        for (std::size_t j = 0; j < m0; ++j) {
            out << delimiter << (m0 == 1 ? std::string("tau") : "tau_" + std::to_string(j + 1));
        }
        for (std::size_t i = 0; i < report.width; ++i) {
            for (std::size_t k = 0; k <= m0; ++k) {
                out << delimiter << "theta_" << i + 1 << "," << k + 1;
            }
        }
        out << delimiter << "hd_sym/T" << delimiter << "n_correct" << '\n';
    }
    out << report.length << delimiter << number(report.pce, 1) << delimiter << number(report.hd_pct, 2);
    for (std::size_t j = 0; j < m0; ++j) {
        out << delimiter << cell(report.tau_mean[j], report.tau_sd[j], 3, 3);
    }
    for (std::size_t i = 0; i < report.width; ++i) {
        for (std::size_t k = 0; k <= m0; ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            const auto c = static_cast<Eigen::Index>(i);
            out << delimiter << cell(report.theta_mean(r, c), report.theta_sd(r, c), 2, 3);
        }
    }
    out << delimiter << number(report.hd_sym_pct, 2) << delimiter << report.correct << '\n';
    return out.str();
}

nlohmann::ordered_json to_json(const RunRecord& record) {
    nlohmann::ordered_json j;
    j["T"] = record.length;
    j["m_hat"] = record.m_hat;
    j["m_true"] = record.m_true;
    j["correct"] = record.correct;
    j["hd_over_T"] = record.hd_frac;
    j["hd_sym_over_T"] = record.hd_sym_frac;
    j["breakpoints"] = record.breakpoints;
    j["tau_hat"] = record.tau_hat;
    j["intercept"] = record.intercept;
    j["coefficients"] = matrix_json(record.coefficients);
    return j;
}

nlohmann::ordered_json to_json(const MonteCarloReport& report) {
    nlohmann::ordered_json j;
    j["name"] = report.name;
    j["T"] = report.length;
    j["N"] = report.width;
    j["m_true"] = report.m_true;
    j["runs"] = report.runs;
    j["correct"] = report.correct;
    j["include_all"] = report.include_all;
    j["pce"] = report.pce;
    j["hd_over_T_pct"] = finite_or_null(report.hd_pct);
    j["hd_sym_over_T_pct"] = finite_or_null(report.hd_sym_pct);
    auto tau = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < report.tau_mean.size(); ++k) {
        tau.push_back({{"mean", finite_or_null(report.tau_mean[k])}, {"sd", finite_or_null(report.tau_sd[k])}});
    }
    j["tau"] = std::move(tau);
    j["theta_mean"] = matrix_json(report.theta_mean);
    j["theta_sd"] = matrix_json(report.theta_sd);
    j["m_hat_counts"] = report.m_hat_counts;
    return j;
}

} // namespace cointbreak
