#pragma once

#include <cointbreak/design.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace cointbreak {

/// max over b in truth of min over a in estimated of |b - a|. Either set
/// empty gives `length` (the fraction-1 convention in observation units);
/// both empty gives 0.
double hausdorff(const std::vector<std::size_t>& estimated, const std::vector<std::size_t>& truth,
                 std::size_t length);

/// Secondary diagnostic: max of both one-sided distances, so overselection shows up.
double symmetric_hausdorff(const std::vector<std::size_t>& estimated, const std::vector<std::size_t>& truth,
                           std::size_t length);

struct RunRecord {
    std::size_t length = 0;
    std::size_t m_hat = 0;
    std::size_t m_true = 0;
    bool correct = false;
    double hd_frac = 0.0;     // hausdorff / T
    double hd_sym_frac = 0.0; // symmetric_hausdorff / T
    std::vector<std::size_t> breakpoints;
    std::vector<double> tau_hat; // breakpoint / T
    Matrix coefficients;         // (m_hat + 1) x N: baseline slope then slope changes
    double intercept = 0.0;
};

RunRecord evaluate_run(const BreakModel& estimate, const BreakModel& truth, std::size_t length);

struct MonteCarloReport {
    std::string name;
    std::size_t length = 0;
    std::size_t width = 0;
    std::size_t m_true = 0;
    std::size_t runs = 0;
    std::size_t correct = 0;
    bool include_all = false;        // hd averages over every run instead of correct-m runs
    double pce = 0.0;                // percent
    double hd_pct = 0.0;             // mean hd/T in percent
    double hd_sym_pct = 0.0;         // mean symmetric hd/T in percent
    std::vector<double> tau_mean;    // conditional on correct m
    std::vector<double> tau_sd;
    Matrix theta_mean;               // (m_true + 1) x N, conditional on correct m
    Matrix theta_sd;
    std::vector<std::size_t> m_hat_counts; // histogram, index m_hat
};

/// Throws InputError on empty or inconsistent records. Standard deviations
/// use the n - 1 divisor and are NaN with fewer than two correct runs.
MonteCarloReport aggregate(const std::vector<RunRecord>& records, bool include_all = false,
                           std::string name = {});

/// Table row(s) with the column layout T, pce, hd/T, tau_j, theta_{i,k};
/// cells read "mean (sd)". Symmetric hd/T and the correct-run count follow.
std::string format_table(const MonteCarloReport& report, char delimiter = ';', bool header = true);

nlohmann::ordered_json to_json(const RunRecord& record);
nlohmann::ordered_json to_json(const MonteCarloReport& report);

} // namespace cointbreak
