#pragma once

#include <cointbreak/design.hpp>
#include <cointbreak/stage1.hpp>

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace cointbreak {

/// Adaptive weights for the reduced design. The baseline group always has
/// weight 0; a weight of +inf marks a candidate that can never re-enter.
struct WeightVector {
    std::vector<std::size_t> candidates; // sorted change indices (local, 1-based)
    std::vector<double> weights;         // same length as candidates

    static constexpr double excluded = std::numeric_limits<double>::infinity();
    static constexpr double baseline = 0.0;

    /// Candidates with finite weight, in order.
    std::vector<std::size_t> live() const;
};

struct Stage2Config {
    double gamma = 1.0;
    double delta = 0.55;          // first-step rate, used for the default grid bounds
    std::size_t grid_size = 60;
    std::optional<double> lambda_lo; // default T^-1
    std::optional<double> lambda_hi; // default max(T^{-(1-delta) gamma / 2}, lambda_max)
    std::size_t min_spacing = 0;  // 0: not checked
    double tol = 1e-6;
    std::size_t max_iter = 200000;

    void validate() const;
};

struct Stage2Solution {
    ThetaVector theta_s;                 // baseline group 1 plus candidate groups
    std::vector<std::size_t> active;     // candidates with nonzero groups
    double intercept = 0.0;
    Vector augment_coefs;
    double lambda = 0.0;
    double ssr = 0.0;
    double bic = 0.0;
    double objective = 0.0;
    double kkt_violation = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;
};

/// w_i = ||theta_i||^-gamma for the stage-1 group at each candidate; groups
/// that are zero in stage 1 get WeightVector::excluded.
WeightVector compute_weights(const Stage1Solution& stage1, const std::vector<std::size_t>& candidates,
                             double gamma);

/// Q(theta_S) = (1/T)||y - mu - W c - Z_S theta_S||^2 + lambda sum_i w_i ||theta_S,i||.
double stage2_objective(const TimeSeriesData& data, const WeightVector& weights,
                        const Stage2Solution& solution, double lambda);

/// Block coordinate descent on the reduced design with per-group threshold
/// lambda * w_i; the baseline, intercept and W block are solved exactly each sweep.
Stage2Solution solve_adaptive_group_lasso(const TimeSeriesData& data, const WeightVector& weights,
                                          double lambda, const Stage2Config& config);

/// Largest KKT residual of the adaptive problem at `solution`.
double kkt_check_stage2(const TimeSeriesData& data, const WeightVector& weights,
                        const Stage2Solution& solution, double lambda);

/// Smallest lambda at which every live candidate is zero.
double lambda_max_stage2(const TimeSeriesData& data, const WeightVector& weights);

/// Log-spaced grid, largest first.
std::vector<double> stage2_lambda_grid(const TimeSeriesData& data, const WeightVector& weights,
                                       const Stage2Config& config);

double stage2_bic(double ssr, std::size_t active, std::size_t t, std::size_t n);

/// BIC(lambda) = log(SSR/T) + m N log(T)/T; ties go to the larger lambda.
Stage2Solution select_stage2(const TimeSeriesData& data, const WeightVector& weights,
                             const std::vector<double>& lambda_grid, const Stage2Config& config);

struct PipelineConfig {
    Stage1Config stage1;
    Stage2Config stage2;
    std::size_t max_breaks = 5; // m*; M defaults to 2 m*
    bool candidates_from_max_breaks = true;
};

struct EstimateTrace {
    std::vector<Stage1Solution> path;
    Stage1Solution stage1;
    std::vector<std::size_t> candidates;
    WeightVector weights;
    std::optional<Stage2Solution> stage2;
    BreakModel model;
};

/// lambda_path -> select_stage1 -> screen_candidates -> compute_weights ->
/// select_stage2 -> segment_ols. Breakpoints are reported in original-sample
/// indices. No surviving candidate yields the plain OLS model.
EstimateTrace estimate_breaks_traced(const TimeSeriesData& data, const PipelineConfig& config);
BreakModel estimate_breaks(const TimeSeriesData& data, const PipelineConfig& config);

} // namespace cointbreak
