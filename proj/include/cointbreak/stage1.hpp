#pragma once

#include <cointbreak/design.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace cointbreak {

/// Log-spaced values from `lo` to `hi` inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct Stage1Config {
    double delta = 0.55;                                  // lambda_T = 2 N c0 T^delta
    std::vector<double> c0_grid = log_spaced(0.01, 10.0, 40);
    std::size_t max_candidates = 10;                      // M
    std::size_t min_spacing = 0;                          // 0: max(ceil(0.02 T), N + K + 2)
    double trim_lo = 0.15;
    double trim_hi = 0.15;
    double tol = 1e-6;                                    // absolute KKT tolerance
    std::size_t max_iter = 200000;                        // sweeps
    std::optional<double> rho;                            // IC penalty; default (log T / T) log log(TN)
    bool record_objective = false;

    /// Throws InputError on out-of-range fields.
    void validate() const;
    std::size_t resolved_min_spacing(std::size_t t, std::size_t n, std::size_t k) const;
};

/// Admissible change indices [first, last]; the baseline group 1 is always
/// part of the problem in addition to these.
struct CandidateWindow {
    std::size_t first = 2;
    std::size_t last = 0;

    bool contains(std::size_t t) const { return t >= first && t <= last; }
    std::size_t size() const { return last >= first ? last - first + 1 : 0; }
};

/// Both edge regimes keep at least max(trim * T, min_regime) observations.
/// Throws InfeasibleError when no index survives.
CandidateWindow candidate_window(std::size_t t, double trim_lo, double trim_hi, std::size_t min_regime);
CandidateWindow candidate_window(const TimeSeriesData& data, const Stage1Config& config);

struct Stage1Solution {
    ThetaVector theta;
    double intercept = 0.0;
    Vector augment_coefs;
    std::vector<std::size_t> active_set; // indices >= 2 with nonzero groups
    double lambda = 0.0;
    double ssr = 0.0;
    double ic_value = 0.0;
    double objective = 0.0;
    double kkt_violation = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;
    std::vector<double> objective_trace; // filled when Stage1Config::record_objective
};

/// max(0, 1 - kappa / ||v||) v.
Vector group_soft_threshold(const Vector& v, double kappa);

/// Q*(theta) = (1/T)||y - mu - W c - Z theta||^2 + lambda sum_i ||theta_i||.
double stage1_objective(const TimeSeriesData& data, const ThetaVector& theta, double intercept,
                        const Vector& augment_coefs, double lambda);

/// Smallest lambda for which the all-zero theta is optimal:
/// (2/T) max_i ||g_i(r0)|| over the baseline and window, r0 the residual of
/// y on the unpenalized columns.
double lambda_max_stage1(const TimeSeriesData& data, const CandidateWindow& window);

/// Cyclic block coordinate descent with majorized block steps. Returns the
/// last iterate with `converged == false` if max_iter sweeps are exhausted.
Stage1Solution solve_group_lasso(const TimeSeriesData& data, double lambda, const Stage1Config& config,
                                 const ThetaVector* warm_start = nullptr);

/// Largest KKT residual of the group lasso problem at theta, with the
/// intercept and W coefficients profiled out by least squares. Groups
/// outside the window must be zero; otherwise +inf is returned.
double kkt_check_stage1(const TimeSeriesData& data, const ThetaVector& theta, double lambda,
                        const CandidateWindow& window);
double kkt_check_stage1(const TimeSeriesData& data, const ThetaVector& theta, double lambda);

/// The lambda grid {2 N c0 T^delta}, clipped to lambda_max, in decreasing order.
std::vector<double> stage1_lambda_grid(const TimeSeriesData& data, const Stage1Config& config);

/// Warm-started solutions along stage1_lambda_grid, largest lambda first.
/// ic_value is filled using the default (or configured) rho.
std::vector<Stage1Solution> lambda_path(const TimeSeriesData& data, const Stage1Config& config);

double stage1_rho(std::size_t t, std::size_t n);

/// IC*(lambda) = log(SSR/T) + rho |A_T|; ties go to the larger lambda.
Stage1Solution select_stage1(const std::vector<Stage1Solution>& path, std::size_t t, std::size_t n,
                             std::optional<double> rho = std::nullopt);

/// Clusters active indices closer than `min_spacing`, keeps the largest
/// group norm of each cluster, then the `max_candidates` largest overall.
/// Result is sorted.
std::vector<std::size_t> screen_candidates(const Stage1Solution& solution, std::size_t min_spacing,
                                           std::size_t max_candidates);

/// Smallest eigenvalue of Z_S' Z_S / T^2 for the baseline plus `candidates`.
double reduced_gram_min_eigenvalue(const TimeSeriesData& data, const std::vector<std::size_t>& candidates);

} // namespace cointbreak
