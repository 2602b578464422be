#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace cointbreak {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Time indices in this library are 1-based, as in the model
//   y_t = mu + beta_j' X_t + u_t   for t_{j-1} <= t < t_j,
// so a breakpoint t_j is the first observation of regime j+1.

/// Response, integrated regressors and (optionally) unpenalized stationary
/// regressors for one sample. Immutable after construction.
class TimeSeriesData {
public:
    /// Throws InputError unless T >= 2(N+1), N >= 1 and all entries are finite.
    TimeSeriesData(Vector y, Matrix x, std::vector<std::string> labels = {});

    /// Sample that carries extra regime-constant columns `w` (lead/lag
    /// differences). `first_index` is the original-sample index of row 1.
    TimeSeriesData(Vector y, Matrix x, Matrix w, std::size_t first_index,
                   std::vector<std::string> labels = {});

    std::size_t length() const { return static_cast<std::size_t>(y_.size()); }
    std::size_t width() const { return static_cast<std::size_t>(x_.cols()); }
    std::size_t augment_width() const { return static_cast<std::size_t>(w_.cols()); }
    bool augmented() const { return w_.cols() > 0; }

    const Vector& y() const { return y_; }
    const Matrix& x() const { return x_; }
    /// T x K; K == 0 when not augmented.
    const Matrix& w() const { return w_; }

    /// Original-sample index of local row `t` (both 1-based).
    std::size_t original_index(std::size_t t) const { return t + first_index_ - 1; }
    /// Local row of original-sample index `t`.
    std::size_t local_index(std::size_t t) const { return t + 1 - first_index_; }
    std::size_t first_index() const { return first_index_; }

    /// Optional opaque row labels (e.g. dates), one per local row or empty.
    const std::vector<std::string>& labels() const { return labels_; }

private:
    void validate() const;

    Vector y_;
    Matrix x_;
    Matrix w_;
    std::size_t first_index_ = 1;
    std::vector<std::string> labels_;
};

struct ThetaGroup {
    std::size_t index; // 1-based time index; 1 is the baseline group
    Vector change;
};

/// Sparse group-structured coefficient-change vector theta(T). Group 1 holds
/// the baseline slope beta_1, group t_j holds beta_{j+1} - beta_j.
class ThetaVector {
public:
    ThetaVector() = default;
    ThetaVector(std::size_t length, std::size_t width);

    /// Rows of `dense` are groups 1..T; zero rows other than the baseline are dropped.
    static ThetaVector from_dense(const Matrix& dense);

    /// Differences a piecewise-constant slope path (rows = segments) into groups.
    static ThetaVector from_segments(std::size_t length,
                                     const std::vector<std::size_t>& breakpoints,
                                     const Matrix& segment_betas);

    /// Inserts or replaces group `index`.
    void set(std::size_t index, const Vector& change);

    std::size_t length() const { return length_; }
    std::size_t width() const { return width_; }
    const std::vector<ThetaGroup>& groups() const { return groups_; }

    /// Group `index`, or the zero vector when it is not stored.
    Vector group(std::size_t index) const;

    /// T x N dense form.
    Matrix to_dense() const;

    /// Indices >= 2 whose group has a nonzero entry.
    std::vector<std::size_t> active_changes() const;

private:
    std::size_t length_ = 0;
    std::size_t width_ = 0;
    std::vector<ThetaGroup> groups_; // sorted by index, unique
};

/// Fitted structural-break model in the original sample's time indices.
struct BreakModel {
    std::vector<std::size_t> breakpoints; // t_1 < ... < t_m, original-sample indices
    Matrix segment_betas;                 // (m+1) x N
    double intercept = 0.0;
    Vector augment_coefs;                 // length K, empty without augmentation
    Vector residuals;                     // one per local row of the fitted sample
    double ssr = 0.0;

    std::size_t num_breaks() const { return breakpoints.size(); }
    /// Baseline slope followed by the m slope changes, (m+1) x N.
    Matrix coefficient_changes() const;
};

/// Row t-1 holds beta_t = sum_{i <= t} theta_i. O(TN).
Matrix cumulative_coefficients(const ThetaVector& theta);

/// y_hat_t = mu + beta_t' X_t via a running prefix sum; Z_T is never formed.
/// The W block, if any, is not included.
Vector fitted_values(const TimeSeriesData& data, const ThetaVector& theta, double intercept);
Vector fitted_values(const Matrix& x, const Matrix& theta_dense, double intercept);

/// Row i-1 holds g_i = sum_{s >= i} X_s r_s (one backward pass, O(TN)).
Matrix gradient_blocks(const TimeSeriesData& data, const Vector& residual);
Matrix gradient_blocks(const Matrix& x, const Vector& residual);

/// Row i-1 holds H_i = sum_{s >= i} X_s X_s' stored row-major as N*N entries.
Matrix suffix_gram(const Matrix& x);

/// Joint least squares for a common intercept, common W coefficients and
/// regime-specific slopes at the given breakpoints (original-sample indices).
/// Throws InfeasibleError if a regime has fewer than N + K + 2 observations
/// and RankDeficientError if the stacked design is rank deficient.
BreakModel segment_ols(const TimeSeriesData& data, const std::vector<std::size_t>& breakpoints);

} // namespace cointbreak
