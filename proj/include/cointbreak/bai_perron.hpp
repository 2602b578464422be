#pragma once

#include <cointbreak/design.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace cointbreak {

/// Upper-triangular segment cost table over local 1-based indices.
/// c(i, j) is the SSR of an OLS fit of y on (1, X) (plus W when the data is
/// augmented) over rows i..j, +inf when j - i + 1 < min_seg.
class CostMatrix {
public:
    CostMatrix(std::size_t length, std::size_t min_seg);

    std::size_t length() const { return length_; }
    std::size_t min_seg() const { return min_seg_; }
    double operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);

private:
    std::size_t length_;
    std::size_t min_seg_;
    std::vector<double> values_; // row-major T x T, entries with j < i unused
};

/// Rows are built by Givens updates of a running QR, O(T^2 p^2) overall.
/// Throws InputError when min_seg < N + K + 2 or min_seg > T.
CostMatrix ssr_table(const TimeSeriesData& data, std::size_t min_seg);

struct Partition {
    std::vector<std::size_t> breakpoints; // local 1-based, first row of each new segment
    double ssr = 0.0;
};

/// Exact minimizer of total segment cost with m breaks. Among equal costs the
/// partition with the earliest last break wins at every level of the recursion.
/// Throws InfeasibleError when (m + 1) min_seg > T.
Partition optimal_partition(const CostMatrix& cost, std::size_t m);

/// All optimal partitions for m = 0 ... m_max from one DP pass; entries for
/// infeasible m are omitted (the vector is shorter).
std::vector<Partition> optimal_partitions(const CostMatrix& cost, std::size_t m_max);

struct BaiPerronOptions {
    std::size_t min_seg = 0; // 0: max(N + K + 2, ceil(0.15 T))
    // BIC parameter count p_m = base + m * per_break; defaults
    // base = 1 + N + K, per_break = N + 1 (slopes plus the break date).
    std::optional<double> base_params;
    std::optional<double> params_per_break;

    std::size_t resolved_min_seg(std::size_t t, std::size_t n, std::size_t k) const;
};

struct BaiPerronFit {
    std::vector<Partition> partitions; // index m
    std::vector<double> bic;           // same length, from the common-intercept refit
    std::size_t selected = 0;
    BreakModel model;
};

/// DP for m = 0 ... m_max, each partition refit by segment_ols; m chosen by
/// BIC = log(SSR/T) + p_m log(T)/T with ties toward fewer breaks.
BaiPerronFit select_num_breaks_traced(const TimeSeriesData& data, std::size_t m_max,
                                      const BaiPerronOptions& options = {});
BreakModel select_num_breaks(const TimeSeriesData& data, std::size_t m_max,
                             const BaiPerronOptions& options = {});

} // namespace cointbreak
