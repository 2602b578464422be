#pragma once

// Slow reference implementations used only by the tests.

#include <cointbreak/design.hpp>
#include <cointbreak/stage2.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using cointbreak::Matrix;
using cointbreak::TimeSeriesData;
using cointbreak::Vector;

/// Random-walk regressors with a few random slope breaks and N(0, 1) noise.
/// With k_aug > 0 an extra stationary W block is attached.
TimeSeriesData random_series(std::mt19937_64& rng, std::size_t t, std::size_t n, std::size_t k_aug = 0);

/// T x TN matrix with block (t, i) = X_t' when t >= i.
Matrix dense_z(const Matrix& x);

/// Stacks a T x N theta into the TN vector matching dense_z.
Vector stack(const Matrix& theta_dense);

struct Fit {
    double objective = 0.0;
    Vector beta; // [mu, c, groups...]
    std::size_t iterations = 0;
};

/// Group-penalized least squares on an explicit design:
///   (1/T)||y - A b||^2 + sum_j pen_j ||b_{group j}||,
/// the first `unpen` columns are free and the rest form equal-width groups.
/// Accelerated proximal gradient with adaptive restart.
Fit proximal_gradient(const Matrix& a, const Vector& y, std::size_t unpen, std::size_t width,
                      const std::vector<double>& penalties, std::size_t max_iter = 400000);

/// Stage-1 problem: groups {1} U [first, last], all penalized by lambda.
Fit stage1_reference(const TimeSeriesData& data, double lambda, std::size_t first, std::size_t last);

/// Stage-2 problem on the baseline plus finite-weight candidates.
Fit stage2_reference(const TimeSeriesData& data, const cointbreak::WeightVector& weights, double lambda);

/// Largest KKT residual of the explicit problem at b (free block gradient,
/// then per group either ||grad + pen u|| or max(0, ||grad|| - pen)).
double dense_kkt(const Matrix& a, const Vector& y, std::size_t unpen, std::size_t width,
                 const std::vector<double>& penalties, const Vector& b);

/// SSR of y on [1, X, W] over local rows i..j by dense least squares.
double segment_ssr(const TimeSeriesData& data, std::size_t i, std::size_t j);

struct Enumerated {
    std::vector<std::size_t> breakpoints;
    double ssr = 0.0;
};

/// Exhaustive search over all m-break partitions with segments >= min_seg.
Enumerated enumerate_partitions(const TimeSeriesData& data, std::size_t m, std::size_t min_seg);


struct SweepResult {
    std::size_t instances = 0;
    double max_objective_gap = 0.0; // relative
    double max_kkt = 0.0;           // library check
    double max_dense_kkt = 0.0;     // oracle check on the library solution
};

/// Random stage-1 instances (T in [12, 40], N in {1, 2}, some with a W block)
/// solved by the library and by proximal_gradient.
SweepResult stage1_sweep(std::uint64_t seed, std::size_t count);
SweepResult stage2_sweep(std::uint64_t seed, std::size_t count);

/// Largest relative error of prefix/suffix fitted values and gradient blocks
/// against dense_z products (T in [2, 50]).
double structure_sweep(std::uint64_t seed, std::size_t count);

struct PartitionSweep {
    std::size_t instances = 0;
    std::size_t mismatches = 0;
    double max_ssr_gap = 0.0; // relative
};

/// DP against enumerate_partitions on T = 20 instances for m = 0, 1, 2.
PartitionSweep partition_sweep(std::uint64_t seed, std::size_t count);

} // namespace oracle
