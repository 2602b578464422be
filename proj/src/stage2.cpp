#include <cointbreak/errors.hpp>
#include <cointbreak/stage2.hpp>

#include "group_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cointbreak {

namespace {

// Reduced problem in Gram form. Column layout of the stacked design:
// [1, W (K), X (baseline, N), X 1{t >= c_1} (N), ...].
struct ReducedProblem {
    std::vector<std::size_t> candidates; // live candidates only
    Eigen::Index n = 0;
    Eigen::Index k = 0;
    Eigen::Index unpen = 0; // 1 + K + N
    double t_real = 0.0;
    std::optional<detail::GroupSolver> solver;

    Eigen::Index offset(std::size_t group) const {
        return unpen + static_cast<Eigen::Index>(group) * n;
    }
    Eigen::Index size() const { return unpen + static_cast<Eigen::Index>(candidates.size()) * n; }
    const detail::GroupProblem& gp() const { return solver->problem(); }
};

ReducedProblem build_problem(const TimeSeriesData& data, const WeightVector& weights) {
    if (weights.candidates.size() != weights.weights.size()) {
        throw InputError("weights and candidates differ in length");
    }
    ReducedProblem p;
    detail::GroupProblem gp;
    for (std::size_t j = 0; j < weights.candidates.size(); ++j) {
        const double w = weights.weights[j];
        if (std::isinf(w)) {
            continue;
        }
        if (!(w > 0.0)) {
            throw InputError("live candidate weights must be positive and finite");
        }
        const auto c = weights.candidates[j];
        if (c < 2 || c > data.length()) {
            throw InputError("candidate index outside the sample");
        }
        if (!p.candidates.empty() && c <= p.candidates.back()) {
            throw InputError("candidates must be strictly increasing");
        }
        p.candidates.push_back(c);
        gp.weights.push_back(w);
    }
    const Matrix& x = data.x();
    p.n = x.cols();
    p.k = data.w().cols();
    p.unpen = 1 + p.k + p.n;
    p.t_real = static_cast<double>(x.rows());
    const auto groups = static_cast<Eigen::Index>(p.candidates.size());
    Matrix design = Matrix::Zero(x.rows(), p.size());
    design.col(0).setOnes();
    if (p.k > 0) {
        design.middleCols(1, p.k) = data.w();
    }
    design.middleCols(1 + p.k, p.n) = x;
    for (Eigen::Index j = 0; j < groups; ++j) {
        const auto start = static_cast<Eigen::Index>(p.candidates[static_cast<std::size_t>(j)]) - 1;
        design.block(start, p.offset(static_cast<std::size_t>(j)), x.rows() - start, p.n) =
            x.bottomRows(x.rows() - start);
    }
    gp.gram = design.transpose() * design / p.t_real;
    gp.cross = design.transpose() * data.y() / p.t_real;
    gp.yy = data.y().squaredNorm() / p.t_real;
    gp.unpen = p.unpen;
    gp.width = p.n;
    p.solver.emplace(std::move(gp));
    return p;
}

Stage2Solution to_solution(const TimeSeriesData& data, const ReducedProblem& p, const Vector& beta,
                           double lambda) {
    Stage2Solution sol;
    sol.lambda = lambda;
    sol.intercept = beta(0);
    sol.augment_coefs = beta.segment(1, p.k);
    sol.theta_s = ThetaVector(data.length(), static_cast<std::size_t>(p.n));
    sol.theta_s.set(1, beta.segment(1 + p.k, p.n));
    for (std::size_t j = 0; j < p.candidates.size(); ++j) {
        const Vector theta = beta.segment(p.offset(j), p.n);
        if ((theta.array() != 0.0).any()) {
            sol.theta_s.set(p.candidates[j], theta);
            sol.active.push_back(p.candidates[j]);
        }
    }
    // SSR from the residual itself rather than the Gram form.
    Vector r = data.y() - fitted_values(data, sol.theta_s, sol.intercept);
    if (p.k > 0) {
        r.noalias() -= data.w() * sol.augment_coefs;
    }
    sol.ssr = r.squaredNorm();
    sol.objective = sol.ssr / p.t_real + lambda * p.solver->penalty(beta);
    return sol;
}

Stage2Solution solve_reduced(const TimeSeriesData& data, const ReducedProblem& p, double lambda,
                             const Stage2Config& config, Vector& beta) {
    const auto inner = p.solver->solve(lambda, beta, config.tol, config.max_iter);
    Stage2Solution sol = to_solution(data, p, beta, lambda);
    sol.kkt_violation = inner.violation;
    sol.sweeps = inner.sweeps;
    sol.converged = inner.converged;
    return sol;
}

void check_spacing(const std::vector<std::size_t>& candidates, std::size_t min_spacing) {
    if (min_spacing == 0) {
        return;
    }
    for (std::size_t j = 1; j < candidates.size(); ++j) {
        if (candidates[j] - candidates[j - 1] < min_spacing) {
            std::ostringstream msg;
            msg << "candidates " << candidates[j - 1] << " and " << candidates[j]
                << " are closer than the minimum spacing " << min_spacing;
            throw InfeasibleError(msg.str());
        }
    }
}

} // namespace

std::vector<std::size_t> WeightVector::live() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        if (!std::isinf(weights[j])) {
            out.push_back(candidates[j]);
        }
    }
    return out;
}

void Stage2Config::validate() const {
    if (!(gamma > 0.0)) {
        throw InputError("gamma must be positive");
    }
    if (!(delta > 0.5 && delta < 1.0)) {
        throw InputError("delta must lie in (1/2, 1)");
    }
    if (grid_size == 0) {
        throw InputError("stage-2 grid must be nonempty");
    }
    if ((lambda_lo && !(*lambda_lo > 0.0)) || (lambda_hi && !(*lambda_hi > 0.0))) {
        throw InputError("stage-2 grid bounds must be positive");
    }
    if (!(tol > 0.0) || max_iter == 0) {
        throw InputError("stage-2 tolerance and iteration limit must be positive");
    }
}

WeightVector compute_weights(const Stage1Solution& stage1, const std::vector<std::size_t>& candidates,
                             double gamma) {
    if (!(gamma > 0.0)) {
        throw InputError("gamma must be positive");
    }
    WeightVector out;
    out.candidates = candidates;
    std::sort(out.candidates.begin(), out.candidates.end());
    for (auto c : out.candidates) {
        const double norm = stage1.theta.group(c).norm();
        out.weights.push_back(norm > 0.0 ? std::pow(norm, -gamma) : WeightVector::excluded);
    }
    return out;
}

double stage2_objective(const TimeSeriesData& data, const WeightVector& weights,
                        const Stage2Solution& solution, double lambda) {
    Vector r = data.y() - fitted_values(data, solution.theta_s, solution.intercept);
    if (data.augmented()) {
        r.noalias() -= data.w() * solution.augment_coefs;
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < weights.candidates.size(); ++j) {
        const double norm = solution.theta_s.group(weights.candidates[j]).norm();
        if (norm > 0.0) {
            penalty += weights.weights[j] * norm; // inf * 0 never reached
        }
    }
    return r.squaredNorm() / static_cast<double>(data.length()) + lambda * penalty;
}

Stage2Solution solve_adaptive_group_lasso(const TimeSeriesData& data, const WeightVector& weights,
                                          double lambda, const Stage2Config& config) {
    config.validate();
    if (!(lambda >= 0.0)) {
        throw InputError("lambda must be nonnegative");
    }
    const ReducedProblem p = build_problem(data, weights);
    check_spacing(p.candidates, config.min_spacing);
    Vector beta = Vector::Zero(p.size());
    return solve_reduced(data, p, lambda, config, beta);
}

double kkt_check_stage2(const TimeSeriesData& data, const WeightVector& weights,
                        const Stage2Solution& solution, double lambda) {
    const ReducedProblem p = build_problem(data, weights);
    for (const auto& g : solution.theta_s.groups()) {
        if (g.index == 1) {
            continue;
        }
        if (!std::binary_search(p.candidates.begin(), p.candidates.end(), g.index) &&
            (g.change.array() != 0.0).any()) {
            return std::numeric_limits<double>::infinity();
        }
    }
    Vector beta(p.size());
    beta(0) = solution.intercept;
    beta.segment(1, p.k) = solution.augment_coefs;
    beta.segment(1 + p.k, p.n) = solution.theta_s.group(1);
    for (std::size_t j = 0; j < p.candidates.size(); ++j) {
        beta.segment(p.offset(j), p.n) = solution.theta_s.group(p.candidates[j]);
    }
    return p.solver->violation(beta, lambda);
}

double lambda_max_stage2(const TimeSeriesData& data, const WeightVector& weights) {
    const ReducedProblem p = build_problem(data, weights);
    const auto& gp = p.gp();
    Vector beta = Vector::Zero(p.size());
    beta.head(p.unpen) = gp.gram.topLeftCorner(p.unpen, p.unpen).ldlt().solve(gp.cross.head(p.unpen));
    const Vector c = 2.0 * (gp.cross - gp.gram * beta);
    double best = 0.0;
    for (std::size_t j = 0; j < p.candidates.size(); ++j) {
        best = std::max(best, c.segment(p.offset(j), p.n).norm() / gp.weights[j]);
    }
    return best;
}

std::vector<double> stage2_lambda_grid(const TimeSeriesData& data, const WeightVector& weights,
                                       const Stage2Config& config) {
    config.validate();
    const double t = static_cast<double>(data.length());
    const double lo = config.lambda_lo.value_or(1.0 / t);
    double hi = 0.0;
    if (config.lambda_hi) {
        hi = *config.lambda_hi;
    } else {
        const double rate = std::pow(t, -(1.0 - config.delta) * config.gamma / 2.0);
        hi = std::max(rate, lambda_max_stage2(data, weights));
    }
    hi = std::max(hi, lo);
    auto grid = log_spaced(lo, hi, config.grid_size);
    std::reverse(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

double stage2_bic(double ssr, std::size_t active, std::size_t t, std::size_t n) {
    const double tr = static_cast<double>(t);
    return std::log(ssr / tr) + static_cast<double>(active * n) * std::log(tr) / tr;
}

Stage2Solution select_stage2(const TimeSeriesData& data, const WeightVector& weights,
                             const std::vector<double>& lambda_grid, const Stage2Config& config) {
    config.validate();
    if (lambda_grid.empty()) {
        throw InputError("stage-2 lambda grid is empty");
    }
    const ReducedProblem p = build_problem(data, weights);
    check_spacing(p.candidates, config.min_spacing);
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end(), std::greater<>());

    Vector beta = Vector::Zero(p.size());
    std::optional<Stage2Solution> best;
    for (double lambda : grid) {
        Stage2Solution sol = solve_reduced(data, p, lambda, config, beta);
        sol.bic = stage2_bic(sol.ssr, sol.active.size(), data.length(), data.width());
        if (!best || sol.bic < best->bic) {
            best = std::move(sol);
        }
    }
    return *best;
}

EstimateTrace estimate_breaks_traced(const TimeSeriesData& data, const PipelineConfig& config) {
    EstimateTrace trace;
    Stage1Config s1 = config.stage1;
    if (config.candidates_from_max_breaks) {
        if (config.max_breaks == 0) {
            throw InputError("max_breaks must be positive");
        }
        s1.max_candidates = 2 * config.max_breaks;
    }
    s1.validate();
    const auto spacing = s1.resolved_min_spacing(data.length(), data.width(), data.augment_width());
    const auto window = candidate_window(data.length(), s1.trim_lo, s1.trim_hi, spacing);
    if (data.length() < window.first) {
        throw InfeasibleError("trimming leaves no usable observations");
    }

    trace.path = lambda_path(data, s1);
    trace.stage1 = select_stage1(trace.path, data.length(), data.width(), s1.rho);
    trace.candidates = screen_candidates(trace.stage1, spacing, s1.max_candidates);

    std::vector<std::size_t> selected;
    if (!trace.candidates.empty()) {
        trace.weights = compute_weights(trace.stage1, trace.candidates, config.stage2.gamma);
        Stage2Config s2 = config.stage2;
        s2.delta = s1.delta;
        const auto grid = stage2_lambda_grid(data, trace.weights, s2);
        trace.stage2 = select_stage2(data, trace.weights, grid, s2);
        selected = trace.stage2->active;
    }
    std::vector<std::size_t> breaks;
    breaks.reserve(selected.size());
    for (auto t : selected) {
        breaks.push_back(data.original_index(t));
    }
    trace.model = segment_ols(data, breaks);
    return trace;
}

BreakModel estimate_breaks(const TimeSeriesData& data, const PipelineConfig& config) {
    return estimate_breaks_traced(data, config).model;
}

} // namespace cointbreak
