#include <cointbreak/errors.hpp>
#include <cointbreak/stage1.hpp>

#include "group_solver.hpp"
#include "unpenalized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cointbreak {

namespace {

// ceil() that ignores representation noise such as 0.15 * 200 = 30.000000000000004.
std::size_t ceil_count(double x) {
    return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-9)));
}

bool is_candidate(std::size_t index, const CandidateWindow& window) {
    return index == 1 || window.contains(index);
}

// Max KKT residual given the current residual vector and dense theta.
double kkt_violation(const Matrix& x, const Matrix& theta, const Vector& residual, double lambda,
                     const CandidateWindow& window) {
    const double scale = 2.0 / static_cast<double>(x.rows());
    const Matrix g = gradient_blocks(x, residual);
    double worst = 0.0;
    for (Eigen::Index row = 0; row < x.rows(); ++row) {
        const auto index = static_cast<std::size_t>(row) + 1;
        const double norm = theta.row(row).norm();
        if (!is_candidate(index, window)) {
            if (norm > 0.0) {
                return std::numeric_limits<double>::infinity();
            }
            continue;
        }
        const Eigen::RowVectorXd grad = scale * g.row(row);
        if (norm > 0.0) {
            worst = std::max(worst, (grad - lambda * theta.row(row) / norm).norm());
        } else {
            worst = std::max(worst, grad.norm() - lambda);
        }
    }
    return worst;
}

double unpenalized_violation(const TimeSeriesData& data, const Vector& residual) {
    const double scale = 2.0 / static_cast<double>(data.length());
    double worst = std::abs(scale * residual.sum());
    if (data.augmented()) {
        worst = std::max(worst, (scale * (data.w().transpose() * residual)).cwiseAbs().maxCoeff());
    }
    return worst;
}


// Suffix sums that give every entry of the Gram matrix of any column subset
// of [1, W, Z_T] in O(1): Z_a' Z_b = H_max(a,b), 1' Z_a = sum_{s>=a} X_s', ...
class Stage1Workspace {
public:
    Stage1Workspace(const TimeSeriesData& data, const Stage1Config& config)
        : data_(data), window_(candidate_window(data, config)) {
        const Matrix& x = data.x();
        const Matrix& w = data.w();
        const Vector& y = data.y();
        const Eigen::Index t_len = x.rows();
        const Eigen::Index n = x.cols();
        const Eigen::Index k = w.cols();
        h_ = suffix_gram(x);
        sx_.resize(t_len, n);
        sxy_.resize(t_len, n);
        sxw_.resize(t_len, n * k);
        Eigen::RowVectorXd run_x = Eigen::RowVectorXd::Zero(n);
        Eigen::RowVectorXd run_xy = Eigen::RowVectorXd::Zero(n);
        Matrix run_xw = Matrix::Zero(n, k);
        for (Eigen::Index row = t_len - 1; row >= 0; --row) {
            run_x += x.row(row);
            run_xy += y(row) * x.row(row);
            sx_.row(row) = run_x;
            sxy_.row(row) = run_xy;
            if (k > 0) {
                run_xw.noalias() += x.row(row).transpose() * w.row(row);
                for (Eigen::Index a = 0; a < n; ++a) {
                    sxw_.block(row, a * k, 1, k) = run_xw.row(a);
                }
            }
        }
        Matrix u(t_len, 1 + k);
        u.col(0).setOnes();
        if (k > 0) {
            u.rightCols(k) = w;
        }
        uu_ = u.transpose() * u;
        uy_ = u.transpose() * y;
        yy_ = y.squaredNorm();
    }

    const CandidateWindow& window() const { return window_; }

    detail::GroupProblem problem(const std::vector<std::size_t>& groups) const {
        const Eigen::Index n = data_.x().cols();
        const Eigen::Index k = data_.w().cols();
        const double t_real = static_cast<double>(data_.length());
        detail::GroupProblem p;
        p.unpen = 1 + k;
        p.width = n;
        p.weights.assign(groups.size(), 1.0);
        const Eigen::Index size = p.size();
        p.gram.resize(size, size);
        p.cross.resize(size);
        p.gram.topLeftCorner(p.unpen, p.unpen) = uu_;
        p.cross.head(p.unpen) = uy_;
        for (Eigen::Index a = 0; a < p.groups(); ++a) {
            const auto ia = static_cast<Eigen::Index>(groups[static_cast<std::size_t>(a)]) - 1;
            const auto oa = p.offset(a);
            p.gram.block(0, oa, 1, n) = sx_.row(ia);
            for (Eigen::Index c = 0; c < n; ++c) {
                if (k > 0) {
                    p.gram.block(1, oa + c, k, 1) = sxw_.block(ia, c * k, 1, k).transpose();
                }
            }
            p.cross.segment(oa, n) = sxy_.row(ia).transpose();
            for (Eigen::Index b = a; b < p.groups(); ++b) {
                const auto ib = static_cast<Eigen::Index>(groups[static_cast<std::size_t>(b)]) - 1;
                const auto ob = p.offset(b);
                p.gram.block(oa, ob, n, n) = h_.row(std::max(ia, ib)).reshaped(n, n);
            }
        }
        p.gram.triangularView<Eigen::StrictlyLower>() = p.gram.transpose();
        p.gram /= t_real;
        p.cross /= t_real;
        p.yy = yy_ / t_real;
        return p;
    }

    Stage1Solution solve(double lambda, const Stage1Config& config, const ThetaVector* warm_start) const {
        if (!(lambda > 0.0)) {
            throw InputError("lambda must be positive");
        }
        const Matrix& x = data_.x();
        const std::size_t t_len = data_.length();
        const Eigen::Index n = x.cols();
        const Eigen::Index k = data_.w().cols();
        const double t_real = static_cast<double>(t_len);

        std::vector<char> in_set(t_len + 1, 0);
        std::vector<std::size_t> groups{1};
        in_set[1] = 1;
        Matrix theta = Matrix::Zero(static_cast<Eigen::Index>(t_len), n);
        if (warm_start != nullptr) {
            if (warm_start->length() != t_len || warm_start->width() != data_.width()) {
                throw InputError("warm start has wrong dimensions");
            }
            for (const auto& g : warm_start->groups()) {
                if (is_candidate(g.index, window_)) {
                    theta.row(static_cast<Eigen::Index>(g.index) - 1) = g.change.transpose();
                    if (!in_set[g.index]) {
                        in_set[g.index] = 1;
                        groups.push_back(g.index);
                    }
                }
            }
        }
        std::sort(groups.begin(), groups.end());

        Stage1Solution sol;
        sol.lambda = lambda;
        Vector unpen_coef = Vector::Zero(1 + k);
        Vector residual;
        double violation = std::numeric_limits<double>::infinity();
        std::size_t sweeps = 0;
        while (true) {
            const detail::GroupSolver solver(problem(groups));
            Vector beta(solver.problem().size());
            beta.head(1 + k) = unpen_coef;
            for (std::size_t a = 0; a < groups.size(); ++a) {
                beta.segment(solver.problem().offset(static_cast<Eigen::Index>(a)), n) =
                    theta.row(static_cast<Eigen::Index>(groups[a]) - 1).transpose();
            }
            const auto inner = solver.solve(lambda, beta, 0.5 * config.tol, config.max_iter - sweeps);
            sweeps += std::max<std::size_t>(inner.sweeps, 1);
            unpen_coef = beta.head(1 + k);
            for (std::size_t a = 0; a < groups.size(); ++a) {
                theta.row(static_cast<Eigen::Index>(groups[a]) - 1) =
                    beta.segment(solver.problem().offset(static_cast<Eigen::Index>(a)), n).transpose();
            }

            residual = data_.y() - fitted_values(x, theta, unpen_coef(0));
            if (k > 0) {
                residual.noalias() -= data_.w() * unpen_coef.tail(k);
            }
            if (config.record_objective) {
                double pen = 0.0;
                for (auto g : groups) {
                    pen += theta.row(static_cast<Eigen::Index>(g) - 1).norm();
                }
                sol.objective_trace.push_back(residual.squaredNorm() / t_real + lambda * pen);
            }

            // Screen every admissible index outside the working set.
            const Matrix g = gradient_blocks(x, residual) * (2.0 / t_real);
            std::vector<std::pair<double, std::size_t>> violators;
            for (auto t = window_.first; t <= window_.last; ++t) {
                if (in_set[t]) {
                    continue;
                }
                const double excess = g.row(static_cast<Eigen::Index>(t) - 1).norm() - lambda;
                if (excess > 0.5 * config.tol) {
                    violators.emplace_back(excess, t);
                }
            }
            violation = std::max(kkt_violation(x, theta, residual, lambda, window_),
                                 unpenalized_violation(data_, residual));
            if (violators.empty() || sweeps >= config.max_iter) {
                break;
            }
            std::sort(violators.begin(), violators.end(), std::greater<>());
            const std::size_t add = std::min(violators.size(), std::max<std::size_t>(10, groups.size()));
            for (std::size_t v = 0; v < add; ++v) {
                in_set[violators[v].second] = 1;
                groups.push_back(violators[v].second);
            }
            std::sort(groups.begin(), groups.end());
        }

        sol.theta = ThetaVector::from_dense(theta);
        sol.intercept = unpen_coef(0);
        sol.augment_coefs = unpen_coef.tail(k);
        sol.active_set = sol.theta.active_changes();
        sol.ssr = residual.squaredNorm();
        double pen = 0.0;
        for (const auto& grp : sol.theta.groups()) {
            pen += grp.change.norm();
        }
        sol.objective = sol.ssr / t_real + lambda * pen;
        sol.kkt_violation = violation;
        sol.sweeps = sweeps;
        sol.converged = violation <= config.tol;
        return sol;
    }

private:
    const TimeSeriesData& data_;
    CandidateWindow window_;
    Matrix h_;
    Matrix sx_;
    Matrix sxy_;
    Matrix sxw_;
    Matrix uu_;
    Vector uy_;
    double yy_ = 0.0;
};

} // namespace

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (count == 0) {
        return {};
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

void Stage1Config::validate() const {
    if (!(delta > 0.5 && delta < 1.0)) {
        throw InputError("delta must lie in (1/2, 1)");
    }
    if (c0_grid.empty()) {
        throw InputError("c0 grid is empty");
    }
    for (double c : c0_grid) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw InputError("c0 grid values must be positive");
        }
    }
    if (max_candidates == 0) {
        throw InputError("max_candidates must be positive");
    }
    if (!(trim_lo >= 0.0 && trim_lo < 0.5 && trim_hi >= 0.0 && trim_hi < 0.5)) {
        throw InputError("trimming fractions must lie in [0, 0.5)");
    }
    if (!(tol > 0.0)) {
        throw InputError("tol must be positive");
    }
    if (max_iter == 0) {
        throw InputError("max_iter must be positive");
    }
    if (rho && !(*rho >= 0.0)) {
        throw InputError("rho must be nonnegative");
    }
}

std::size_t Stage1Config::resolved_min_spacing(std::size_t t, std::size_t n, std::size_t k) const {
    if (min_spacing > 0) {
        return min_spacing;
    }
    return std::max(ceil_count(0.02 * static_cast<double>(t)), n + k + 2);
}

CandidateWindow candidate_window(std::size_t t, double trim_lo, double trim_hi, std::size_t min_regime) {
    const auto head = std::max(ceil_count(trim_lo * static_cast<double>(t)), min_regime);
    const auto tail = std::max(ceil_count(trim_hi * static_cast<double>(t)), min_regime);
    CandidateWindow window;
    window.first = std::max<std::size_t>(2, head + 1);
    window.last = tail >= t ? 0 : std::min(t, t + 1 - tail);
    if (window.size() == 0) {
        std::ostringstream msg;
        msg << "no admissible break index: T=" << t << ", trimming " << trim_lo << "/" << trim_hi
            << ", minimum regime " << min_regime;
        throw InfeasibleError(msg.str());
    }
    return window;
}

CandidateWindow candidate_window(const TimeSeriesData& data, const Stage1Config& config) {
    const auto spacing =
        config.resolved_min_spacing(data.length(), data.width(), data.augment_width());
    return candidate_window(data.length(), config.trim_lo, config.trim_hi, spacing);
}

Vector group_soft_threshold(const Vector& v, double kappa) {
    if (kappa < 0.0) {
        throw InputError("threshold must be nonnegative");
    }
    const double norm = v.norm();
    if (norm <= kappa) {
        return Vector::Zero(v.size());
    }
    return (1.0 - kappa / norm) * v;
}

double stage1_objective(const TimeSeriesData& data, const ThetaVector& theta, double intercept,
                        const Vector& augment_coefs, double lambda) {
    Vector r = data.y() - fitted_values(data, theta, intercept);
    if (data.augmented()) {
        r.noalias() -= data.w() * augment_coefs;
    }
    double penalty = 0.0;
    for (const auto& g : theta.groups()) {
        penalty += g.change.norm();
    }
    return r.squaredNorm() / static_cast<double>(data.length()) + lambda * penalty;
}

double lambda_max_stage1(const TimeSeriesData& data, const CandidateWindow& window) {
    const detail::UnpenalizedFit unpen(data);
    const Vector r0 = unpen.residual(data.y());
    const Matrix g = gradient_blocks(data, r0);
    double best = g.row(0).norm();
    for (auto t = window.first; t <= window.last; ++t) {
        best = std::max(best, g.row(static_cast<Eigen::Index>(t) - 1).norm());
    }
    return 2.0 * best / static_cast<double>(data.length());
}

Stage1Solution solve_group_lasso(const TimeSeriesData& data, double lambda, const Stage1Config& config,
                                 const ThetaVector* warm_start) {
    config.validate();
    const Stage1Workspace ws(data, config);
    return ws.solve(lambda, config, warm_start);
}

double kkt_check_stage1(const TimeSeriesData& data, const ThetaVector& theta, double lambda,
                        const CandidateWindow& window) {
    if (theta.length() != data.length() || theta.width() != data.width()) {
        throw InputError("theta dimensions do not match the data");
    }
    const detail::UnpenalizedFit unpen(data);
    const Matrix dense = theta.to_dense();
    const Vector residual = unpen.residual(data.y() - fitted_values(data.x(), dense, 0.0));
    return std::max(0.0, kkt_violation(data.x(), dense, residual, lambda, window));
}

double kkt_check_stage1(const TimeSeriesData& data, const ThetaVector& theta, double lambda) {
    CandidateWindow all;
    all.first = 2;
    all.last = data.length();
    return kkt_check_stage1(data, theta, lambda, all);
}

std::vector<double> stage1_lambda_grid(const TimeSeriesData& data, const Stage1Config& config) {
    config.validate();
    const auto window = candidate_window(data, config);
    const double lmax = lambda_max_stage1(data, window);
    const double scale = 2.0 * static_cast<double>(data.width()) *
                         std::pow(static_cast<double>(data.length()), config.delta);
    std::vector<double> grid;
    grid.reserve(config.c0_grid.size());
    for (double c0 : config.c0_grid) {
        grid.push_back(std::min(scale * c0, lmax));
    }
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

double stage1_rho(std::size_t t, std::size_t n) {
    const double tr = static_cast<double>(t);
    return std::log(tr) / tr * std::log(std::log(tr * static_cast<double>(n)));
}

std::vector<Stage1Solution> lambda_path(const TimeSeriesData& data, const Stage1Config& config) {
    const auto grid = stage1_lambda_grid(data, config);
    const double rho = config.rho.value_or(stage1_rho(data.length(), data.width()));
    const Stage1Workspace ws(data, config);
    std::vector<Stage1Solution> path;
    path.reserve(grid.size());
    for (double lambda : grid) {
        const ThetaVector* warm = path.empty() ? nullptr : &path.back().theta;
        auto sol = ws.solve(lambda, config, warm);
        sol.ic_value = std::log(sol.ssr / static_cast<double>(data.length())) +
                       rho * static_cast<double>(sol.active_set.size());
        path.push_back(std::move(sol));
    }
    return path;
}

Stage1Solution select_stage1(const std::vector<Stage1Solution>& path, std::size_t t, std::size_t n,
                             std::optional<double> rho) {
    if (path.empty()) {
        throw InputError("lambda path is empty");
    }
    const double penalty = rho.value_or(stage1_rho(t, n));
    std::vector<std::size_t> order(path.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return path[a].lambda > path[b].lambda; });
    std::size_t best = order.front();
    double best_ic = std::numeric_limits<double>::infinity();
    for (auto i : order) {
        const double ic = std::log(path[i].ssr / static_cast<double>(t)) +
                          penalty * static_cast<double>(path[i].active_set.size());
        if (ic < best_ic) {
            best_ic = ic;
            best = i;
        }
    }
    Stage1Solution out = path[best];
    out.ic_value = best_ic;
    return out;
}

std::vector<std::size_t> screen_candidates(const Stage1Solution& solution, std::size_t min_spacing,
                                           std::size_t max_candidates) {
    const auto& active = solution.active_set;
    if (active.empty() || max_candidates == 0) {
        return {};
    }
    std::vector<std::size_t> sorted = active;
    std::sort(sorted.begin(), sorted.end());

    struct Pick {
        std::size_t index;
        double norm;
    };
    std::vector<Pick> picks;
    auto norm_of = [&](std::size_t i) { return solution.theta.group(i).norm(); };
    Pick current{sorted.front(), norm_of(sorted.front())};
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        const double nk = norm_of(sorted[k]);
        if (sorted[k] - sorted[k - 1] < min_spacing) {
            if (nk > current.norm) {
                current = {sorted[k], nk};
            }
        } else {
            picks.push_back(current);
            current = {sorted[k], nk};
        }
    }
    picks.push_back(current);

    if (picks.size() > max_candidates) {
        std::stable_sort(picks.begin(), picks.end(),
                         [](const Pick& a, const Pick& b) { return a.norm > b.norm; });
        picks.resize(max_candidates);
    }
    std::vector<std::size_t> out;
    out.reserve(picks.size());
    for (const auto& p : picks) {
        out.push_back(p.index);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double reduced_gram_min_eigenvalue(const TimeSeriesData& data, const std::vector<std::size_t>& candidates) {
    const Matrix& x = data.x();
    const Eigen::Index n = x.cols();
    const Eigen::Index groups = static_cast<Eigen::Index>(candidates.size()) + 1;
    Matrix zs = Matrix::Zero(x.rows(), groups * n);
    zs.leftCols(n) = x;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        const auto start = static_cast<Eigen::Index>(candidates[j]) - 1;
        zs.block(start, (static_cast<Eigen::Index>(j) + 1) * n, x.rows() - start, n) =
            x.bottomRows(x.rows() - start);
    }
    const double t2 = static_cast<double>(x.rows()) * static_cast<double>(x.rows());
    const Matrix gram = zs.transpose() * zs / t2;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

} // namespace cointbreak
