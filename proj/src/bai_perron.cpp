#include <cointbreak/bai_perron.hpp>
#include <cointbreak/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cointbreak {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Running least squares fit by Givens rotations; ssr() is exact once the
// accumulated rows have full column rank.
class GivensAccumulator {
public:
    explicit GivensAccumulator(Eigen::Index p) : r_(Matrix::Zero(p, p)), z_(Vector::Zero(p)) {}

    void add(Vector row, double target) {
        const Eigen::Index p = r_.rows();
        for (Eigen::Index k = 0; k < p; ++k) {
            const double a = row(k);
            if (a == 0.0) {
                continue;
            }
            const double rkk = r_(k, k);
            const double h = std::hypot(rkk, a);
            const double c = rkk / h;
            const double s = a / h;
            for (Eigen::Index j = k; j < p; ++j) {
                const double rv = r_(k, j);
                const double av = row(j);
                r_(k, j) = c * rv + s * av;
                row(j) = -s * rv + c * av;
            }
            const double zv = z_(k);
            z_(k) = c * zv + s * target;
            target = -s * zv + c * target;
        }
        ssr_ += target * target;
    }

    double ssr() const { return ssr_; }

private:
    Matrix r_;
    Vector z_;
    double ssr_ = 0.0;
};

} // namespace

CostMatrix::CostMatrix(std::size_t length, std::size_t min_seg)
    : length_(length), min_seg_(min_seg), values_(length * length, inf) {}

double CostMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i < 1 || j > length_ || j < i) {
        return inf;
    }
    return values_[(i - 1) * length_ + (j - 1)];
}

void CostMatrix::set(std::size_t i, std::size_t j, double value) {
    values_[(i - 1) * length_ + (j - 1)] = value;
}

CostMatrix ssr_table(const TimeSeriesData& data, std::size_t min_seg) {
    const std::size_t t_len = data.length();
    const std::size_t n = data.width();
    const std::size_t k = data.augment_width();
    if (min_seg < n + k + 2) {
        throw InputError("min_seg must be at least N + K + 2 = " + std::to_string(n + k + 2));
    }
    if (min_seg > t_len) {
        throw InputError("min_seg exceeds the sample length");
    }
    const auto p = static_cast<Eigen::Index>(1 + n + k);
    Matrix design(static_cast<Eigen::Index>(t_len), p);
    design.col(0).setOnes();
    design.middleCols(1, static_cast<Eigen::Index>(n)) = data.x();
    if (k > 0) {
        design.rightCols(static_cast<Eigen::Index>(k)) = data.w();
    }

    CostMatrix cost(t_len, min_seg);
    for (std::size_t i = 1; i + min_seg - 1 <= t_len; ++i) {
        GivensAccumulator acc(p);
        for (std::size_t j = i; j <= t_len; ++j) {
            const auto r = static_cast<Eigen::Index>(j - 1);
            acc.add(design.row(r).transpose(), data.y()(r));
            if (j - i + 1 >= min_seg) {
                cost.set(i, j, acc.ssr());
            }
        }
    }
    return cost;
}

std::vector<Partition> optimal_partitions(const CostMatrix& cost, std::size_t m_max) {
    const std::size_t t_len = cost.length();
    const std::size_t h = cost.min_seg();
    std::vector<Partition> out;
    if (h > t_len) {
        return out;
    }
    // best[m][j]: minimal cost of rows 1..j in m+1 segments; start[m][j] the
    // first row of the last segment.
    std::vector<std::vector<double>> best;
    std::vector<std::vector<std::size_t>> start;
    best.emplace_back(t_len + 1, inf);
    start.emplace_back(t_len + 1, 1);
    for (std::size_t j = h; j <= t_len; ++j) {
        best[0][j] = cost(1, j);
    }
    out.push_back({{}, best[0][t_len]});

    for (std::size_t m = 1; m <= m_max; ++m) {
        if ((m + 1) * h > t_len) {
            break;
        }
        best.emplace_back(t_len + 1, inf);
        start.emplace_back(t_len + 1, 0);
        for (std::size_t j = (m + 1) * h; j <= t_len; ++j) {
            double value = inf;
            std::size_t arg = 0;
            for (std::size_t i = m * h + 1; i + h - 1 <= j; ++i) {
                const double candidate = best[m - 1][i - 1] + cost(i, j);
                if (candidate < value) {
                    value = candidate;
                    arg = i;
                }
            }
            best[m][j] = value;
            start[m][j] = arg;
        }
        Partition part;
        part.ssr = best[m][t_len];
        part.breakpoints.resize(m);
        std::size_t end = t_len;
        for (std::size_t level = m; level >= 1; --level) {
            const std::size_t s = start[level][end];
            part.breakpoints[level - 1] = s;
            end = s - 1;
        }
        out.push_back(std::move(part));
    }
    return out;
}

Partition optimal_partition(const CostMatrix& cost, std::size_t m) {
    if ((m + 1) * cost.min_seg() > cost.length()) {
        throw InfeasibleError(std::to_string(m) + " breaks do not fit with minimum segment length " +
                              std::to_string(cost.min_seg()));
    }
    auto all = optimal_partitions(cost, m);
    return std::move(all.at(m));
}

std::size_t BaiPerronOptions::resolved_min_seg(std::size_t t, std::size_t n, std::size_t k) const {
    if (min_seg > 0) {
        return min_seg;
    }
    const auto trimmed = static_cast<std::size_t>(std::ceil(0.15 * static_cast<double>(t) - 1e-9));
    return std::max(n + k + 2, trimmed);
}

BaiPerronFit select_num_breaks_traced(const TimeSeriesData& data, std::size_t m_max,
                                      const BaiPerronOptions& options) {
    const std::size_t t_len = data.length();
    const std::size_t n = data.width();
    const std::size_t k = data.augment_width();
    const std::size_t h = options.resolved_min_seg(t_len, n, k);
    const CostMatrix cost = ssr_table(data, h);

    BaiPerronFit fit;
    fit.partitions = optimal_partitions(cost, m_max);
    const double base = options.base_params.value_or(static_cast<double>(1 + n + k));
    const double per_break = options.params_per_break.value_or(static_cast<double>(n + 1));
    const double tt = static_cast<double>(t_len);
    // Keeps log(SSR/T) finite and free of rounding noise on exact fits.
    const double ssr_floor = 1e-14 * std::max(data.y().squaredNorm(), 1.0);

    double best = inf;
    std::vector<BreakModel> models;
    for (std::size_t m = 0; m < fit.partitions.size(); ++m) {
        std::vector<std::size_t> original;
        for (auto b : fit.partitions[m].breakpoints) {
            original.push_back(data.original_index(b));
        }
        BreakModel model = segment_ols(data, original);
        const double p_m = base + static_cast<double>(m) * per_break;
        const double bic = std::log(std::max(model.ssr, ssr_floor) / tt) + p_m * std::log(tt) / tt;
        fit.bic.push_back(bic);
        if (bic < best) {
            best = bic;
            fit.selected = m;
        }
        models.push_back(std::move(model));
    }
    fit.model = std::move(models[fit.selected]);
    return fit;
}

BreakModel select_num_breaks(const TimeSeriesData& data, std::size_t m_max, const BaiPerronOptions& options) {
    return select_num_breaks_traced(data, m_max, options).model;
}

} // namespace cointbreak
