#include <cointbreak/dols.hpp>
#include <cointbreak/errors.hpp>

#include <string>
#include <vector>

namespace cointbreak {

TimeSeriesData augment(const TimeSeriesData& data, std::size_t leads_lags) {
    const std::size_t t_len = data.length();
    const std::size_t l = leads_lags;
    if (t_len <= 2 * l + 2) {
        throw InputError("leads/lags " + std::to_string(l) + " too large for T = " + std::to_string(t_len));
    }
    if (data.augmented()) {
        throw InputError("data is already augmented");
    }
    const auto n = static_cast<Eigen::Index>(data.width());
    const std::size_t first = l + 2; // local 1-based
    const std::size_t last = t_len - l;
    const auto rows = static_cast<Eigen::Index>(last - first + 1);
    const auto k = n * static_cast<Eigen::Index>(2 * l + 1);

    const Matrix& x = data.x();
    Vector y = data.y().segment(static_cast<Eigen::Index>(first - 1), rows);
    Matrix xs = x.middleRows(static_cast<Eigen::Index>(first - 1), rows);
    Matrix w(rows, k);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<Eigen::Index>(first) + r; // 1-based
        for (Eigen::Index j = 0; j <= static_cast<Eigen::Index>(2 * l); ++j) {
            const Eigen::Index s = t - static_cast<Eigen::Index>(l) + j; // dX_s = X_s - X_{s-1}
            w.block(r, j * n, 1, n) = x.row(s - 1) - x.row(s - 2);
        }
    }

    std::vector<std::string> labels;
    if (!data.labels().empty()) {
        labels.assign(data.labels().begin() + static_cast<std::ptrdiff_t>(first - 1),
                      data.labels().begin() + static_cast<std::ptrdiff_t>(last));
    }
    return TimeSeriesData(std::move(y), std::move(xs), std::move(w), data.original_index(first),
                          std::move(labels));
}

} // namespace cointbreak
