#include <cointbreak/design.hpp>
#include <cointbreak/errors.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cointbreak {

TimeSeriesData::TimeSeriesData(Vector y, Matrix x, std::vector<std::string> labels)
    : y_(std::move(y)), x_(std::move(x)), w_(Matrix(y_.size(), 0)),
      labels_(std::move(labels)) {
    validate();
}

TimeSeriesData::TimeSeriesData(Vector y, Matrix x, Matrix w, std::size_t first_index,
                               std::vector<std::string> labels)
    : y_(std::move(y)), x_(std::move(x)), w_(std::move(w)), first_index_(first_index),
      labels_(std::move(labels)) {
    validate();
}

void TimeSeriesData::validate() const {
    const auto t = length();
    const auto n = width();
    if (n < 1) {
        throw InputError("at least one regressor is required");
    }
    if (static_cast<std::size_t>(x_.rows()) != t) {
        throw InputError("regressor matrix has a different number of rows than y");
    }
    if (static_cast<std::size_t>(w_.rows()) != t) {
        throw InputError("augmentation block has a different number of rows than y");
    }
    if (t < 2 * (n + 1)) {
        std::ostringstream msg;
        msg << "sample too short: T=" << t << " but at least " << 2 * (n + 1) << " required";
        throw InputError(msg.str());
    }
    if (!y_.allFinite() || !x_.allFinite() || !w_.allFinite()) {
        throw InputError("non-finite value in data");
    }
    if (!labels_.empty() && labels_.size() != t) {
        throw InputError("label count does not match sample length");
    }
    if (first_index_ < 1) {
        throw InputError("first_index is 1-based");
    }
}

ThetaVector::ThetaVector(std::size_t length, std::size_t width)
    : length_(length), width_(width) {}

ThetaVector ThetaVector::from_dense(const Matrix& dense) {
    ThetaVector theta(static_cast<std::size_t>(dense.rows()),
                      static_cast<std::size_t>(dense.cols()));
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        if (i == 0 || (dense.row(i).array() != 0.0).any()) {
            theta.groups_.push_back({static_cast<std::size_t>(i) + 1, dense.row(i).transpose()});
        }
    }
    return theta;
}

ThetaVector ThetaVector::from_segments(std::size_t length,
                                       const std::vector<std::size_t>& breakpoints,
                                       const Matrix& segment_betas) {
    if (static_cast<std::size_t>(segment_betas.rows()) != breakpoints.size() + 1) {
        throw InputError("segment_betas must have one row per regime");
    }
    ThetaVector theta(length, static_cast<std::size_t>(segment_betas.cols()));
    theta.set(1, segment_betas.row(0).transpose());
    for (std::size_t j = 0; j < breakpoints.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        theta.set(breakpoints[j], (segment_betas.row(idx + 1) - segment_betas.row(idx)).transpose());
    }
    return theta;
}

void ThetaVector::set(std::size_t index, const Vector& change) {
    if (index < 1 || index > length_) {
        throw InputError("theta group index out of range");
    }
    if (static_cast<std::size_t>(change.size()) != width_) {
        throw InputError("theta group has wrong width");
    }
    auto it = std::lower_bound(groups_.begin(), groups_.end(), index,
                               [](const ThetaGroup& g, std::size_t i) { return g.index < i; });
    if (it != groups_.end() && it->index == index) {
        it->change = change;
    } else {
        groups_.insert(it, ThetaGroup{index, change});
    }
}

Vector ThetaVector::group(std::size_t index) const {
    auto it = std::lower_bound(groups_.begin(), groups_.end(), index,
                               [](const ThetaGroup& g, std::size_t i) { return g.index < i; });
    if (it != groups_.end() && it->index == index) {
        return it->change;
    }
    return Vector::Zero(static_cast<Eigen::Index>(width_));
}

Matrix ThetaVector::to_dense() const {
    Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(length_), static_cast<Eigen::Index>(width_));
    for (const auto& g : groups_) {
        dense.row(static_cast<Eigen::Index>(g.index) - 1) = g.change.transpose();
    }
    return dense;
}

std::vector<std::size_t> ThetaVector::active_changes() const {
    std::vector<std::size_t> out;
    for (const auto& g : groups_) {
        if (g.index >= 2 && (g.change.array() != 0.0).any()) {
            out.push_back(g.index);
        }
    }
    return out;
}

Matrix BreakModel::coefficient_changes() const {
    Matrix out(segment_betas.rows(), segment_betas.cols());
    if (segment_betas.rows() == 0) {
        return out;
    }
    out.row(0) = segment_betas.row(0);
    for (Eigen::Index j = 1; j < segment_betas.rows(); ++j) {
        out.row(j) = segment_betas.row(j) - segment_betas.row(j - 1);
    }
    return out;
}

Matrix cumulative_coefficients(const ThetaVector& theta) {
    const auto t = static_cast<Eigen::Index>(theta.length());
    Matrix beta(t, static_cast<Eigen::Index>(theta.width()));
    Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(theta.width()));
    const auto& groups = theta.groups();
    std::size_t next = 0;
    for (Eigen::Index row = 0; row < t; ++row) {
        while (next < groups.size() && static_cast<Eigen::Index>(groups[next].index) == row + 1) {
            running += groups[next].change.transpose();
            ++next;
        }
        beta.row(row) = running;
    }
    return beta;
}

Vector fitted_values(const Matrix& x, const Matrix& theta_dense, double intercept) {
    if (theta_dense.rows() != x.rows() || theta_dense.cols() != x.cols()) {
        throw InputError("theta dimensions do not match the regressors");
    }
    Vector fit(x.rows());
    Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(x.cols());
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        running += theta_dense.row(t);
        fit(t) = intercept + running.dot(x.row(t));
    }
    return fit;
}

Vector fitted_values(const TimeSeriesData& data, const ThetaVector& theta, double intercept) {
    if (theta.length() != data.length() || theta.width() != data.width()) {
        throw InputError("theta dimensions do not match the data");
    }
    const Matrix beta = cumulative_coefficients(theta);
    const Matrix& x = data.x();
    Vector fit(x.rows());
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        fit(t) = intercept + beta.row(t).dot(x.row(t));
    }
    return fit;
}

Matrix gradient_blocks(const Matrix& x, const Vector& residual) {
    if (residual.size() != x.rows()) {
        throw InputError("residual length does not match the sample");
    }
    Matrix g(x.rows(), x.cols());
    Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(x.cols());
    for (Eigen::Index t = x.rows() - 1; t >= 0; --t) {
        running += residual(t) * x.row(t);
        g.row(t) = running;
    }
    return g;
}

Matrix gradient_blocks(const TimeSeriesData& data, const Vector& residual) {
    return gradient_blocks(data.x(), residual);
}

Matrix suffix_gram(const Matrix& x) {
    const Eigen::Index n = x.cols();
    Matrix out(x.rows(), n * n);
    Matrix running = Matrix::Zero(n, n);
    for (Eigen::Index t = x.rows() - 1; t >= 0; --t) {
        running.noalias() += x.row(t).transpose() * x.row(t);
        out.row(t) = Eigen::Map<const Eigen::RowVectorXd>(running.data(), n * n);
    }
    return out;
}

BreakModel segment_ols(const TimeSeriesData& data, const std::vector<std::size_t>& breakpoints) {
    const auto t_len = data.length();
    const auto n = data.width();
    const auto k = data.augment_width();
    const std::size_t regimes = breakpoints.size() + 1;

    std::vector<std::size_t> starts{1};
    for (auto b : breakpoints) {
        if (b < data.first_index()) {
            throw InputError("breakpoint precedes the sample");
        }
        const auto local = data.local_index(b);
        if (local <= starts.back() || local > t_len) {
            throw InputError("breakpoints must be strictly increasing and inside the sample");
        }
        starts.push_back(local);
    }
    starts.push_back(t_len + 1);
    for (std::size_t j = 0; j < regimes; ++j) {
        if (starts[j + 1] - starts[j] < n + k + 2) {
            std::ostringstream msg;
            msg << "regime " << j + 1 << " has " << starts[j + 1] - starts[j]
                << " observations, fewer than " << n + k + 2;
            throw InfeasibleError(msg.str());
        }
    }

    const auto rows = static_cast<Eigen::Index>(t_len);
    const auto cols = static_cast<Eigen::Index>(1 + k + regimes * n);
    Matrix design = Matrix::Zero(rows, cols);
    design.col(0).setOnes();
    if (k > 0) {
        design.middleCols(1, static_cast<Eigen::Index>(k)) = data.w();
    }
    for (std::size_t j = 0; j < regimes; ++j) {
        const auto r0 = static_cast<Eigen::Index>(starts[j] - 1);
        const auto len = static_cast<Eigen::Index>(starts[j + 1] - starts[j]);
        const auto c0 = static_cast<Eigen::Index>(1 + k + j * n);
        design.block(r0, c0, len, static_cast<Eigen::Index>(n)) =
            data.x().middleRows(r0, len);
    }

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < cols) {
        throw RankDeficientError("segment regression design is rank deficient");
    }
    const Vector coef = qr.solve(data.y());

    BreakModel model;
    model.breakpoints = breakpoints;
    model.intercept = coef(0);
    model.augment_coefs = coef.segment(1, static_cast<Eigen::Index>(k));
    model.segment_betas.resize(static_cast<Eigen::Index>(regimes), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < regimes; ++j) {
        model.segment_betas.row(static_cast<Eigen::Index>(j)) =
            coef.segment(static_cast<Eigen::Index>(1 + k + j * n), static_cast<Eigen::Index>(n)).transpose();
    }
    model.residuals = data.y() - design * coef;
    model.ssr = model.residuals.squaredNorm();
    return model;
}

} // namespace cointbreak
