#pragma once

#include <cointbreak/design.hpp>

namespace cointbreak::detail {

// Least-squares projection onto the unpenalized columns [1, W].
class UnpenalizedFit {
public:
    explicit UnpenalizedFit(const TimeSeriesData& data)
        : k_(data.w().cols()), w_(data.w()) {
        if (k_ > 0) {
            Matrix u(data.w().rows(), k_ + 1);
            u.col(0).setOnes();
            u.rightCols(k_) = data.w();
            qr_.compute(u);
        }
    }

    // Coefficients [mu, c] of the regression of `target` on [1, W].
    Vector solve(const Vector& target) const {
        if (k_ == 0) {
            Vector coef(1);
            coef(0) = target.mean();
            return coef;
        }
        return qr_.solve(target);
    }

    Vector apply(const Vector& coef) const {
        Vector out = Vector::Constant(w_.rows(), coef(0));
        if (k_ > 0) {
            out.noalias() += w_ * coef.tail(k_);
        }
        return out;
    }

    // Residual of `target` after projecting out [1, W].
    Vector residual(const Vector& target) const { return target - apply(solve(target)); }

private:
    Eigen::Index k_;
    const Matrix& w_;
    Eigen::ColPivHouseholderQR<Matrix> qr_;
};

} // namespace cointbreak::detail
