#include "oracles.hpp"

#include <cointbreak/design.hpp>
#include <cointbreak/errors.hpp>
#include <cointbreak/simulator.hpp>

#include <doctest.h>

using namespace cointbreak;

TEST_CASE("cumulative coefficients follow prefix sums") {
    ThetaVector theta(10, 1);
    theta.set(1, Vector::Constant(1, 1.0));
    theta.set(6, Vector::Constant(1, 1.0));
    const Matrix beta = cumulative_coefficients(theta);
    for (Eigen::Index t = 0; t < 10; ++t) {
        CHECK(beta(t, 0) == (t < 5 ? 1.0 : 2.0));
    }

    ThetaVector flat(7, 2);
    flat.set(1, Vector::Constant(2, 2.0));
    CHECK(cumulative_coefficients(flat).isApprox(Matrix::Constant(7, 2, 2.0)));
}

TEST_CASE("from_segments inverts cumulative_coefficients") {
    Matrix betas(3, 2);
    betas << 1, 2, 3, 2, 3, -1;
    const auto theta = ThetaVector::from_segments(12, {4, 9}, betas);
    CHECK(theta.active_changes() == std::vector<std::size_t>{4, 9});
    const Matrix path = cumulative_coefficients(theta);
    CHECK(path.row(2).isApprox(betas.row(0)));
    CHECK(path.row(3).isApprox(betas.row(1)));
    CHECK(path.row(11).isApprox(betas.row(2)));
    CHECK(ThetaVector::from_dense(theta.to_dense()).to_dense().isApprox(theta.to_dense()));
}

TEST_CASE("theta vector rejects bad groups") {
    ThetaVector theta(5, 2);
    CHECK_THROWS_AS(theta.set(0, Vector::Zero(2)), InputError);
    CHECK_THROWS_AS(theta.set(6, Vector::Zero(2)), InputError);
    CHECK_THROWS_AS(theta.set(2, Vector::Zero(3)), InputError);
}

TEST_CASE("fitted values and gradient blocks on small inputs") {
    Matrix x(3, 1);
    x << 1, 2, 3;
    const Matrix g = gradient_blocks(x, Vector::Ones(3));
    CHECK(g(0, 0) == 6.0);
    CHECK(g(1, 0) == 5.0);
    CHECK(g(2, 0) == 3.0);
    CHECK(gradient_blocks(x, Vector::Zero(3)).isZero());

    CHECK(fitted_values(x, Matrix::Zero(3, 1), 0.0).isZero());
    const Matrix ones = Matrix::Ones(4, 1);
    Matrix theta = Matrix::Zero(4, 1);
    theta(0, 0) = 1.5;
    CHECK(fitted_values(ones, theta, 0.5).isApprox(Vector::Constant(4, 2.0)));
}

TEST_CASE("prefix and suffix sums match the dense design") {
    CHECK(oracle::structure_sweep(8, 100) <= 1e-10);
}

TEST_CASE("suffix gram rows hold tail cross products") {
    std::mt19937_64 rng(4);
    const auto data = oracle::random_series(rng, 15, 2);
    const Matrix h = suffix_gram(data.x());
    for (Eigen::Index i = 0; i < 15; ++i) {
        const Matrix tail = data.x().bottomRows(15 - i);
        const Matrix expected = tail.transpose() * tail;
        CHECK((h.row(i).reshaped(2, 2) - expected).norm() <= 1e-10 * expected.norm());
    }
}

TEST_CASE("segment OLS recovers noiseless regimes") {
    SimConfig cfg = scenario("sb1");
    cfg.T = 120;
    cfg.sigma_theta_sq = 0.0;
    const auto draw = generate(cfg, 3);
    const BreakModel fit = segment_ols(draw.data, draw.truth.breakpoints);
    CHECK(fit.ssr <= 1e-16 * draw.data.y().squaredNorm());
    CHECK((fit.segment_betas - draw.truth.segment_betas).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-8));

    Vector xs = Vector::LinSpaced(20, 1.0, 20.0);
    Vector y = (2.0 + 2.0 * xs.array()).matrix();
    const BreakModel line = segment_ols(TimeSeriesData(y, xs), {});
    CHECK(line.intercept == doctest::Approx(2.0));
    CHECK(line.segment_betas(0, 0) == doctest::Approx(2.0));
    CHECK(line.ssr <= 1e-18 * y.squaredNorm());
}

TEST_CASE("segment OLS matches a dense pooled regression") {
    std::mt19937_64 rng(21);
    const auto data = oracle::random_series(rng, 40, 2, 2);
    const std::vector<std::size_t> breaks{14, 27};
    const BreakModel fit = segment_ols(data, breaks);
    Matrix a = Matrix::Zero(40, 1 + 2 + 3 * 2);
    a.col(0).setOnes();
    a.middleCols(1, 2) = data.w();
    for (Eigen::Index t = 0; t < 40; ++t) {
        const Eigen::Index r = t + 1 < 14 ? 0 : (t + 1 < 27 ? 1 : 2);
        a.block(t, 3 + 2 * r, 1, 2) = data.x().row(t);
    }
    const Vector coef = a.colPivHouseholderQr().solve(data.y());
    CHECK(fit.ssr == doctest::Approx((data.y() - a * coef).squaredNorm()).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(coef(0)).epsilon(1e-8));
    CHECK(fit.residuals.size() == 40);
}

TEST_CASE("segment OLS rejects short regimes and bad inputs") {
    std::mt19937_64 rng(5);
    const auto data = oracle::random_series(rng, 30, 2);
    CHECK_THROWS_AS(segment_ols(data, {3}), InfeasibleError);
    CHECK_THROWS_AS(segment_ols(data, {20, 10}), InputError);
    Vector y = Vector::Ones(5);
    y(2) = std::nan("");
    CHECK_THROWS_AS(TimeSeriesData(y, Matrix::Ones(5, 1)), InputError);
    CHECK_THROWS_AS(TimeSeriesData(Vector::Ones(5), Matrix::Ones(4, 1)), InputError);
}
