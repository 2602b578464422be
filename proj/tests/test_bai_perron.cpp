#include "oracles.hpp"

#include <cointbreak/bai_perron.hpp>
#include <cointbreak/errors.hpp>
#include <cointbreak/simulator.hpp>

#include <doctest.h>

#include <cmath>

using namespace cointbreak;

TEST_CASE("cost table matches direct segment regressions") {
    std::mt19937_64 rng(77);
    for (std::size_t k : {0, 2}) {
        const auto data = oracle::random_series(rng, 20, 2, k);
        const std::size_t min_seg = 2 + k + 2;
        const auto cost = ssr_table(data, min_seg);
        for (std::size_t i = 1; i <= 20; ++i) {
            for (std::size_t j = i; j <= 20; ++j) {
                if (j - i + 1 < min_seg) {
                    CHECK(std::isinf(cost(i, j)));
                } else {
                    const double direct = oracle::segment_ssr(data, i, j);
                    CHECK(std::abs(cost(i, j) - direct) <= 1e-9 * std::max(1.0, direct));
                }
            }
        }
    }
}

TEST_CASE("constant noiseless segment costs nothing") {
    Vector x = Vector::LinSpaced(12, 1.0, 12.0).array().square();
    Vector y = (2.0 - 0.5 * x.array()).matrix();
    const auto cost = ssr_table(TimeSeriesData(y, x), 3);
    CHECK(cost(1, 12) <= 1e-18 * y.squaredNorm());
    CHECK(cost(4, 9) <= 1e-18 * y.squaredNorm());
}

TEST_CASE("dynamic programme equals exhaustive enumeration") {
    const auto r = oracle::partition_sweep(99, 50);
    CHECK(r.instances == 50);
    CHECK(r.mismatches == 0);
    CHECK(r.max_ssr_gap <= 1e-10);
}

TEST_CASE("partitions: m = 0, infeasible m, argument checks") {
    std::mt19937_64 rng(3);
    const auto data = oracle::random_series(rng, 20, 1);
    const auto cost = ssr_table(data, 5);
    CHECK(optimal_partition(cost, 0).breakpoints.empty());
    CHECK(optimal_partition(cost, 0).ssr == doctest::Approx(cost(1, 20)));
    CHECK_THROWS_AS(optimal_partition(cost, 4), InfeasibleError);
    CHECK(optimal_partitions(cost, 6).size() == 4);
    CHECK_THROWS_AS(ssr_table(data, 2), InputError);
    CHECK_THROWS_AS(ssr_table(data, 21), InputError);
}

TEST_CASE("BIC selection") {
    Vector x = Vector::LinSpaced(80, 1.0, 80.0).array().sqrt() * 3.0;
    Vector y = (1.0 + 2.0 * x.array()).matrix();
    CHECK(select_num_breaks(TimeSeriesData(y, x), 3).num_breaks() == 0);

    SimConfig cfg = scenario("sb2");
    cfg.sigma_theta_sq = 0.25;
    const auto draw = generate(cfg, 4);
    const auto fit = select_num_breaks_traced(draw.data, 5);
    CHECK(fit.model.breakpoints == draw.truth.breakpoints);
    CHECK(fit.selected == 2);
    CHECK(fit.bic.size() == fit.partitions.size());
    for (std::size_t m = 0; m < fit.bic.size(); ++m) {
        CHECK(fit.bic[fit.selected] <= fit.bic[m]);
    }

    BaiPerronOptions opts;
    CHECK(opts.resolved_min_seg(200, 2, 0) == 30);
    CHECK(opts.resolved_min_seg(20, 2, 6) == 10);
}
