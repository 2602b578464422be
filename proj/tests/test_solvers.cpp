#include "oracles.hpp"

#include <cointbreak/errors.hpp>
#include <cointbreak/simulator.hpp>
#include <cointbreak/stage1.hpp>
#include <cointbreak/stage2.hpp>

#include <doctest.h>

#include <cmath>

using namespace cointbreak;

namespace {

TimeSeriesData golden_instance() {
    std::mt19937_64 rng(2024);
    return oracle::random_series(rng, 30, 2);
}

} // namespace

TEST_CASE("group soft threshold") {
    Vector v(2);
    v << 3, 4;
    CHECK(group_soft_threshold(v, 0.0).isApprox(v));
    CHECK(group_soft_threshold(v, 5.0).isZero());
    CHECK(group_soft_threshold(v, 2.5).isApprox(Vector::Map(std::vector<double>{1.5, 2.0}.data(), 2)));
}

TEST_CASE("log spaced grid") {
    const auto g = log_spaced(0.01, 10.0, 4);
    REQUIRE(g.size() == 4);
    CHECK(g.front() == doctest::Approx(0.01));
    CHECK(g[1] == doctest::Approx(0.1));
    CHECK(g.back() == doctest::Approx(10.0));
    CHECK(log_spaced(2.0, 5.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("candidate window honours trimming and regime length") {
    const auto w = candidate_window(200, 0.15, 0.15, 4);
    CHECK(w.first == 31);
    CHECK(w.last == 171);
    const auto asym = candidate_window(200, 0.05, 0.0, 4);
    CHECK(asym.first == 11);
    CHECK(asym.last == 197);
    CHECK_THROWS_AS(candidate_window(10, 0.45, 0.45, 6), InfeasibleError);
}

TEST_CASE("frozen stage-1 reference value") {
    const auto data = golden_instance();
    Stage1Config config;
    const auto window = candidate_window(data, config);
    CHECK(window.first == 6);
    CHECK(window.last == 26);
    const double lmax = lambda_max_stage1(data, window);
    CHECK(lmax == doctest::Approx(11.552222094668176).epsilon(1e-10));
    const auto sol = solve_group_lasso(data, 0.25 * lmax, config);
    // proximal-gradient optimum of this instance
    CHECK(stage1_objective(data, sol.theta, sol.intercept, sol.augment_coefs, 0.25 * lmax) ==
          doctest::Approx(9.1601182410407738).epsilon(1e-8));
    CHECK(sol.converged);
}

TEST_CASE("frozen stage-2 reference value") {
    const auto data = golden_instance();
    WeightVector w;
    w.candidates = {10, 20};
    w.weights = {1.5, 0.5};
    const double lambda = 0.3 * lambda_max_stage2(data, w);
    CHECK(lambda == doctest::Approx(5.3037720814866667).epsilon(1e-10));
    const auto sol = solve_adaptive_group_lasso(data, w, lambda, Stage2Config{});
    CHECK(stage2_objective(data, w, sol, lambda) == doctest::Approx(7.6992362464807087).epsilon(1e-8));
}

TEST_CASE("stage-1 solver agrees with the proximal-gradient reference") {
    const auto r = oracle::stage1_sweep(31, 20);
    CHECK(r.instances == 20);
    CHECK(r.max_objective_gap <= 1e-6);
    CHECK(r.max_kkt <= 1e-6);
    CHECK(r.max_dense_kkt <= 1e-6);
}

TEST_CASE("stage-2 solver agrees with the proximal-gradient reference") {
    const auto r = oracle::stage2_sweep(32, 20);
    CHECK(r.instances >= 15);
    CHECK(r.max_objective_gap <= 1e-6);
    CHECK(r.max_kkt <= 1e-6);
    CHECK(r.max_dense_kkt <= 1e-6);
}

TEST_CASE("large lambda leaves only the unpenalized fit") {
    const auto data = golden_instance();
    Stage1Config config;
    const auto window = candidate_window(data, config);
    const double lmax = lambda_max_stage1(data, window);
    const auto sol = solve_group_lasso(data, 1.01 * lmax, config);
    CHECK(sol.active_set.empty());
    CHECK(sol.theta.group(1).isZero());
    CHECK(kkt_check_stage1(data, ThetaVector(data.length(), data.width()), lmax, window) == 0.0);
    CHECK(sol.intercept == doctest::Approx(data.y().mean()));
}

TEST_CASE("kkt check flags groups outside the window") {
    const auto data = golden_instance();
    const auto window = candidate_window(data, Stage1Config{});
    ThetaVector theta(data.length(), data.width());
    theta.set(2, Vector::Ones(2));
    CHECK(std::isinf(kkt_check_stage1(data, theta, 1.0, window)));
}

TEST_CASE("lambda path: decreasing lambda, non-increasing SSR") {
    SimConfig cfg = scenario("sb1");
    cfg.T = 100;
    const auto draw = generate(cfg, 0);
    Stage1Config config;
    const auto path = lambda_path(draw.data, config);
    REQUIRE(path.size() == stage1_lambda_grid(draw.data, config).size());
    REQUIRE(path.size() > 1);
    for (std::size_t i = 1; i < path.size(); ++i) {
        CHECK(path[i].lambda < path[i - 1].lambda);
        CHECK(path[i].ssr <= path[i - 1].ssr * (1.0 + 1e-9));
        CHECK(path[i].kkt_violation <= config.tol);
    }
    config.c0_grid = {0.5};
    CHECK(lambda_path(draw.data, config).size() == 1);
}

TEST_CASE("objective trace is monotone") {
    const auto data = golden_instance();
    Stage1Config config;
    config.record_objective = true;
    const auto window = candidate_window(data, config);
    const auto sol = solve_group_lasso(data, 0.1 * lambda_max_stage1(data, window), config);
    REQUIRE(!sol.objective_trace.empty());
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i) {
        CHECK(sol.objective_trace[i] <= sol.objective_trace[i - 1] + 1e-12);
    }
}

TEST_CASE("select_stage1 ties go to the larger lambda") {
    Stage1Solution a;
    a.lambda = 2.0;
    a.ssr = 10.0;
    a.active_set = {5};
    Stage1Solution b = a;
    b.lambda = 1.0;
    const auto chosen = select_stage1({b, a}, 50, 1);
    CHECK(chosen.lambda == 2.0);
    CHECK(select_stage1({b}, 50, 1).lambda == 1.0);
    CHECK_THROWS_AS(select_stage1({}, 50, 1), InputError);
}

TEST_CASE("noiseless break yields a non-empty selected set") {
    SimConfig cfg = scenario("sb1");
    cfg.T = 100;
    cfg.sigma_theta_sq = 0.0;
    const auto draw = generate(cfg, 1);
    const auto path = lambda_path(draw.data, Stage1Config{});
    CHECK(!select_stage1(path, 100, 2).active_set.empty());
}

TEST_CASE("screening clusters and caps") {
    Stage1Solution sol;
    sol.theta = ThetaVector(200, 1);
    sol.theta.set(1, Vector::Ones(1));
    const auto put = [&](std::size_t i, double v) {
        sol.theta.set(i, Vector::Constant(1, v));
        sol.active_set.push_back(i);
    };
    put(100, 0.5);
    CHECK(screen_candidates(sol, 10, 5) == std::vector<std::size_t>{100});

    sol = Stage1Solution{};
    sol.theta = ThetaVector(200, 1);
    put(98, 0.1);
    put(100, 0.9);
    put(103, 0.2);
    CHECK(screen_candidates(sol, 10, 5) == std::vector<std::size_t>{100});

    sol = Stage1Solution{};
    sol.theta = ThetaVector(200, 1);
    const std::vector<std::pair<std::size_t, double>> scattered{
        {20, 0.3}, {40, 0.9}, {60, 0.1}, {80, 0.5}, {100, 0.7}, {120, 0.2}, {140, 0.8}};
    for (const auto& [i, v] : scattered) {
        put(i, v);
    }
    CHECK(screen_candidates(sol, 10, 5) == std::vector<std::size_t>{20, 40, 80, 100, 140});
    CHECK(screen_candidates(Stage1Solution{}, 10, 5).empty());
}

TEST_CASE("reduced gram is positive definite for spaced candidates") {
    SimConfig cfg = scenario("sb2");
    const auto draw = generate(cfg, 2);
    CHECK(reduced_gram_min_eigenvalue(draw.data, {67, 134}) > 0.0);
}

TEST_CASE("adaptive weights") {
    Stage1Solution sol;
    sol.theta = ThetaVector(50, 2);
    Vector unit(2);
    unit << 0.6, 0.8;
    sol.theta.set(10, unit);
    sol.theta.set(20, 0.25 * unit);
    sol.active_set = {10, 20};
    auto w = compute_weights(sol, {10, 20, 30}, 1.0);
    CHECK(w.weights[0] == doctest::Approx(1.0));
    CHECK(w.weights[1] == doctest::Approx(4.0));
    CHECK(std::isinf(w.weights[2]));
    CHECK(w.live() == std::vector<std::size_t>{10, 20});
    w = compute_weights(sol, {20}, 2.0);
    CHECK(w.weights[0] == doctest::Approx(16.0));
    CHECK_THROWS_AS(compute_weights(sol, {10}, 0.0), InputError);
}

TEST_CASE("stage 2 with zero lambda is least squares on the candidates") {
    const auto data = golden_instance();
    WeightVector w;
    w.candidates = {10, 20};
    w.weights = {1.0, 1.0};
    Stage2Config config;
    config.tol = 1e-10;
    const auto sol = solve_adaptive_group_lasso(data, w, 0.0, config);
    const auto ols = segment_ols(data, {10, 20});
    CHECK(sol.ssr == doctest::Approx(ols.ssr).epsilon(1e-7));
}

TEST_CASE("weight rescaling equivariance and exclusion") {
    const auto data = golden_instance();
    WeightVector w;
    w.candidates = {8, 15, 22};
    w.weights = {0.7, WeightVector::excluded, 2.0};
    const double lambda = 0.2 * lambda_max_stage2(data, w);
    const auto a = solve_adaptive_group_lasso(data, w, lambda, Stage2Config{});
    WeightVector scaled = w;
    scaled.weights[0] *= 3.0;
    scaled.weights[2] *= 3.0;
    const auto b = solve_adaptive_group_lasso(data, scaled, lambda / 3.0, Stage2Config{});
    CHECK((a.theta_s.to_dense() - b.theta_s.to_dense()).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(std::find(a.active.begin(), a.active.end(), 15) == a.active.end());
    if (!a.active.empty()) {
        CHECK(segment_ols(data, a.active).ssr <= a.ssr + 1e-9);
    }
}

TEST_CASE("equal weights reduce to the plain group lasso on the candidates") {
    const auto data = golden_instance();
    WeightVector w;
    w.candidates = {10, 20};
    w.weights = {1.0, 1.0};
    const double lambda = 0.3 * lambda_max_stage2(data, w);
    const auto sol = solve_adaptive_group_lasso(data, w, lambda, Stage2Config{});
    const auto ref = oracle::stage2_reference(data, w, lambda);
    CHECK(stage2_objective(data, w, sol, lambda) == doctest::Approx(ref.objective).epsilon(1e-8));
}

TEST_CASE("stage-2 grid and BIC selection") {
    const auto data = golden_instance();
    WeightVector w;
    w.candidates = {10, 20};
    w.weights = {1.0, 1.0};
    Stage2Config config;
    const auto grid = stage2_lambda_grid(data, w, config);
    REQUIRE(grid.size() == config.grid_size);
    CHECK(grid.front() >= lambda_max_stage2(data, w) * (1.0 - 1e-12));
    CHECK(grid.back() == doctest::Approx(1.0 / 30.0));
    const auto one = select_stage2(data, w, {grid[5]}, config);
    CHECK(one.lambda == grid[5]);
    const auto best = select_stage2(data, w, grid, config);
    CHECK(best.bic == doctest::Approx(stage2_bic(best.ssr, best.active.size(), 30, 2)));
    CHECK(stage2_bic(30.0, 2, 30, 2) == doctest::Approx(std::log(1.0) + 2.0 * 2.0 * std::log(30.0) / 30.0));
}

TEST_CASE("pipeline on noiseless data") {
    Vector x = Vector::LinSpaced(60, 0.0, 1.0).array().sin() + Vector::LinSpaced(60, 1.0, 30.0).array();
    Vector y = (1.0 + 3.0 * x.array()).matrix();
    const auto model = estimate_breaks(TimeSeriesData(y, x), PipelineConfig{});
    CHECK(model.num_breaks() == 0);
    CHECK(model.ssr <= 1e-16 * y.squaredNorm());

    SimConfig cfg = scenario("sb1");
    cfg.T = 200;
    cfg.sigma_theta_sq = 0.0;
    const auto draw = generate(cfg, 0);
    const auto est = estimate_breaks(draw.data, PipelineConfig{});
    CHECK(est.breakpoints == draw.truth.breakpoints);
}

TEST_CASE("pipeline trace is monotone") {
    SimConfig cfg = scenario("sb2");
    const auto draw = generate(cfg, 7);
    const auto trace = estimate_breaks_traced(draw.data, PipelineConfig{});
    for (auto c : trace.candidates) {
        CHECK(std::find(trace.stage1.active_set.begin(), trace.stage1.active_set.end(), c) != trace.stage1.active_set.end());
    }
    REQUIRE(trace.stage2);
    for (auto a : trace.stage2->active) {
        CHECK(std::find(trace.candidates.begin(), trace.candidates.end(), a) != trace.candidates.end());
    }
    CHECK(trace.candidates.size() <= 10);
    CHECK(trace.stage2->kkt_violation <= 1e-6);
    CHECK(trace.model.ssr <= trace.stage2->ssr + 1e-9);
}
