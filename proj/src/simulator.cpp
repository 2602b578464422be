#include <cointbreak/errors.hpp>
#include <cointbreak/philox.hpp>
#include <cointbreak/simulator.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cointbreak {

void SimConfig::validate() const {
    if (N < 1) {
        throw InputError("N must be positive");
    }
    if (T < 2 * (N + 1)) {
        throw InputError("T too small for N");
    }
    if (static_cast<std::size_t>(baseline_beta.size()) != N) {
        throw InputError("baseline_beta must have N entries");
    }
    if (jumps.size() != break_fractions.size()) {
        throw InputError("one jump vector per break fraction is required");
    }
    for (std::size_t j = 0; j < break_fractions.size(); ++j) {
        const double tau = break_fractions[j];
        if (!(tau > 0.0 && tau < 1.0)) {
            throw InputError("break fractions must lie in (0, 1)");
        }
        if (j > 0 && !(tau > break_fractions[j - 1])) {
            throw InputError("break fractions must be strictly increasing");
        }
        if (static_cast<std::size_t>(jumps[j].size()) != N) {
            throw InputError("jump vectors must have N entries");
        }
    }
    if (!(sigma_theta_sq >= 0.0) || !(sigma_omega_sq > 0.0)) {
        throw InputError("variances must be positive");
    }
    if (!(trim_lo >= 0.0 && trim_lo < 0.5 && trim_hi >= 0.0 && trim_hi < 0.5)) {
        throw InputError("trimming fractions must lie in [0, 0.5)");
    }
    const auto idx = break_indices();
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] < 2 || idx[j] > T || (j > 0 && idx[j] <= idx[j - 1])) {
            throw InputError("break fractions map to coinciding or out-of-range indices");
        }
    }
}

std::vector<std::size_t> SimConfig::break_indices() const {
    std::vector<std::size_t> out;
    out.reserve(break_fractions.size());
    for (double tau : break_fractions) {
        out.push_back(static_cast<std::size_t>(std::ceil(tau * static_cast<double>(T) - 1e-9)));
    }
    return out;
}

SimDraw generate(const SimConfig& config, std::size_t rep_index) {
    config.validate();
    const auto t_len = static_cast<Eigen::Index>(config.T);
    const auto n = static_cast<Eigen::Index>(config.N);

    // Innovations (e_t, w_t) = L z_t with L the Cholesky factor of their covariance.
    Matrix cov = Matrix::Zero(n + 1, n + 1);
    cov(0, 0) = config.sigma_theta_sq;
    cov.bottomRightCorner(n, n).diagonal().setConstant(config.sigma_omega_sq);
    if (config.endogenous) {
        cov.block(1, 0, n, 1).setConstant(config.endogenous_cov);
        cov.block(0, 1, 1, n).setConstant(config.endogenous_cov);
    }
    Matrix chol;
    if (config.endogenous) {
        Eigen::LLT<Matrix> llt(cov);
        if (llt.info() != Eigen::Success) {
            throw InputError("innovation covariance is not positive definite");
        }
        chol = llt.matrixL();
    } else {
        chol = cov.cwiseSqrt();
    }

    Philox4x32 rng(config.seed, rep_index);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto breaks = config.break_indices();
    Matrix betas(static_cast<Eigen::Index>(breaks.size()) + 1, n);
    betas.row(0) = config.baseline_beta.transpose();
    for (std::size_t j = 0; j < breaks.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(j);
        betas.row(r + 1) = betas.row(r) + config.jumps[j].transpose();
    }

    Vector y(t_len);
    Matrix x(t_len, n);
    Vector errors(t_len);
    Eigen::RowVectorXd level = Eigen::RowVectorXd::Zero(n);
    Vector z(n + 1);
    std::size_t regime = 0;
    for (Eigen::Index t = 0; t < t_len; ++t) {
        for (Eigen::Index i = 0; i <= n; ++i) {
            z(i) = normal(rng);
        }
        const Vector shock = chol * z;
        level += shock.tail(n).transpose();
        x.row(t) = level;
        while (regime < breaks.size() && static_cast<Eigen::Index>(breaks[regime]) <= t + 1) {
            ++regime;
        }
        errors(t) = shock(0);
        y(t) = config.mu + betas.row(static_cast<Eigen::Index>(regime)).dot(level) + shock(0);
    }

    BreakModel truth;
    truth.breakpoints = breaks;
    truth.segment_betas = betas;
    truth.intercept = config.mu;
    truth.residuals = errors;
    truth.ssr = errors.squaredNorm();
    return {TimeSeriesData(std::move(y), std::move(x)), std::move(truth)};
}

double signal_strength(const SimConfig& config) {
    if (config.break_fractions.empty()) {
        throw InputError("signal strength needs at least one break");
    }
    double min_jump = std::numeric_limits<double>::infinity();
    for (const auto& jump : config.jumps) {
        min_jump = std::min(min_jump, jump.norm());
    }
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), config.break_fractions.begin(), config.break_fractions.end());
    edges.push_back(1.0);
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < edges.size(); ++j) {
        min_gap = std::min(min_gap, (edges[j] - edges[j - 1]) * static_cast<double>(config.T));
    }
    return min_jump * min_jump * min_gap;
}

namespace {

SimConfig with_breaks(std::string name, std::vector<double> taus, const Vector& jump) {
    SimConfig cfg;
    cfg.name = std::move(name);
    cfg.break_fractions = std::move(taus);
    cfg.jumps.assign(cfg.break_fractions.size(), jump);
    return cfg;
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"null",          "sb1",           "sb2",           "sb4",
            "partial",       "partial_sb2",   "partial_sb4",   "boundary_0.1",
            "boundary_0.9",  "boundary_0.1_0.9", "boundary_0.1_0.95", "endogenous",
            "endogenous_sb2", "endogenous_sb4"};
}

SimConfig scenario(const std::string& name) {
    const Vector full = Vector::Constant(2, 2.0);
    Vector partial(2);
    partial << 2.0, 0.0;

    if (name == "null") {
        return with_breaks(name, {}, full);
    }
    if (name == "sb1") {
        return with_breaks(name, {0.5}, full);
    }
    if (name == "sb2") {
        return with_breaks(name, {0.33, 0.67}, full);
    }
    if (name == "sb4") {
        return with_breaks(name, {0.2, 0.4, 0.6, 0.8}, full);
    }
    if (name == "partial") {
        return with_breaks(name, {0.5}, partial);
    }
    if (name == "partial_sb2") {
        return with_breaks(name, {0.33, 0.67}, partial);
    }
    if (name == "partial_sb4") {
        return with_breaks(name, {0.2, 0.4, 0.6, 0.8}, partial);
    }
    if (name == "boundary_0.1") {
        return with_breaks(name, {0.1}, full);
    }
    if (name == "boundary_0.9") {
        return with_breaks(name, {0.9}, full);
    }
    if (name == "boundary_0.1_0.9") {
        return with_breaks(name, {0.1, 0.9}, full);
    }
    if (name == "boundary_0.1_0.95") {
        auto cfg = with_breaks(name, {0.1, 0.95}, full);
        cfg.trim_lo = 0.05;
        cfg.trim_hi = 0.0;
        return cfg;
    }
    if (name == "endogenous" || name == "endogenous_sb2" || name == "endogenous_sb4") {
        std::vector<double> taus{0.5};
        if (name == "endogenous_sb2") {
            taus = {0.33, 0.67};
        } else if (name == "endogenous_sb4") {
            taus = {0.2, 0.4, 0.6, 0.8};
        }
        auto cfg = with_breaks(name, taus, full);
        cfg.endogenous = true;
        cfg.augment = true;
        cfg.leads_lags = 1;
        return cfg;
    }
    throw InputError("unknown scenario: " + name);
}

} // namespace cointbreak
