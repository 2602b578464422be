#pragma once

#include <cointbreak/design.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cointbreak {

/// Data-generating process
///   y_t = mu + beta_t' X_t + e_t,  X_t = X_{t-1} + w_t,  X_0 = 0,
/// with e_t ~ N(0, s2_e), w_t ~ N(0, s2_w I). In endogenous mode (e_t, w_t)
/// is drawn jointly with cov(e_t, w_kt) = `endogenous_cov` for every k.
struct SimConfig {
    std::string name = "custom";
    std::size_t T = 200;
    std::size_t N = 2;
    std::size_t reps = 1000;
    double mu = 2.0;
    Vector baseline_beta = Vector::Constant(2, 2.0);
    std::vector<double> break_fractions;
    std::vector<Vector> jumps;
    double sigma_theta_sq = 4.0; // regression error variance
    double sigma_omega_sq = 1.0; // regressor innovation variance
    bool endogenous = false;
    double endogenous_cov = 0.5;
    std::uint64_t seed = 1;

    // Estimation settings the scenario is meant to be run with.
    double trim_lo = 0.15;
    double trim_hi = 0.15;
    std::size_t leads_lags = 0;
    bool augment = false;
    std::size_t max_breaks = 5;

    /// Throws InputError on inconsistent fields.
    void validate() const;
    /// Break indices ceil(tau_j T), the first observation of each new regime.
    std::vector<std::size_t> break_indices() const;
};

struct SimDraw {
    TimeSeriesData data;
    BreakModel truth;
};

/// Deterministic in (config.seed, rep_index).
SimDraw generate(const SimConfig& config, std::size_t rep_index);

/// (min jump norm)^2 * (min regime length), regime lengths taken from the
/// break fractions on the [0, T] scale. Throws InputError without breaks.
double signal_strength(const SimConfig& config);

/// Named configurations of the Monte Carlo study; throws InputError for unknown names.
SimConfig scenario(const std::string& name);
std::vector<std::string> scenario_names();

} // namespace cointbreak
