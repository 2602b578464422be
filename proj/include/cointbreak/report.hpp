#pragma once

#include <cointbreak/bai_perron.hpp>
#include <cointbreak/design.hpp>
#include <cointbreak/stage2.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cointbreak {

/// Context for turning local estimation output into user-facing records.
struct ReportContext {
    std::vector<std::string> regressors; // names for the N slope columns
    std::size_t sample_length = 0;       // T of the input before any augmentation trim
};

/// Breakpoints (index, label, fraction), regimes with their slopes, mu, W
/// coefficients and SSR of a fitted model.
nlohmann::ordered_json model_json(const TimeSeriesData& data, const BreakModel& model, const ReportContext& context);

/// One row per stage-1 path point: lambda, |A|, SSR, IC*.
nlohmann::ordered_json ic_trace_json(const std::vector<Stage1Solution>& path, std::size_t selected);

/// model_json plus stage-1 path, selected lambda, candidates, weights and the stage-2 choice.
nlohmann::ordered_json lasso_json(const TimeSeriesData& data, const EstimateTrace& trace, const ReportContext& context);

/// model_json plus the per-m SSR and BIC trace.
nlohmann::ordered_json bai_perron_json(const TimeSeriesData& data, const BaiPerronFit& fit, const ReportContext& context);

/// Index of the path point chosen by select_stage1 (same tie rule).
std::size_t selected_path_index(const std::vector<Stage1Solution>& path);

/// Delimited path table with header `lambda;active;ssr;ic;selected`.
std::string format_path(const std::vector<Stage1Solution>& path, char delimiter = ';');

/// Writes JSON with two-space indentation and a trailing newline.
void write_json(const std::string& path, const nlohmann::ordered_json& doc);

} // namespace cointbreak
