#pragma once

#include <cointbreak/design.hpp>

#include <cstddef>

namespace cointbreak {

/// Dynamic OLS augmentation: keeps rows t = l+2 ... T-l and attaches
/// W_t = [dX_{t-l}, ..., dX_{t+l}] (K = N(2l+1) columns, ordered lag l first).
/// The result reports `first_index` relative to the input's original indices.
/// Throws InputError unless T > 2l + 2 and the trimmed sample is still admissible.
TimeSeriesData augment(const TimeSeriesData& data, std::size_t leads_lags);

} // namespace cointbreak
