#pragma once

#include <cointbreak/design.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cointbreak {

/// A series file: header row required; optional first column `date`
/// (opaque labels), then `y`, then one column per regressor.
struct SeriesTable {
    std::vector<std::string> columns; // regressor names
    std::string response = "y";
    std::vector<std::string> labels;  // empty without a date column
    Vector y;
    Matrix x;

    TimeSeriesData to_data() const;
};

/// Throws InputError on a missing header, ragged rows, empty cells,
/// unparseable or non-finite numbers, or fewer than two value columns.
SeriesTable parse_series_csv(std::istream& in);
SeriesTable read_series_csv(const std::string& path);

/// Columns: t (original index), [date], y, fitted, residual. Numbers are
/// written with 17 significant digits so a re-read reproduces the SSR.
void write_residuals_csv(std::ostream& out, const TimeSeriesData& data, const BreakModel& model);

} // namespace cointbreak
