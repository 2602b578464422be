#pragma once

#include <cointbreak/config_file.hpp>
#include <cointbreak/metrics.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cointbreak {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInput = 2, kExitInfeasible = 3 };

/// Estimates one simulated replication with the configured method
/// ("lasso" or "baiperron") and scores it against the truth.
RunRecord simulate_one(const RunOptions& options, const std::string& method, std::size_t rep);

/// Replications 0 .. reps-1 spread over `options.jobs` threads. Results are
/// ordered by replication; if any replication throws, the exception of the
/// lowest failing replication is rethrown.
std::vector<RunRecord> simulate_records(const RunOptions& options, const std::string& method);

/// Runs `body` and maps InputError to 2, InfeasibleError to 3 and any other
/// exception to 1, printing the message to `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

/// Writes report.json plus residuals_<method>.csv into out_dir and a short
/// summary to `out`.
int cmd_estimate(const std::string& csv_path, const RunOptions& options, const std::string& out_dir,
                 std::ostream& out);

/// Prints the table (or the single RunRecord when reps == 1) to `out` and,
/// when out_dir is set, writes report.json and table.csv there.
int cmd_simulate(const RunOptions& options, const std::string& out_dir, std::ostream& out);

/// Prints the stage-1 lambda path with the IC* minimum marked; writes path.csv when out_dir is set.
int cmd_path(const std::string& csv_path, const RunOptions& options, const std::string& out_dir,
             std::ostream& out);

} // namespace cointbreak
