#pragma once

#include <cointbreak/bai_perron.hpp>
#include <cointbreak/simulator.hpp>
#include <cointbreak/stage2.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cointbreak {

/// Everything a CLI command needs. Fields are set from defaults, then a
/// config file, then command-line flags.
struct RunOptions {
    PipelineConfig pipeline;
    BaiPerronOptions bai_perron;
    std::optional<std::size_t> leads_lags; // DOLS augmentation when set
    std::optional<std::size_t> min_regime; // observations; overrides spacing and min_seg
    std::string method = "lasso";          // lasso | baiperron | both
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    bool include_all = false;              // hd/T over all runs, not only correct-m runs
    SimConfig sim;

    /// Throws InputError on inconsistent settings.
    void validate() const;
    /// Pipeline settings with min_regime folded in.
    PipelineConfig effective_pipeline() const;
    BaiPerronOptions effective_bai_perron() const;
};

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// `key = value` lines; `#` starts a comment; blank lines are ignored.
std::vector<KeyValue> parse_key_values(std::istream& in);
std::vector<KeyValue> read_key_values(const std::string& path);

/// Applies entries in file order, except that `scenario` is applied first so
/// the remaining keys refine the named configuration. Throws InputError on
/// unknown keys or malformed values.
void apply_config(const std::vector<KeyValue>& entries, RunOptions& options);

/// Single-key form used by command-line overrides.
void apply_setting(const std::string& key, const std::string& value, RunOptions& options);

/// Every key understood by apply_setting, for documentation and error messages.
std::vector<std::string> config_keys();

} // namespace cointbreak
