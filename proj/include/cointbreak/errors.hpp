#pragma once

#include <stdexcept>
#include <string>

namespace cointbreak {

/// Malformed or inconsistent input (dimensions, non-finite values, bad config).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested estimation cannot be carried out on this sample, e.g. the
/// trimming window or minimum regime length leaves no admissible partition.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Stacked regressor matrix of a least-squares fit is rank deficient.
class RankDeficientError : public InfeasibleError {
public:
    explicit RankDeficientError(const std::string& what) : InfeasibleError(what) {}
};

} // namespace cointbreak
