#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cointbreak {

/// Philox4x32-10 counter-based generator. The 64-bit key selects the
/// experiment, the 64-bit stream selects an independent substream (one per
/// replication), so draws never depend on the order in which streams run.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t key, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (next_ == 4) {
            block_ = encrypt(counter_, key_);
            if (++counter_[0] == 0) {
                ++counter_[1];
            }
            next_ = 0;
        }
        return block_[next_++];
    }

    /// The raw bijection: ten rounds over `counter` under `key`.
    static Block encrypt(Block counter, std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * counter[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * counter[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return counter;
    }

private:
    std::array<std::uint32_t, 2> key_;
    Block counter_;
    Block block_{};
    int next_ = 4;
};

} // namespace cointbreak
