#pragma once

// Counter-based random streams. Every draw is a pure function of
// (key, stream, position), so results never depend on evaluation order.

#include <array>
#include <cstdint>

#include "hgf/normal.hpp"

namespace hgf
{

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept
{
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/**
 * A keyed family of streams. Position p of stream s yields one 64-bit word;
 * positions 2q and 2q+1 share a single Philox block (counter = (q, s)).
 */
class CounterRng
{
public:
    CounterRng(std::uint64_t key, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)), stream_hi_(static_cast<std::uint32_t>(stream >> 32))
    {
    }

    /// Both words of block q: positions 2q and 2q+1.
    std::array<std::uint64_t, 2> block(std::uint64_t q) const noexcept
    {
        const auto out = philox4x32({static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(q >> 32),
                                     stream_lo_, stream_hi_},
                                    key_);
        return {(std::uint64_t{out[0]} << 32) | out[1], (std::uint64_t{out[2]} << 32) | out[3]};
    }

    std::uint64_t bits(std::uint64_t position) const noexcept
    {
        return block(position >> 1)[position & 1];
    }

    double uniform(std::uint64_t position) const noexcept { return to_uniform(bits(position)); }

    double gaussian(std::uint64_t position) const { return normal_quantile(uniform(position)); }

    /// Grid index used by to_uniform: the top 52 bits of the word.
    static constexpr std::uint64_t grid_index(std::uint64_t word) noexcept { return word >> 12; }

    /// Maps a word onto the open grid (i + 1/2) 2^-52, i in [0, 2^52). Every
    /// grid value is exactly representable, so u never rounds to 0 or 1.
    static constexpr double to_uniform(std::uint64_t word) noexcept
    {
        return (static_cast<double>(grid_index(word)) + 0.5) * 0x1p-52;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

} // namespace hgf
