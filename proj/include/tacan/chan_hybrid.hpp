#pragma once

// Hybrid channel: the first part of A_m rides the IAT channel, the rest the
// LSB channel. Each part is framed on its own (SOF/CRC/EOF). The split
// fraction alpha balances the two transmission durations.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tacan/bitstring.hpp"

namespace tacan::chan_hybrid {

struct HybridConfig {
    std::size_t l1 = 1;   ///< IAT window
    std::size_t l2 = 1;   ///< LSBs per message
    std::size_t n_m = 32; ///< authentication message bits
    std::size_t n_o = 16; ///< per-frame overhead bits

    /// Throws std::invalid_argument for l1 == 0 or l2 == 0.
    void validate() const;
};

/// clamp((n_m + n_o (1 - l1 l2)) / (n_m (1 + l1 l2)), 0, 1). n_m > 0.
double splitting_ratio(const HybridConfig& cfg);

/// ceil(alpha n) with the product rounded to 1e-9 first, so that exact
/// fractions such as 0.5 * 32 are not pushed up by representation error.
std::size_t iat_share(double alpha, std::size_t n);

struct SplitMessage {
    BitString iat;
    BitString lsb;
};

/// First ceil(alpha |a_m|) bits to the IAT part. Throws std::invalid_argument
/// unless 0 <= alpha <= 1.
SplitMessage split_message(const BitString& a_m, double alpha);

/// Split with an explicit IAT share of k bits (k <= |a_m|).
SplitMessage split_at(const BitString& a_m, std::size_t k);

/// Concatenation (iat, lsb). A part that failed decoding is nullopt and
/// fails the whole message. An absent IAT part is an empty BitString.
std::optional<BitString> reassemble(const std::optional<BitString>& part_iat,
                                    const std::optional<BitString>& part_lsb);

/// Pre-stuffing frame duration with alpha = splitting_ratio(cfg):
/// t max((ceil(alpha n_m) + n_o) l1, ceil((ceil((1 - alpha) n_m) + n_o) / l2)).
/// A part with no data bits is not sent and contributes 0.
double hybrid_duration(const HybridConfig& cfg, double t);

/// Duration in message periods of one message split at k bits, using the
/// actual stuffed frame lengths of both parts.
std::size_t split_periods(const BitString& a_m, std::size_t k, const HybridConfig& cfg);

/// Refines the IAT share against stuffed lengths: starting from
/// ceil(alpha n_m), moves by one bit while that strictly reduces the gap
/// between the mean durations of the two parts over `sample`, at most 16
/// steps. When alpha is 0 or 1 the share is returned unchanged.
std::size_t refine_split(const HybridConfig& cfg, std::span<const BitString> sample);

}  // namespace tacan::chan_hybrid
