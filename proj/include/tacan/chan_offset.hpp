#pragma once

// Offset-based covert channel.
//
// A symbol spans L (even) ITTs. A 0 shortens the first L/2 ITTs by delta and
// lengthens the last L/2; a 1 does the reverse; silence leaves all L at T.
// The accumulated clock offset therefore swings by +-delta L/2 mid-symbol
// and returns to its reference level at every symbol boundary. The receiver
// works in batches of N = n_f L IATs, takes the midpoint of the batch's
// offset range as reference, and slices with thresholds at +-delta L/4.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tacan/bitstring.hpp"

namespace tacan::chan_offset {

enum class Symbol : std::uint8_t { zero, one, silence };

struct OffsetChannelConfig {
    double period = 0.01;
    double delta = 0.0001;
    std::size_t window = 2;         ///< L, even
    std::size_t batch_symbols = 1;  ///< n_f; batch size N = n_f L
    double skew = 0.0;              ///< thresholds are divided by 1 + skew

    /// Throws std::invalid_argument for odd or zero L, n_f == 0, or delta
    /// outside (0, period).
    void validate() const;
    std::size_t batch_size() const noexcept { return batch_symbols * window; }
};

std::vector<Symbol> to_symbols(const BitString& bits);

std::vector<double> modulate_offset(std::span<const Symbol> symbols, const OffsetChannelConfig& cfg);

/// O[i] = i T - sum_{j=1..i} iat[j] for i = 1..N (result index i - 1).
std::vector<double> batch_offsets(std::span<const double> iat_seq, double period);

struct BatchDecode {
    std::vector<Symbol> symbols;
    double kappa = 0.0;
    std::size_t offset = 0;  ///< tau*
};

/// Decodes one batch of exactly cfg.batch_size() IATs.
BatchDecode demodulate_batch(std::span<const double> batch, const OffsetChannelConfig& cfg);

/// Decodes every complete batch and concatenates the symbols. A trailing
/// partial batch is ignored. Throws std::invalid_argument when shorter than
/// one batch.
std::vector<Symbol> demodulate_offset(std::span<const double> iat_seq, const OffsetChannelConfig& cfg);

/// Maximal runs of 0/1 symbols, separated by silence.
std::vector<BitString> split_at_silence(std::span<const Symbol> symbols);

}  // namespace tacan::chan_offset
