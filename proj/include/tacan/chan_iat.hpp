#pragma once

// IAT-based covert channel.
//
// Each bit is held for L consecutive inter-transmission times: T + delta for
// a 0, T - delta for a 1. The receiver smooths the IATs with a running mean
// of width L, picks the sampling phase that maximizes the total distance to
// the threshold T/(1+S), and slices every L-th average.

#include <cstddef>
#include <span>
#include <vector>

#include "tacan/bitstring.hpp"

namespace tacan::chan_iat {

struct IatChannelConfig {
    double period = 0.01;   ///< T, seconds
    double delta = 0.0001;  ///< deviation, seconds
    std::size_t window = 1; ///< L
    double skew = 0.0;      ///< receiver-side assumed S

    /// Throws std::invalid_argument unless 0 < delta < period and window >= 1.
    void validate() const;
    double threshold() const noexcept { return period / (1.0 + skew); }
};

std::vector<double> modulate_iat(const BitString& bits, const IatChannelConfig& cfg);

/// out[i] = mean(iat_seq[i .. i + l - 1]). Throws std::invalid_argument when
/// the sequence is shorter than the window or l == 0.
std::vector<double> running_average(std::span<const double> iat_seq, std::size_t l);

/// argmax over tau in [0, l) of sum_j |avg[j l + tau] - gamma|; the smallest
/// tau wins ties.
std::size_t find_sampling_offset(std::span<const double> avg_seq, std::size_t l, double gamma);

struct Demodulation {
    BitString bits;
    std::size_t offset = 0;  ///< tau*; bit j was sampled from IAT index j L + tau*
};

/// Throws std::invalid_argument when the sequence is shorter than L.
Demodulation demodulate_iat_detailed(std::span<const double> iat_seq, const IatChannelConfig& cfg);
BitString demodulate_iat(std::span<const double> iat_seq, const IatChannelConfig& cfg);

/// Upper-tail probability of the standard normal distribution.
double q_function(double x);

/// Inverse of q_function on (0, 1) by monotone bisection to 1e-10.
double q_inverse(double p);

/// Q(L delta / ((1 + S) sigma)). sigma is the IAT standard deviation.
/// Throws std::invalid_argument if sigma <= 0 or delta < 0.
double analytic_ber(const IatChannelConfig& cfg, double sigma);

/// Smallest window reaching bit error probability epsilon:
/// max(1, ceil((1 + S) sigma Qinv(epsilon) / delta)). epsilon in (0, 0.5].
std::size_t min_window(double delta, double skew, double sigma, double epsilon);

}  // namespace tacan::chan_iat
