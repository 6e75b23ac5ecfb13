#pragma once

// Timing model for periodic messages.
//
// A sender with relative clock skew S transmits message i at local time t_i.
// The receiver observes a_i = t_i / (1 + S) + eta_i, where eta_i folds
// together delay, jitter and quantization noise. Inter-arrival times then
// have mean T/(1+S) and variance 2 sigma_eta^2 for a constant period T.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacan/rng.hpp"

namespace tacan::timing {

using Payload = std::vector<std::uint8_t>;

enum class NoiseKind { gaussian, laplace };

struct ClockModel {
    double skew = 0.0;       ///< S, dimensionless (100e-6 is 100 ppm)
    double sigma_eta = 0.0;  ///< arrival-noise standard deviation, seconds
    double delay = 0.0;      ///< mean network delay d, seconds
    std::uint64_t seed = 0;
    NoiseKind noise = NoiseKind::gaussian;

    /// Throws std::invalid_argument if sigma_eta < 0 or 1 + skew <= 0.
    void validate() const;
};

struct TimingTrace {
    std::uint32_t msg_id = 0;
    std::vector<double> arrivals;
    /// One payload per arrival, or empty when the trace carries timing only.
    std::vector<Payload> payloads;
    std::optional<double> nominal_period;

    std::size_t size() const noexcept { return arrivals.size(); }
    bool has_payloads() const noexcept { return !payloads.empty(); }
};

struct IatStats {
    double mu = 0.0;
    double sigma = 0.0;
    std::size_t n_used = 0;
    std::size_t n_total = 0;
};

std::vector<double> make_periodic_itts(double period, std::size_t n);

/// Transmit times are t_0 = 0 and t_i = sum of the first i ITTs; the result
/// has itts.size() + 1 arrivals. Uses a fresh stream seeded from clock.seed.
TimingTrace simulate_arrivals(std::span<const double> itts, const ClockModel& clock);

/// Same, drawing noise from a caller-owned stream (clock.seed is ignored).
TimingTrace simulate_arrivals(std::span<const double> itts, const ClockModel& clock, Rng& rng);

/// Pairwise differences of the arrival times. Throws std::invalid_argument
/// with fewer than two arrivals.
std::vector<double> iats(const TimingTrace& trace);
std::vector<double> iats(std::span<const double> arrivals);

/// Mean and sample standard deviation of the IATs within [0.8 T, 1.2 T].
/// Throws std::domain_error if nothing survives the filter.
IatStats robust_sigma(std::span<const double> iat_seq, double period);

struct ParseIssue {
    std::size_t line = 0;  ///< 1-based
    std::string text;
    std::string reason;
};

struct CandumpLog {
    std::map<std::uint32_t, TimingTrace> traces;
    std::vector<ParseIssue> errors;
};

/// Reads "(timestamp) iface ID#HEXDATA" lines. Blank lines are skipped;
/// malformed lines are collected with their line numbers.
CandumpLog parse_candump(std::istream& in);

/// Two-column CSV: "index,timestamp_seconds".
void write_trace_csv(std::ostream& out, const TimingTrace& trace);

}  // namespace tacan::timing
