#pragma once

// Throughput analytics, Monte-Carlo BER sweeps and false-alarm tables.
// Every table is a pure function of its inputs and seed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tacan/auth.hpp"
#include "tacan/bitstring.hpp"
#include "tacan/chan_hybrid.hpp"

namespace tacan::bench {

/// Authentication messages with counters 1..n under a key drawn from the
/// seed, and their stuffed frame lengths.
struct FrameSample {
    std::vector<BitString> messages;
    std::vector<std::size_t> frame_bits;
    std::size_t n_m = 0;

    double mean_frame_bits() const;
};

FrameSample make_frame_sample(std::size_t n_frames, std::uint64_t seed,
                              std::size_t counter_bits = auth::kDefaultCounterBits,
                              const auth::DigestPolicy& policy = {});

struct ThroughputRow {
    std::string channel;
    std::size_t l1 = 0;
    std::size_t l2 = 0;
    double period = 0.0;
    std::size_t n_m = 0;
    std::size_t n_o = 0;
    double alpha = 0.0;
    std::size_t iat_bits = 0;  ///< hybrid: data bits on the IAT part
    double r_c = 0.0;
    double r_a = 0.0;
};

/// r_c = 1/(l t); r_a = n_m / (avg l t).
ThroughputRow throughput_iat(double t, std::size_t l, std::size_t n_m, std::size_t n_o, double avg_frame_bits);

/// Each frame occupies ceil(bits / l) messages. r_c = sum bits / (sum
/// messages t); r_a = n_m frames / (sum messages t).
ThroughputRow throughput_lsb(double t, std::size_t l, std::size_t n_m, std::size_t n_o,
                             std::span<const std::size_t> frame_bits);

/// Split at the refined IAT share; per message the duration is
/// max(f1 l1, ceil(f2 / l2)) periods over the stuffed part lengths f1, f2.
/// r_c counts the bits of both frames, r_a the n_m message bits.
ThroughputRow throughput_hybrid(const chan_hybrid::HybridConfig& cfg, double t, const FrameSample& sample);

/// IAT at l1, LSB at l2, hybrid at (l1, l2).
std::vector<ThroughputRow> throughput_table(double t, std::size_t l1, std::size_t l2, const FrameSample& sample);

void write_throughput_csv(std::ostream& out, std::span<const ThroughputRow> rows);

struct BerCell {
    double sigma_frac = 0.0;
    std::size_t window = 0;
    double delta_frac = 0.0;
    std::size_t bits = 0;
    std::size_t errors = 0;
    double analytic = 0.0;   ///< Q(L delta / sigma)
    double empirical = 0.0;
    double se = 0.0;         ///< binomial standard error at the analytic rate
};

/// One Monte-Carlo cell: random bits through modulation, Gaussian arrival
/// noise with IAT standard deviation sigma_frac T, and demodulation.
BerCell ber_cell(double sigma_frac, std::size_t window, double delta_frac, std::size_t bits, std::uint64_t seed,
                 double period = 0.01);

/// Cells ordered by (sigma, L); cell i uses Rng::derive_seed(seed, i).
/// Cells run on worker threads. Throws std::invalid_argument when
/// bits_per_point < 10^4 or the L range is empty.
std::vector<BerCell> ber_sweep(std::span<const double> sigma_fracs, std::size_t l_min, std::size_t l_max,
                               double delta_frac, std::size_t bits_per_point, std::uint64_t seed,
                               double period = 0.01);

void write_ber_csv(std::ostream& out, std::span<const BerCell> cells);

struct FaConfig {
    std::string name;
    double period = 0.01;
    double sigma_frac = 0.0;
    double delta_frac = 0.02;
    std::size_t window = 1;
};

/// Smallest L whose analytic frame failure over a slot of `slot_bits` bits,
/// 1 - (1 - Q(L delta / sigma))^slot_bits, is at most `frame_failure`.
std::size_t window_for_frame_budget(double sigma_frac, double delta_frac, std::size_t slot_bits,
                                    double frame_failure);

/// Synthetic stand-ins for the five measured vehicle messages, each with
/// the window sized for a 2% frame failure budget at delta = 0.02 T.
std::vector<FaConfig> vehicle_fa_configs();

struct FaRow {
    std::string name;
    double sigma_frac = 0.0;
    double delta_frac = 0.0;
    std::size_t window = 0;
    std::size_t k = 0;
    std::size_t frames = 0;
    double p_fa = 0.0;            ///< slots with an alarm / slots
    double run_alarm_rate = 0.0;  ///< runs with any alarm / runs
    double reception_failure_rate = 0.0;
    double verification_failure_rate = 0.0;
};

/// Attack-free IAT-channel runs through the full link. Run r of config c
/// uses Rng::derive_seed(seed, c * runs + r). Throws std::invalid_argument
/// when runs < 100.
std::vector<FaRow> fa_table(std::span<const FaConfig> configs, std::span<const std::size_t> ks, std::size_t runs,
                            std::size_t frames_per_run, std::uint64_t seed);

void write_fa_csv(std::ostream& out, std::span<const FaRow> rows);

}  // namespace tacan::bench
