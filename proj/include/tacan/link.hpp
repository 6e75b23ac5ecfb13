#pragma once

// End-to-end covert authentication link for one message ID.
//
// Frames are sent in fixed slots. A slot holds one authentication frame
// followed by idle fill (1s, or silence on the offset channel) up to
// worst_case_frame_len(N_f) + gap bits, so a frame that has not produced an
// EOF within that bound is declared lost. The monitor node decodes the
// covert stream, assigns every decoded frame to the slot in which its SOF
// falls, and verifies slot by slot. A slot without a valid frame is a
// reception failure and the monitor's counter still advances, keeping both
// ends in step.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "tacan/attacks.hpp"
#include "tacan/auth.hpp"
#include "tacan/bitstring.hpp"
#include "tacan/timing.hpp"

namespace tacan::link {

enum class Channel { iat, lsb, offset, hybrid };
enum class Attack { none, suspension, injection, masquerade, forgery, replay };

std::string_view to_string(Channel c) noexcept;
std::string_view to_string(Attack a) noexcept;
/// Throws std::invalid_argument for unknown names.
Channel parse_channel(std::string_view name);
Attack parse_attack(std::string_view name);

struct LinkConfig {
    Channel channel = Channel::iat;
    std::uint32_t msg_id = 0x100;
    double period = 0.01;         ///< T, seconds
    double delta_frac = 0.01;     ///< delta / T
    std::size_t window = 4;       ///< L for iat/offset, L1 for hybrid
    std::size_t lsb_bits = 1;     ///< L for lsb, L2 for hybrid
    std::size_t byte_index = 0;
    std::size_t payload_bytes = 8;
    std::size_t counter_bits = auth::kDefaultCounterBits;
    auth::DigestPolicy digest;
    std::size_t gap_bits = 8;     ///< idle guard beyond the worst-case frame length
    double sigma_frac = 0.0;      ///< IAT standard deviation / T
    double skew = 0.0;
    timing::NoiseKind noise = timing::NoiseKind::gaussian;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
    std::size_t message_bits() const noexcept { return counter_bits + digest.bits; }
    double delta() const noexcept { return delta_frac * period; }
};

struct AttackPlan {
    Attack kind = Attack::none;
    double start_s = 0.0;
    double duration_s = std::numeric_limits<double>::infinity();  ///< injection only
    double inject_period_s = 0.1;                                  ///< injection only
};

struct SlotLayout {
    std::size_t iat_data_bits = 0;      ///< data bits framed on the timing channel
    std::size_t lsb_data_bits = 0;      ///< data bits framed in payload LSBs
    std::size_t timing_slot_bits = 0;   ///< covert bits per slot on iat/offset
    std::size_t lsb_slot_carriers = 0;  ///< payload carriers per slot
    std::size_t messages_per_slot = 0;  ///< bus messages per slot
};

SlotLayout slot_layout(const LinkConfig& cfg);

/// messages_per_slot * period.
double slot_duration(const LinkConfig& cfg);

/// Sends one message per slot and returns the received trace. Payloads are
/// attached only on channels that use them; payload contents are drawn from
/// `payload_rng`, arrival noise from `noise_rng`.
timing::TimingTrace transmit(const LinkConfig& cfg, std::span<const BitString> messages, Rng& noise_rng,
                             Rng& payload_rng);

/// Decodes `trace` and verifies `n_slots` slots with the monitor's context.
std::vector<attacks::AuthResult> receive(const LinkConfig& cfg, const timing::TimingTrace& trace,
                                         std::size_t n_slots, auth::AuthContext& monitor);

struct LinkRun {
    std::vector<attacks::AuthResult> results;
    std::size_t attack_slot = 0;  ///< first slot affected by the attack (n_frames when none)
    SlotLayout layout;
    double slot_seconds = 0.0;
};

/// Key derived from the seed; full transmit, attack, receive cycle.
LinkRun run_link(const LinkConfig& cfg, std::size_t n_frames, const AttackPlan& attack, std::uint64_t seed);

/// 32-byte master key drawn from the seed.
auth::Bytes master_key_from_seed(std::uint64_t seed);

}  // namespace tacan::link
