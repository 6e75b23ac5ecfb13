#pragma once

// LSB-based covert channel: frame bits ride in the L least-significant bits
// of one selected payload byte of consecutive messages of the same ID.

#include <cstddef>
#include <vector>

#include "tacan/bitcodec.hpp"
#include "tacan/bitstring.hpp"
#include "tacan/timing.hpp"

namespace tacan::chan_lsb {

using timing::Payload;
using PayloadStream = std::vector<Payload>;

struct LsbChannelConfig {
    std::size_t bits = 1;        ///< L, LSBs per message, 1..8
    std::size_t byte_index = 0;  ///< beta, 0-based

    void validate() const;
};

/// Carriers needed for `frame_bits` bits.
std::size_t carriers_needed(std::size_t frame_bits, const LsbChannelConfig& cfg);

/// Writes frame bits into carriers 0, 1, ... of `payloads`. Carrier i takes
/// bits [i L, i L + L), most significant first: bit i L lands in LSB position
/// L - 1. A short final group is completed with idle 1s. A byte is only
/// rewritten when its LSBs differ; carriers past the frame are untouched.
/// Throws std::invalid_argument when there are too few carriers or a payload
/// lacks byte beta.
PayloadStream embed_lsb(const BitString& frame_bits, const PayloadStream& payloads, const LsbChannelConfig& cfg);

/// Forces the L LSBs of byte beta to 1 (idle fill) for carriers in [first, last).
void idle_fill(PayloadStream& payloads, std::size_t first, std::size_t last, const LsbChannelConfig& cfg);

/// Concatenated L LSBs of byte beta, one group per carrier.
BitString read_lsb_bits(const PayloadStream& payloads, const LsbChannelConfig& cfg);

struct ExtractedFrame {
    std::size_t carrier = 0;  ///< carrier holding the SOF
    bitcodec::FrameStatus status = bitcodec::FrameStatus::ok;
    BitString data;
};

/// Listens for SOF after idle 1s, accumulates until EOF, destuffs and checks
/// the CRC; repeats until the stream is exhausted.
std::vector<ExtractedFrame> extract_lsb(const PayloadStream& payloads, const LsbChannelConfig& cfg,
                                        std::size_t data_bits);

/// (2^L - 1) * resolution.
double max_accuracy_error(std::size_t l, double resolution);

/// max_i |modified[i][beta] - original[i][beta]| * resolution.
double measure_accuracy_loss(const PayloadStream& original, const PayloadStream& modified,
                             std::size_t byte_index, double resolution);

}  // namespace tacan::chan_lsb
