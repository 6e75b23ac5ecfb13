#include "tacan/chan_lsb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tacan::chan_lsb {

void LsbChannelConfig::validate() const {
    if (bits < 1 || bits > 8) {
        throw std::invalid_argument("LSB channel: bits per message must be in [1, 8]");
    }
}

std::size_t carriers_needed(std::size_t frame_bits, const LsbChannelConfig& cfg) {
    cfg.validate();
    return (frame_bits + cfg.bits - 1) / cfg.bits;
}

namespace {

std::uint8_t lsb_mask(std::size_t l) { return static_cast<std::uint8_t>((1U << l) - 1U); }

std::uint8_t& carrier_byte(Payload& p, std::size_t beta) {
    if (beta >= p.size()) {
        throw std::invalid_argument("LSB channel: payload shorter than byte index");
    }
    return p[beta];
}

}  // namespace

PayloadStream embed_lsb(const BitString& frame_bits, const PayloadStream& payloads, const LsbChannelConfig& cfg) {
    cfg.validate();
    const std::size_t needed = carriers_needed(frame_bits.size(), cfg);
    if (payloads.size() < needed) {
        throw std::invalid_argument("embed_lsb: insufficient carrier messages");
    }
    PayloadStream out = payloads;
    const auto mask = lsb_mask(cfg.bits);
    for (std::size_t c = 0; c < needed; ++c) {
        unsigned group = 0;
        for (std::size_t k = 0; k < cfg.bits; ++k) {
            const std::size_t idx = c * cfg.bits + k;
            const bool bit = idx < frame_bits.size() ? frame_bits[idx] : true;
            group = (group << 1) | (bit ? 1U : 0U);
        }
        auto& byte = carrier_byte(out[c], cfg.byte_index);
        if ((byte & mask) != group) {
            byte = static_cast<std::uint8_t>((byte & ~mask) | group);
        }
    }
    return out;
}

void idle_fill(PayloadStream& payloads, std::size_t first, std::size_t last, const LsbChannelConfig& cfg) {
    cfg.validate();
    const auto mask = lsb_mask(cfg.bits);
    for (std::size_t c = first; c < last && c < payloads.size(); ++c) {
        carrier_byte(payloads[c], cfg.byte_index) |= mask;
    }
}

BitString read_lsb_bits(const PayloadStream& payloads, const LsbChannelConfig& cfg) {
    cfg.validate();
    BitString bits;
    bits.reserve(payloads.size() * cfg.bits);
    for (const auto& p : payloads) {
        if (cfg.byte_index >= p.size()) {
            throw std::invalid_argument("read_lsb_bits: payload shorter than byte index");
        }
        const std::uint8_t byte = p[cfg.byte_index];
        for (std::size_t k = cfg.bits; k-- > 0;) {
            bits.push_back(((byte >> k) & 1U) != 0);
        }
    }
    return bits;
}

std::vector<ExtractedFrame> extract_lsb(const PayloadStream& payloads, const LsbChannelConfig& cfg,
                                        std::size_t data_bits) {
    const BitString stream = read_lsb_bits(payloads, cfg);
    std::vector<ExtractedFrame> out;
    for (auto& r : bitcodec::scan_stream(stream, data_bits)) {
        out.push_back({r.offset / cfg.bits, r.status, std::move(r.data)});
    }
    return out;
}

double max_accuracy_error(std::size_t l, double resolution) {
    if (l < 1 || l > 8) {
        throw std::invalid_argument("max_accuracy_error: l must be in [1, 8]");
    }
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("max_accuracy_error: resolution must be > 0");
    }
    return static_cast<double>((1U << l) - 1U) * resolution;
}

double measure_accuracy_loss(const PayloadStream& original, const PayloadStream& modified,
                             std::size_t byte_index, double resolution) {
    if (original.size() != modified.size()) {
        throw std::invalid_argument("measure_accuracy_loss: stream length mismatch");
    }
    int worst = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (byte_index >= original[i].size() || byte_index >= modified[i].size()) {
            throw std::invalid_argument("measure_accuracy_loss: payload shorter than byte index");
        }
        worst = std::max(worst, std::abs(int{modified[i][byte_index]} - int{original[i][byte_index]}));
    }
    return worst * resolution;
}

}  // namespace tacan::chan_lsb
