#include "tacan/bitcodec.hpp"

#include <array>

namespace tacan::bitcodec {

namespace {

constexpr std::uint8_t kCrcPoly = 0x1D;

constexpr std::array<std::uint8_t, 256> make_crc_table() {
    std::array<std::uint8_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        auto crc = static_cast<std::uint8_t>(i);
        for (int b = 0; b < 8; ++b) {
            crc = (crc & 0x80U) ? static_cast<std::uint8_t>((crc << 1) ^ kCrcPoly)
                                : static_cast<std::uint8_t>(crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

}  // namespace

std::string_view to_string(FrameStatus status) noexcept {
    switch (status) {
        case FrameStatus::ok: return "ok";
        case FrameStatus::crc_mismatch: return "crc_mismatch";
        case FrameStatus::stuffing_violation: return "stuffing_violation";
        case FrameStatus::missing_eof: return "missing_eof";
        case FrameStatus::missing_sof: return "missing_sof";
    }
    return "unknown";
}

std::uint8_t crc8(std::span<const std::uint8_t> data) noexcept {
    std::uint8_t crc = 0xFF;
    for (std::uint8_t byte : data) {
        crc = kCrcTable[crc ^ byte];
    }
    return static_cast<std::uint8_t>(crc ^ 0xFF);
}

std::uint8_t crc8(const BitString& bits) {
    const auto bytes = bits.to_bytes();
    return crc8(std::span<const std::uint8_t>(bytes));
}

BitString stuff_bits(const BitString& raw) {
    BitString out;
    out.reserve(raw.size() + raw.size() / 4 + 1);
    bool run_bit = false;
    std::size_t run = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const bool b = raw[i];
        out.push_back(b);
        if (run > 0 && b == run_bit) {
            ++run;
        } else {
            run_bit = b;
            run = 1;
        }
        if (run == kStuffRun) {
            // The stuffed bit starts the next run.
            run_bit = !b;
            out.push_back(run_bit);
            run = 1;
        }
    }
    return out;
}

BitString destuff_bits(const BitString& stuffed) {
    BitString out;
    out.reserve(stuffed.size());
    bool run_bit = false;
    std::size_t run = 0;
    for (std::size_t i = 0; i < stuffed.size(); ++i) {
        const bool b = stuffed[i];
        if (run == kStuffRun) {
            if (b == run_bit) {
                throw FrameError(FrameStatus::stuffing_violation,
                                 "six identical bits at index " + std::to_string(i));
            }
            run_bit = b;
            run = 1;
            continue;
        }
        out.push_back(b);
        if (run > 0 && b == run_bit) {
            ++run;
        } else {
            run_bit = b;
            run = 1;
        }
    }
    return out;
}

AuthFrame AuthFrame::make(BitString data) {
    AuthFrame f;
    f.crc = crc8(data);
    f.data = std::move(data);
    return f;
}

BitString AuthFrame::stuffed_region() const {
    BitString region;
    region.reserve(kSofBits + data.size() + kCrcBits);
    region.push_back(false);
    region.append(data);
    region.append(BitString::from_uint(crc, kCrcBits));
    return region;
}

BitString encode_frame(const BitString& a_m) {
    if (a_m.empty()) {
        throw std::invalid_argument("encode_frame: empty authentication message");
    }
    BitString out = stuff_bits(AuthFrame::make(a_m).stuffed_region());
    out.append(BitString::repeat(true, kEofBits));
    return out;
}

DecodeOutcome try_decode_frame(const BitString& bits, std::size_t start, std::size_t data_bits) {
    DecodeOutcome result;
    if (start >= bits.size() || bits[start]) {
        result.status = FrameStatus::missing_sof;
        return result;
    }
    const std::size_t need = kSofBits + data_bits + kCrcBits;
    BitString region;
    region.reserve(need);

    std::size_t pos = start;
    bool run_bit = false;
    std::size_t run = 0;
    auto fail = [&](FrameStatus status) {
        result.status = status;
        result.consumed = pos - start;
        return result;
    };

    while (region.size() < need || run == kStuffRun) {
        if (pos >= bits.size()) {
            return fail(FrameStatus::missing_eof);
        }
        const bool b = bits[pos++];
        if (run == kStuffRun) {
            if (b == run_bit) {
                return fail(FrameStatus::stuffing_violation);
            }
            run_bit = b;
            run = 1;
            continue;
        }
        region.push_back(b);
        if (run > 0 && b == run_bit) {
            ++run;
        } else {
            run_bit = b;
            run = 1;
        }
    }

    for (std::size_t i = 0; i < kEofBits; ++i) {
        if (pos >= bits.size() || !bits[pos]) {
            if (pos < bits.size()) {
                ++pos;
            }
            return fail(FrameStatus::missing_eof);
        }
        ++pos;
    }

    BitString data = region.slice(kSofBits, data_bits);
    const auto received_crc = static_cast<std::uint8_t>(region.to_uint(kSofBits + data_bits, kCrcBits));
    if (crc8(data) != received_crc) {
        return fail(FrameStatus::crc_mismatch);
    }
    result.status = FrameStatus::ok;
    result.data = std::move(data);
    result.consumed = pos - start;
    return result;
}

BitString decode_frame(const BitString& frame, std::size_t data_bits) {
    auto outcome = try_decode_frame(frame, 0, data_bits);
    if (outcome.status != FrameStatus::ok) {
        throw FrameError(outcome.status, std::string("decode_frame: ") + std::string(to_string(outcome.status)));
    }
    return std::move(outcome.data);
}

std::vector<ScanResult> scan_stream(const BitString& bits, std::size_t data_bits) {
    std::vector<ScanResult> results;
    bool synced = true;
    std::size_t ones = 0;
    std::size_t pos = 0;
    while (pos < bits.size()) {
        if (bits[pos]) {
            if (++ones >= kEofBits) {
                synced = true;
            }
            ++pos;
            continue;
        }
        ones = 0;
        if (!synced) {
            ++pos;
            continue;
        }
        auto outcome = try_decode_frame(bits, pos, data_bits);
        ScanResult r;
        r.offset = pos;
        r.status = outcome.status;
        if (outcome.status == FrameStatus::ok) {
            r.data = std::move(outcome.data);
            pos += outcome.consumed;
            // The EOF just consumed counts as idle.
            synced = true;
        } else {
            pos += 1;
            synced = false;
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::size_t worst_case_frame_len(std::size_t n_f) {
    if (n_f < 8) {
        throw std::domain_error("worst_case_frame_len: n_f must be >= 8");
    }
    return n_f + (n_f - kEofBits - 1) / 4;
}

}  // namespace tacan::bitcodec
