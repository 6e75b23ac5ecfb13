#pragma once

// Authentication-frame codec: SOF | data | CRC-8 | EOF with CAN-style bit
// stuffing over SOF + data + CRC. EOF (seven 1s) is appended unstuffed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tacan/bitstring.hpp"

namespace tacan::bitcodec {

inline constexpr std::size_t kSofBits = 1;
inline constexpr std::size_t kCrcBits = 8;
inline constexpr std::size_t kEofBits = 7;
/// SOF + CRC + EOF.
inline constexpr std::size_t kOverheadBits = kSofBits + kCrcBits + kEofBits;
/// Run length after which a bit of opposite polarity is inserted.
inline constexpr std::size_t kStuffRun = 5;

enum class FrameStatus {
    ok,
    crc_mismatch,
    stuffing_violation,
    missing_eof,
    missing_sof,
};

std::string_view to_string(FrameStatus status) noexcept;

class FrameError : public std::runtime_error {
public:
    FrameError(FrameStatus status, const std::string& what)
        : std::runtime_error(what), status_(status) {}
    FrameStatus status() const noexcept { return status_; }

private:
    FrameStatus status_;
};

/// CRC-8 SAE-J1850 / AUTOSAR profile: poly 0x1D, init 0xFF, MSB-first,
/// no reflection, final XOR 0xFF.
std::uint8_t crc8(std::span<const std::uint8_t> data) noexcept;

/// CRC-8 over a bit field packed MSB-first and zero-padded to whole bytes.
std::uint8_t crc8(const BitString& bits);

BitString stuff_bits(const BitString& raw);

/// Inverse of stuff_bits. Throws FrameError(stuffing_violation) when six
/// identical bits are found.
BitString destuff_bits(const BitString& stuffed);

/// Unstuffed frame fields.
struct AuthFrame {
    BitString data;
    std::uint8_t crc = 0;

    static AuthFrame make(BitString data);

    /// SOF + data + CRC, before stuffing.
    BitString stuffed_region() const;
};

/// stuff(SOF | a_m | crc8(a_m)) | EOF. Throws std::invalid_argument on an
/// empty message.
BitString encode_frame(const BitString& a_m);

struct DecodeOutcome {
    FrameStatus status = FrameStatus::missing_sof;
    BitString data;
    /// Bits consumed from the SOF through the last examined bit. On success
    /// this spans the whole frame including EOF.
    std::size_t consumed = 0;
};

/// Decodes a frame whose SOF sits at `start`. `data_bits` is the fixed
/// data-field length agreed by both ends.
DecodeOutcome try_decode_frame(const BitString& bits, std::size_t start, std::size_t data_bits);

/// Throwing wrapper: returns the data field or throws FrameError.
BitString decode_frame(const BitString& frame, std::size_t data_bits);

struct ScanResult {
    std::size_t offset = 0;  ///< bit index of the SOF
    FrameStatus status = FrameStatus::ok;
    BitString data;          ///< empty unless status == ok
};

/// Walks an idle-1 filled bit stream and decodes every frame found.
///
/// A 0 is taken as SOF only at stream start or after at least seven
/// consecutive 1s (EOF or idle fill). After a successful frame, scanning
/// continues after its EOF; after an error it continues at the bit following
/// the failed SOF, re-synchronizing on the next run of seven 1s.
std::vector<ScanResult> scan_stream(const BitString& bits, std::size_t data_bits);

/// Worst-case transmitted length of a frame carrying n_f unstuffed bits
/// (EOF included). Throws std::domain_error for n_f < 8.
std::size_t worst_case_frame_len(std::size_t n_f);

}  // namespace tacan::bitcodec
