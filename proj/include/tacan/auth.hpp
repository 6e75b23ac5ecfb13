#pragma once

// Key hierarchy and authentication messages.
//
//   SK  = HMAC-SHA256(MK, be64(C_s))
//   A_m = be(C_m, W_c) || truncate(HMAC-SHA256(SK, be64(C_m)))
//
// The monitor node verifies A_m by advancing its own counter and comparing
// both the counter field and the truncated digest.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tacan/bitstring.hpp"

namespace tacan::auth {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kDefaultCounterBits = 24;
inline constexpr std::size_t kDefaultDigestBits = 8;
inline constexpr std::size_t kMinMasterKeyBytes = 16;

class AuthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when C_m cannot be incremented within W_c bits. The caller must
/// rotate the session (C_s + 1) before generating more messages.
class CounterOverflow : public AuthError {
public:
    using AuthError::AuthError;
};

enum class DigestMode { last_bits, xor_bytes };

struct DigestPolicy {
    DigestMode mode = DigestMode::last_bits;
    std::size_t bits = kDefaultDigestBits;

    /// Throws AuthError unless 1 <= bits <= 64 and xor_bytes implies 8 bits.
    void validate() const;
};

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

/// Eight-byte big-endian encoding of a counter, the HMAC input format.
std::array<std::uint8_t, 8> encode_counter(std::uint64_t counter) noexcept;

Bytes derive_session_key(std::span<const std::uint8_t> master_key, std::uint64_t session_counter);

BitString truncate_digest(std::span<const std::uint8_t> digest, const DigestPolicy& policy);

/// Per-message-ID state shared (by value) between an ECU and the monitor.
/// Single writer: callers serialize mutations per message ID.
class AuthContext {
public:
    AuthContext(Bytes master_key, std::uint64_t session_counter = 0,
                std::size_t counter_bits = kDefaultCounterBits, std::uint32_t msg_id = 0);

    std::uint64_t session_counter() const noexcept { return session_counter_; }
    std::uint64_t message_counter() const noexcept { return message_counter_; }
    std::size_t counter_bits() const noexcept { return counter_bits_; }
    std::uint32_t msg_id() const noexcept { return msg_id_; }
    const Bytes& session_key() const noexcept { return session_key_; }

    /// C_s + 1, SK rederived, C_m reset to 0.
    void rotate_session();

    /// Advances C_m by one without producing a message (a frame slot that
    /// carried nothing usable).
    void skip_message();

    /// Truncated digest of HMAC(SK, counter).
    BitString digest_for(std::uint64_t counter, const DigestPolicy& policy) const;

private:
    friend BitString generate_auth_message(AuthContext&, const DigestPolicy&);
    friend bool verify_auth_message(const BitString&, AuthContext&, const DigestPolicy&);

    void advance();

    Bytes master_key_;
    std::uint64_t session_counter_ = 0;
    Bytes session_key_;
    std::uint64_t message_counter_ = 0;
    std::size_t counter_bits_ = kDefaultCounterBits;
    std::uint32_t msg_id_ = 0;
};

/// Increments C_m and returns C_m || digest (W_c + policy.bits bits).
/// Throws CounterOverflow instead of wrapping.
BitString generate_auth_message(AuthContext& ctx, const DigestPolicy& policy);

/// Algorithm-1 verification. The local counter is incremented before the
/// comparison and stays incremented whatever the outcome. Throws AuthError on
/// a length mismatch.
bool verify_auth_message(const BitString& received, AuthContext& ctx, const DigestPolicy& policy);

/// Parses a hex key ("0b0b..."), optionally 0x-prefixed. Throws AuthError.
Bytes parse_hex_key(std::string_view hex);

/// Reads a raw binary key file. Throws AuthError when unreadable or empty.
Bytes load_key_file(const std::filesystem::path& path);

}  // namespace tacan::auth
