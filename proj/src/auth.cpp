#include "tacan/auth.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cctype>
#include <fstream>
#include <iterator>

namespace tacan::auth {

void DigestPolicy::validate() const {
    if (bits < 1 || bits > 64) {
        throw AuthError("digest width must be in [1, 64]");
    }
    if (mode == DigestMode::xor_bytes && bits != 8) {
        throw AuthError("xor-bytes truncation produces exactly 8 bits");
    }
}

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
             out.data(), &len) == nullptr) {
        throw AuthError("HMAC-SHA256 failed");
    }
    out.resize(len);
    return out;
}

std::array<std::uint8_t, 8> encode_counter(std::uint64_t counter) noexcept {
    std::array<std::uint8_t, 8> out{};
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(counter & 0xFFU);
        counter >>= 8;
    }
    return out;
}

Bytes derive_session_key(std::span<const std::uint8_t> master_key, std::uint64_t session_counter) {
    if (master_key.empty()) {
        throw AuthError("derive_session_key: empty master key");
    }
    const auto encoded = encode_counter(session_counter);
    return hmac_sha256(master_key, encoded);
}

BitString truncate_digest(std::span<const std::uint8_t> digest, const DigestPolicy& policy) {
    policy.validate();
    if (digest.size() * 8 < policy.bits || digest.empty()) {
        throw AuthError("truncate_digest: digest shorter than the truncated width");
    }
    if (policy.mode == DigestMode::xor_bytes) {
        std::uint8_t acc = 0;
        for (auto b : digest) {
            acc ^= b;
        }
        return BitString::from_uint(acc, 8);
    }
    const std::size_t nbytes = (policy.bits + 7) / 8;
    const BitString tail = BitString::from_bytes(digest.subspan(digest.size() - nbytes));
    return tail.slice(tail.size() - policy.bits, policy.bits);
}

AuthContext::AuthContext(Bytes master_key, std::uint64_t session_counter, std::size_t counter_bits,
                         std::uint32_t msg_id)
    : master_key_(std::move(master_key)),
      session_counter_(session_counter),
      counter_bits_(counter_bits),
      msg_id_(msg_id) {
    if (master_key_.size() < kMinMasterKeyBytes) {
        throw AuthError("master key must be at least 16 bytes");
    }
    if (counter_bits_ < 1 || counter_bits_ > 63) {
        throw AuthError("counter width must be in [1, 63]");
    }
    session_key_ = derive_session_key(master_key_, session_counter_);
}

void AuthContext::rotate_session() {
    ++session_counter_;
    session_key_ = derive_session_key(master_key_, session_counter_);
    message_counter_ = 0;
}

void AuthContext::advance() {
    if (message_counter_ + 1 >= (std::uint64_t{1} << counter_bits_)) {
        throw CounterOverflow("message counter overflow; rotate the session key");
    }
    ++message_counter_;
}

void AuthContext::skip_message() { advance(); }

BitString AuthContext::digest_for(std::uint64_t counter, const DigestPolicy& policy) const {
    const auto encoded = encode_counter(counter);
    const Bytes mac = hmac_sha256(session_key_, encoded);
    return truncate_digest(mac, policy);
}

BitString generate_auth_message(AuthContext& ctx, const DigestPolicy& policy) {
    policy.validate();
    ctx.advance();
    BitString msg = BitString::from_uint(ctx.message_counter_, ctx.counter_bits_);
    msg.append(ctx.digest_for(ctx.message_counter_, policy));
    return msg;
}

bool verify_auth_message(const BitString& received, AuthContext& ctx, const DigestPolicy& policy) {
    policy.validate();
    if (received.size() != ctx.counter_bits_ + policy.bits) {
        throw AuthError("verify_auth_message: length mismatch");
    }
    const std::uint64_t claimed = received.to_uint(0, ctx.counter_bits_);
    ctx.advance();
    if (claimed != ctx.message_counter_) {
        return false;
    }
    return received.slice(ctx.counter_bits_, policy.bits) == ctx.digest_for(ctx.message_counter_, policy);
}

Bytes parse_hex_key(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) {
        hex.remove_prefix(2);
    }
    if (hex.empty() || hex.size() % 2 != 0) {
        throw AuthError("hex key must have an even, nonzero number of digits");
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]);
        const int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw AuthError("hex key contains a non-hex digit");
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Bytes load_key_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw AuthError("cannot open key file " + path.string());
    }
    Bytes out{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (out.empty()) {
        throw AuthError("key file is empty: " + path.string());
    }
    return out;
}

}  // namespace tacan::auth
