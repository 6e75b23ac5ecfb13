#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tacan {

/// Ordered sequence of bits with explicit length.
///
/// Keys, counters, digests, authentication messages and frames are all
/// carried as BitStrings. Bits are stored one per byte (0 or 1) so that
/// slicing and appending stay trivial; the payloads here are a few hundred
/// bits at most.
class BitString {
public:
    BitString() = default;
    BitString(std::initializer_list<int> bits);

    /// Parses a string of '0' and '1' characters. Throws std::invalid_argument
    /// on any other character.
    static BitString from_string(std::string_view text);

    /// The low `width` bits of `value`, most significant first.
    static BitString from_uint(std::uint64_t value, std::size_t width);

    /// Bytes expanded MSB-first.
    static BitString from_bytes(std::span<const std::uint8_t> bytes);

    static BitString repeat(bool bit, std::size_t count);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    /// Bounds-checked access; throws std::out_of_range.
    bool at(std::size_t i) const;
    bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }

    void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
    void append(const BitString& other);
    void reserve(std::size_t n) { bits_.reserve(n); }
    void clear() noexcept { bits_.clear(); }

    /// Flips bit `i` in place (bounds-checked).
    void flip(std::size_t i);

    /// Bits [pos, pos + count), clamped to the end.
    BitString slice(std::size_t pos, std::size_t count) const;

    /// Interprets bits [pos, pos + width) as an unsigned big-endian integer.
    /// width <= 64.
    std::uint64_t to_uint(std::size_t pos, std::size_t width) const;
    std::uint64_t to_uint() const { return to_uint(0, size()); }

    /// Packs MSB-first into bytes, zero-padding the last byte on the right.
    std::vector<std::uint8_t> to_bytes() const;

    std::string to_string() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

BitString operator+(BitString lhs, const BitString& rhs);

}  // namespace tacan
