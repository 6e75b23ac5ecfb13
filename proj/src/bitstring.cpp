#include "tacan/bitstring.hpp"

#include <stdexcept>

namespace tacan {

BitString::BitString(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) {
            throw std::invalid_argument("BitString: bit values must be 0 or 1");
        }
        bits_.push_back(static_cast<std::uint8_t>(b));
    }
}

BitString BitString::from_string(std::string_view text) {
    BitString out;
    out.bits_.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("BitString: unexpected character '" + std::string(1, c) + "'");
        }
        out.bits_.push_back(c == '1' ? 1 : 0);
    }
    return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
    if (width > 64) {
        throw std::invalid_argument("BitString::from_uint: width > 64");
    }
    BitString out;
    out.bits_.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
        out.bits_.push_back(static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1U));
    }
    return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
    BitString out;
    out.bits_.reserve(bytes.size() * 8);
    for (std::uint8_t byte : bytes) {
        for (int i = 7; i >= 0; --i) {
            out.bits_.push_back(static_cast<std::uint8_t>((byte >> i) & 1U));
        }
    }
    return out;
}

BitString BitString::repeat(bool bit, std::size_t count) {
    BitString out;
    out.bits_.assign(count, bit ? 1 : 0);
    return out;
}

bool BitString::at(std::size_t i) const {
    if (i >= bits_.size()) {
        throw std::out_of_range("BitString index out of range");
    }
    return bits_[i] != 0;
}

void BitString::append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void BitString::flip(std::size_t i) {
    if (i >= bits_.size()) {
        throw std::out_of_range("BitString index out of range");
    }
    bits_[i] ^= 1U;
}

BitString BitString::slice(std::size_t pos, std::size_t count) const {
    BitString out;
    if (pos >= bits_.size()) {
        return out;
    }
    const std::size_t end = count > bits_.size() - pos ? bits_.size() : pos + count;
    out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                     bits_.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

std::uint64_t BitString::to_uint(std::size_t pos, std::size_t width) const {
    if (width > 64) {
        throw std::invalid_argument("BitString::to_uint: width > 64");
    }
    if (pos + width > bits_.size()) {
        throw std::out_of_range("BitString::to_uint: range exceeds length");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
        v = (v << 1) | bits_[pos + i];
    }
    return v;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
        }
    }
    return out;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

BitString operator+(BitString lhs, const BitString& rhs) {
    lhs.append(rhs);
    return lhs;
}

}  // namespace tacan
