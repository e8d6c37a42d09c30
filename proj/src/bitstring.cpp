#include "epcgate/bitstring.hpp"

#include <algorithm>
#include <stdexcept>

namespace epcgate {

namespace {

int hex_digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BitString BitString::from_hex(std::string_view hex) {
    BitString out;
    out.bytes_.reserve((hex.size() + 1) / 2);
    for (std::size_t i = 0; i < hex.size(); ++i) {
        int v = hex_digit_value(hex[i]);
        if (v < 0) {
            throw Error::at_position(Errc::InvalidHexDigit, i,
                                     std::string("'") + hex[i] + "'");
        }
        if (i % 2 == 0) {
            out.bytes_.push_back(static_cast<std::uint8_t>(v << 4));
        } else {
            out.bytes_.back() |= static_cast<std::uint8_t>(v);
        }
    }
    out.nbits_ = hex.size() * 4;
    return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
    if (width > 64) {
        throw Error(Errc::WrongLength, "width " + std::to_string(width) + " exceeds 64");
    }
    if (width < 64 && (value >> width) != 0) {
        throw Error(Errc::WrongLength,
                    "value does not fit in " + std::to_string(width) + " bits");
    }
    BitString out;
    for (std::size_t i = 0; i < width; ++i) {
        out.append_bit((value >> (width - 1 - i)) & 1);
    }
    return out;
}

BitString BitString::from_decimal(std::string_view digits) {
    if (digits.empty()) {
        throw Error(Errc::EmptyIdentifier);
    }
    std::vector<std::uint8_t> d;
    d.reserve(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        char c = digits[i];
        if (c < '0' || c > '9') {
            throw Error::at_position(Errc::InvalidDigit, i, std::string("'") + c + "'");
        }
        d.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    // Repeated division by two, collecting remainders least-significant first.
    std::vector<bool> lsb_first;
    std::size_t lead = 0;
    while (lead < d.size()) {
        if (d[lead] != 0) break;
        ++lead;
    }
    while (lead < d.size()) {
        int carry = 0;
        for (std::size_t i = lead; i < d.size(); ++i) {
            int cur = carry * 10 + d[i];
            d[i] = static_cast<std::uint8_t>(cur / 2);
            carry = cur % 2;
        }
        lsb_first.push_back(carry != 0);
        while (lead < d.size() && d[lead] == 0) ++lead;
    }
    BitString out;
    if (lsb_first.empty()) {
        out.append_bit(false);  // value 0 -> single 0 bit
        return out;
    }
    for (auto it = lsb_first.rbegin(); it != lsb_first.rend(); ++it) {
        out.append_bit(*it);
    }
    return out;
}

BitString BitString::from_hex_value(std::string_view digits) {
    if (digits.empty()) {
        throw Error(Errc::EmptyIdentifier);
    }
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (hex_digit_value(digits[i]) < 0) {
            throw Error::at_position(Errc::InvalidDigit, i,
                                     std::string("'") + digits[i] + "'");
        }
    }
    BitString raw = from_hex(digits);
    std::size_t first_one = 0;
    while (first_one < raw.size() && !raw.bit(first_one)) ++first_one;
    if (first_one == raw.size()) {
        BitString zero;
        zero.append_bit(false);
        return zero;
    }
    return raw.slice(first_one, raw.size() - first_one);
}

bool BitString::bit(std::size_t index) const {
    if (index >= nbits_) {
        throw std::out_of_range("bit index " + std::to_string(index) + " out of " +
                                std::to_string(nbits_));
    }
    return (bytes_[index / 8] >> (7 - index % 8)) & 1;
}

BitString BitString::slice(std::size_t start, std::size_t len) const {
    if (start > nbits_ || len > nbits_ - start) {
        throw std::out_of_range("slice [" + std::to_string(start) + ", +" +
                                std::to_string(len) + ") out of " + std::to_string(nbits_));
    }
    BitString out;
    for (std::size_t i = 0; i < len; ++i) {
        out.append_bit(bit(start + i));
    }
    return out;
}

void BitString::append_bit(bool value) {
    if (nbits_ % 8 == 0) {
        bytes_.push_back(0);
    }
    if (value) {
        bytes_[nbits_ / 8] |= static_cast<std::uint8_t>(1u << (7 - nbits_ % 8));
    }
    ++nbits_;
}

void BitString::append(const BitString& other) {
    for (std::size_t i = 0; i < other.size(); ++i) {
        append_bit(other.bit(i));
    }
}

BitString BitString::concat(const BitString& a, const BitString& b) {
    BitString out = a;
    out.append(b);
    return out;
}

std::uint64_t BitString::to_uint64() const {
    if (nbits_ > 64) {
        throw Error(Errc::WrongLength,
                    std::to_string(nbits_) + " bits do not fit a 64-bit value");
    }
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < nbits_; ++i) {
        acc = (acc << 1) | static_cast<std::uint64_t>(bit(i));
    }
    return acc;
}

std::string BitString::to_hex() const {
    if (nbits_ % 4 != 0) {
        throw Error(Errc::WrongLength,
                    "bit count " + std::to_string(nbits_) + " is not a multiple of 4");
    }
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(nbits_ / 4);
    for (std::size_t i = 0; i < nbits_ / 4; ++i) {
        std::uint8_t nibble = (i % 2 == 0) ? (bytes_[i / 2] >> 4) : (bytes_[i / 2] & 0x0F);
        out.push_back(digits[nibble]);
    }
    return out;
}

std::string BitString::to_binary() const {
    std::string out;
    out.reserve(nbits_);
    for (std::size_t i = 0; i < nbits_; ++i) {
        out.push_back(bit(i) ? '1' : '0');
    }
    return out;
}

}  // namespace epcgate
