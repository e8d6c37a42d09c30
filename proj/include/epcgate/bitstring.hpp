#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "epcgate/error.hpp"

namespace epcgate {

// Ordered, length-explicit bit sequence, most-significant bit first.
// Bit 0 is the most significant bit of the first byte of a dump; unused
// pad bits in the last storage byte are kept zero so equality is bytewise.
class BitString {
  public:
    BitString() = default;

    // 4 bits per hex digit, in text order. Throws InvalidHexDigit with the
    // 0-based position of the first bad character. Empty text gives an
    // empty bit string.
    static BitString from_hex(std::string_view hex);

    // Exact-width big-endian encoding of `value`. Throws WrongLength when
    // width exceeds 64 or the value does not fit.
    static BitString from_uint(std::uint64_t value, std::size_t width);

    // Minimal-width binary of an arbitrary-precision decimal integer.
    // Value 0 encodes as a single 0 bit. Throws InvalidDigit (0-based
    // position) or EmptyIdentifier.
    static BitString from_decimal(std::string_view digits);

    // Minimal-width binary of a hex-spelled integer (leading zero bits
    // dropped, value 0 becomes a single 0 bit). Throws InvalidDigit.
    static BitString from_hex_value(std::string_view digits);

    std::size_t size() const noexcept { return nbits_; }
    bool empty() const noexcept { return nbits_ == 0; }

    bool bit(std::size_t index) const;

    // Bits [start, start+len). Throws std::out_of_range past the end.
    BitString slice(std::size_t start, std::size_t len) const;

    void append_bit(bool value);
    void append(const BitString& other);

    static BitString concat(const BitString& a, const BitString& b);

    // Interprets the whole string as a big-endian integer; size() must be
    // at most 64.
    std::uint64_t to_uint64() const;

    // Lowercase hex; size() must be a multiple of 4.
    std::string to_hex() const;

    std::string to_binary() const;

    bool operator==(const BitString& other) const = default;

  private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

}  // namespace epcgate
