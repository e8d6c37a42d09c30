#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "epcgate/bitstring.hpp"
#include "epcgate/tag_memory.hpp"

namespace epcgate {

// TID bank decoded per the E2h layout: 12-bit mask-designer id at 08h-13h,
// 12-bit model number at 14h-1Fh, optional 48-bit XTID serial at 20h-4Fh.
// XTID regions longer than 48 bits are cut to the first 48 and flagged.
struct EpcClassTid {
    std::uint16_t mdid = 0;          // 12 bits
    std::uint16_t model_number = 0;  // 12 bits
    std::optional<std::uint64_t> xtid_serial;  // 48 bits
    bool xtid_truncated = false;

    bool operator==(const EpcClassTid&) const = default;
};

// TID bank decoded per the E0h layout: 8-bit manufacturer id at 08h-0Fh,
// 48-bit serial number at 10h-3Fh.
struct IsoClassTid {
    std::uint8_t manufacturer_id = 0;
    std::uint64_t serial_number = 0;  // 48 bits

    bool operator==(const IsoClassTid&) const = default;
};

using TidRecord = std::variant<EpcClassTid, IsoClassTid>;

// Dispatches on the Allocation Class byte: E2h -> EpcClassTid,
// E0h -> IsoClassTid. Throws UnknownAllocationClass, TruncatedBank.
TidRecord parse_tid(const MemoryBank& mb10);

// ISO 15459 identifier in dotted form: DI.IAC.CIN.SERIAL.
struct IsoUii {
    std::string di;      // 25S or 25B
    std::string iac;     // 1-3 characters
    std::string cin;     // digits
    std::string serial;  // opaque; may embed part or lot/batch prefixes

    bool operator==(const IsoUii&) const = default;
};

// Splits on the first three dots; anything after the third dot is the
// serial payload, dots preserved. Throws UnsupportedDataIdentifier,
// MalformedIdentifier, NonNumericCin.
IsoUii parse_iso_uii(std::string_view text);

// urn:iso:std:iso-iec:15459:<DI>.<IAC>.<CIN>.<SERIAL>
std::string render_urn(const IsoUii& uii);

// Minimal-width binary of a serial number given as decimal or hex text.
// Throws InvalidRadix, InvalidDigit, EmptyIdentifier.
BitString serial_to_bits(std::string_view text, int radix);

// EPC identity as a bit string, with the decimal spelling retained when
// the identifier was supplied as digits.
struct EpcIdentifier {
    BitString bits;
    std::optional<std::string> decimal_form;

    bool operator==(const EpcIdentifier&) const = default;
};

// Hex-supplied EPC: the digits spell the bit string left-aligned, taken
// verbatim at the declared length. The digit count must be ceil(bits/4)
// and any trailing pad bits must be zero. Throws InvalidDigit,
// EmptyIdentifier, LengthMismatch.
EpcIdentifier epc_from_hex(std::string_view hex, std::size_t declared_bits);

// Decimal-supplied EPC: minimal-width binary, decimal form retained.
EpcIdentifier epc_from_decimal(std::string_view digits);

}  // namespace epcgate
