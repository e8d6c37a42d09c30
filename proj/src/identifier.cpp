#include "epcgate/identifier.hpp"

#include <cctype>

namespace epcgate {

namespace {

// Bit addresses of the Fig.-2-style TID layouts.
constexpr std::size_t kMdidStart = 0x08;
constexpr std::size_t kMdidBits = 12;
constexpr std::size_t kModelStart = 0x14;
constexpr std::size_t kModelBits = 12;
constexpr std::size_t kXtidStart = 0x20;
constexpr std::size_t kXtidBits = 48;

constexpr std::size_t kManufacturerStart = 0x08;
constexpr std::size_t kManufacturerBits = 8;
constexpr std::size_t kIsoSerialStart = 0x10;
constexpr std::size_t kIsoSerialBits = 48;

std::string hex_byte(std::uint8_t v) {
    static const char* digits = "0123456789ABCDEF";
    return {digits[v >> 4], digits[v & 0x0F]};
}

}  // namespace

TidRecord parse_tid(const MemoryBank& mb10) {
    std::uint8_t ac = read_ac(mb10);
    std::size_t bits = mb10.data.size();
    if (ac == kAcEpc) {
        if (bits < kXtidStart) {
            throw Error(Errc::TruncatedBank,
                        "E2 TID needs " + std::to_string(kXtidStart) + " bits, got " +
                            std::to_string(bits));
        }
        EpcClassTid rec;
        rec.mdid = static_cast<std::uint16_t>(
            read_field(mb10, kMdidStart, kMdidBits).to_uint64());
        rec.model_number = static_cast<std::uint16_t>(
            read_field(mb10, kModelStart, kModelBits).to_uint64());
        if (bits > kXtidStart) {
            if (bits < kXtidStart + kXtidBits) {
                throw Error(Errc::TruncatedBank,
                            "XTID region needs " + std::to_string(kXtidBits) +
                                " bits, got " + std::to_string(bits - kXtidStart));
            }
            rec.xtid_serial = read_field(mb10, kXtidStart, kXtidBits).to_uint64();
            rec.xtid_truncated = bits > kXtidStart + kXtidBits;
        }
        return rec;
    }
    if (ac == kAcIso) {
        if (bits < kIsoSerialStart + kIsoSerialBits) {
            throw Error(Errc::TruncatedBank,
                        "E0 TID needs " + std::to_string(kIsoSerialStart + kIsoSerialBits) +
                            " bits, got " + std::to_string(bits));
        }
        IsoClassTid rec;
        rec.manufacturer_id = static_cast<std::uint8_t>(
            read_field(mb10, kManufacturerStart, kManufacturerBits).to_uint64());
        rec.serial_number = read_field(mb10, kIsoSerialStart, kIsoSerialBits).to_uint64();
        return rec;
    }
    throw Error(Errc::UnknownAllocationClass, "AC=" + hex_byte(ac) + "h");
}

IsoUii parse_iso_uii(std::string_view text) {
    if (text.empty()) {
        throw Error(Errc::MalformedIdentifier, "empty identifier");
    }
    auto d1 = text.find('.');
    auto d2 = d1 == std::string_view::npos ? d1 : text.find('.', d1 + 1);
    auto d3 = d2 == std::string_view::npos ? d2 : text.find('.', d2 + 1);
    if (d3 == std::string_view::npos) {
        throw Error(Errc::MalformedIdentifier, "expected DI.IAC.CIN.SERIAL");
    }
    IsoUii uii;
    uii.di = std::string(text.substr(0, d1));
    uii.iac = std::string(text.substr(d1 + 1, d2 - d1 - 1));
    uii.cin = std::string(text.substr(d2 + 1, d3 - d2 - 1));
    uii.serial = std::string(text.substr(d3 + 1));
    if (uii.di.empty() || uii.iac.empty() || uii.cin.empty() || uii.serial.empty()) {
        throw Error(Errc::MalformedIdentifier, "empty segment");
    }
    if (uii.di != "25S" && uii.di != "25B") {
        throw Error(Errc::UnsupportedDataIdentifier, uii.di);
    }
    if (uii.iac.size() > 3) {
        throw Error(Errc::MalformedIdentifier, "IAC longer than 3 characters");
    }
    for (char c : uii.cin) {
        if (c < '0' || c > '9') {
            throw Error(Errc::NonNumericCin, uii.cin);
        }
    }
    return uii;
}

std::string render_urn(const IsoUii& uii) {
    return "urn:iso:std:iso-iec:15459:" + uii.di + "." + uii.iac + "." + uii.cin + "." +
           uii.serial;
}

BitString serial_to_bits(std::string_view text, int radix) {
    if (radix != 10 && radix != 16) {
        throw Error(Errc::InvalidRadix, "radix " + std::to_string(radix));
    }
    if (text.empty()) {
        throw Error(Errc::EmptyIdentifier);
    }
    return radix == 10 ? BitString::from_decimal(text) : BitString::from_hex_value(text);
}

EpcIdentifier epc_from_hex(std::string_view hex, std::size_t declared_bits) {
    if (hex.empty()) {
        throw Error(Errc::EmptyIdentifier);
    }
    if (declared_bits == 0) {
        throw Error(Errc::LengthMismatch, "declared length is 0 bits");
    }
    for (std::size_t i = 0; i < hex.size(); ++i) {
        char c = hex[i];
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
        if (!ok) {
            throw Error::at_position(Errc::InvalidDigit, i, std::string("'") + c + "'");
        }
    }
    if ((declared_bits + 3) / 4 != hex.size()) {
        throw Error(Errc::LengthMismatch,
                    std::to_string(hex.size()) + " hex digits vs " +
                        std::to_string(declared_bits) + " declared bits");
    }
    BitString raw = BitString::from_hex(hex);
    for (std::size_t i = declared_bits; i < raw.size(); ++i) {
        if (raw.bit(i)) {
            throw Error(Errc::LengthMismatch, "nonzero pad bits past declared length");
        }
    }
    return EpcIdentifier{raw.slice(0, declared_bits), std::nullopt};
}

EpcIdentifier epc_from_decimal(std::string_view digits) {
    return EpcIdentifier{BitString::from_decimal(digits), std::string(digits)};
}

}  // namespace epcgate
