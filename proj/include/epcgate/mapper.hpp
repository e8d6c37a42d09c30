#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "epcgate/bitstring.hpp"
#include "epcgate/identifier.hpp"

namespace epcgate {

// 64-bit reader network prefix. Parsed either from four colon-separated
// hextets ("6789:1011:1213:1415") or a /64 prefix ("2001:db8:0:1::/64").
struct NetId {
    std::uint64_t prefix = 0;
    std::string source_text;

    bool operator==(const NetId& other) const { return prefix == other.prefix; }
};

struct Ipv6Address {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    auto operator<=>(const Ipv6Address&) const = default;
};

// canonical:     address = NetId (bits 0-63) || interface-id from true
//                binary conversion (bits 64-127).
// figure_compat: address = tag-derived hextets built from decimal digits
//                as nibbles (bits 0-63) || NetId (bits 64-127).
enum class MappingMode { canonical, figure_compat };

enum class Dispatch { uii_epc, uii_iso, tid_epc, tid_iso };

std::string_view to_string(MappingMode mode);
std::string_view to_string(Dispatch dispatch);
std::optional<MappingMode> mode_from_string(std::string_view text);
std::optional<Dispatch> dispatch_from_string(std::string_view text);

struct MappedAddress {
    Ipv6Address address;
    MappingMode mode = MappingMode::canonical;
    Dispatch dispatch = Dispatch::uii_epc;
    NetId net_id;
    std::string tag_key;  // empty when the mapping was not tagged
};

// Fits an identifier into 64 bits: longer inputs keep their exact 64-bit
// suffix, shorter ones are left-zero-extended. Throws EmptyIdentifier.
BitString fit64(const BitString& bits);

// Digit-pipeline analogue of fit64: last 16 digits, left-'0'-padded.
// Throws EmptyIdentifier, NonDecimalDigit.
std::string select_digits16(std::string_view digits);

// Each of the 16 decimal digits becomes one hex nibble, most significant
// first. Throws WrongLength, NonDecimalDigit.
std::uint64_t digits_to_hextets(std::string_view digits16);

// ISO-format UII payload for the mapper: the serial text plus its radix.
struct IsoSerial {
    std::string text;
    int radix = 10;
};

using UiiPayload = std::variant<EpcIdentifier, IsoSerial>;

// Toggle-dispatch mapping from the UII bank: toggle 0 takes the EPC
// identifier, toggle 1 the ISO serial. Canonical mode converts to binary
// and fits 64 bits (ISO serials over 64 bits are rejected); figure-compat
// mode runs the decimal-digit pipeline and needs a decimal payload.
MappedAddress map_from_uii(bool toggle, const UiiPayload& payload, const NetId& net_id,
                           MappingMode mode, std::string tag_key = {});

// AC-dispatch mapping from a decoded TID record. EpcClassTid concatenates
// mdid(12) || model(12) || xtid(48, when present); IsoClassTid uses the
// 48-bit serial. Canonical mode only.
MappedAddress map_from_tid(const TidRecord& record, const NetId& net_id,
                           MappingMode mode, std::string tag_key = {});

// Throws MalformedNetId, PrefixNot64.
NetId parse_netid(std::string_view text);

// Full 128-bit IPv6 text, uncompressed or with one "::" run.
// Throws MalformedAddress.
Ipv6Address parse_ipv6(std::string_view text);

struct Ipv6Format {
    bool suffix_128 = false;  // append " /128"
    bool compress = false;    // RFC 5952 shortest form
};

// Default form is eight 4-digit lowercase hextets.
std::string format_ipv6(const Ipv6Address& addr, const Ipv6Format& options = {});

}  // namespace epcgate
